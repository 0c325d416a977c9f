#include "sdfap/value_sim.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

#include "sdfap/error.hpp"
#include "sdfap/schedule.hpp"

namespace sdfap {

int stimulus_iterations(const Graph& g, const Stimulus& s) {
  for (const auto& [name, _] : s.firings) {
    auto n = g.find(name);
    if (!n || g.nodes[*n].kind != NodeKind::Source)
      throw Error(ErrorCode::ShapeMismatch, "stimulus names '" + name + "', which is not a source");
  }
  const auto r = compute_repetition_vector(g);
  std::optional<int> iters;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    const auto& node = g.nodes[n];
    if (node.kind != NodeKind::Source) continue;
    auto it = s.firings.find(node.name);
    const auto count = it == s.firings.end() ? 0 : static_cast<std::int64_t>(it->second.size());
    if (count % r[n] != 0)
      throw Error(ErrorCode::ShapeMismatch, "source '" + node.name + "' has " + std::to_string(count) +
                                                " firing(s), not a multiple of its repetition count " +
                                                std::to_string(r[n]));
    const auto i = static_cast<int>(count / r[n]);
    if (iters && *iters != i)
      throw Error(ErrorCode::ShapeMismatch, "sources disagree on the number of graph iterations");
    iters = i;
    if (it == s.firings.end()) continue;
    const auto want = static_cast<std::size_t>(node.patterns.outputs.at(0).total());
    for (const auto& v : it->second)
      if (v.size() != want)
        throw Error(ErrorCode::ShapeMismatch, "source '" + node.name + "' firing has " + std::to_string(v.size()) +
                                                  " token(s), pattern total is " + std::to_string(want));
  }
  return iters.value_or(g.iterations);
}

std::map<std::string, std::vector<Token>> eval_combinational(const Graph& g, const Stimulus& s) {
  const int iterations = stimulus_iterations(g, s);
  auto order = g.topological_order();
  if (!order) throw Error(ErrorCode::InvalidGraph, "graph has a cycle");
  const auto r = compute_repetition_vector(g);

  std::vector<std::deque<Token>> streams(g.edges.size());
  std::map<std::string, std::vector<Token>> out;
  for (const auto& n : g.nodes)
    if (n.kind == NodeKind::Sink) out[n.name];

  auto emit = [&](std::size_t node, std::size_t port, const std::vector<Token>& toks) {
    for (auto e : g.out_edges(node))
      if (g.edges[e].from.port == port) streams[e].insert(streams[e].end(), toks.begin(), toks.end());
  };

  for (auto n : *order) {
    const auto& node = g.nodes[n];
    const auto mask = width_mask(node.width);
    const auto firings = r[n] * iterations;
    switch (node.kind) {
      case NodeKind::Source: {
        auto it = s.firings.find(node.name);
        if (it == s.firings.end()) break;
        for (const auto& v : it->second) {
          std::vector<Token> toks;
          for (auto x : v) toks.push_back(x & mask);
          emit(n, 0, toks);
        }
        break;
      }
      case NodeKind::Sink: {
        auto e = g.input_edge(n, 0);
        if (!e) break;
        auto& dst = out[node.name];
        dst.insert(dst.end(), streams[*e].begin(), streams[*e].end());
        streams[*e].clear();
        break;
      }
      case NodeKind::Compute: {
        for (std::int64_t f = 0; f < firings; ++f) {
          std::vector<Value> args;
          for (std::size_t p = 0; p < node.patterns.inputs.size(); ++p) {
            const auto want = node.patterns.inputs[p].total();
            auto& q = streams[g.input_edge(n, p).value()];
            std::vector<Token> v;
            for (std::int64_t k = 0; k < want; ++k) {
              v.push_back(q.front());
              q.pop_front();
            }
            args.push_back(want == 1 ? Value::of(v[0]) : Value::of(std::move(v)));
          }
          const auto result = eval_expr(*node.body, args, node.width);
          std::vector<Token> flat;
          result.flatten_into(flat);
          std::size_t pos = 0;
          for (std::size_t k = 0; k < node.patterns.outputs.size(); ++k) {
            const auto cnt = static_cast<std::size_t>(node.patterns.outputs[k].total());
            emit(n, k, std::vector<Token>(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                                          flat.begin() + static_cast<std::ptrdiff_t>(pos + cnt)));
            pos += cnt;
          }
        }
        break;
      }
    }
  }
  return out;
}

namespace {

// Phase counter of one node.
struct NodeController {
  std::size_t length = 1;
  std::int64_t total = 0;  // firings owed
  std::int64_t fired = 0;
  bool running = false;
  std::size_t phase = 0;
  bool busy_next = false;  // continues into next cycle

  bool done() const { return fired == total && !busy_next; }
};

// Occupancy counter plus the constant threshold table.
struct FifoController {
  FiringThresholds table;
  std::int64_t count = 0;
  std::int64_t backlog_limit = 0;

  bool ready(const NodeController& producer) const {
    return count >= (producer.running ? table.at(producer.phase) : table.idle);
  }
};

struct PipelineReg {
  std::vector<Token> data, next;
  bool loaded = false;
};

struct OutputState {
  std::size_t emitted = 0;
  std::size_t folded = 0;
  bool has_acc = false;
  Token acc = 0;
  std::vector<Token> cache;  // combinational results for this firing
};

struct Datapath {
  const DatapathPlan* plan = nullptr;
  std::vector<std::vector<Token>> in;  // tokens received this firing, per port
  std::vector<OutputState> out;
  std::size_t firing = 0;

  void reset() {
    for (auto& v : in) v.clear();
    for (auto& o : out) o = OutputState{};
  }
};

Token at_or_zero(const std::vector<Token>& v, std::size_t i) { return i < v.size() ? v[i] : 0; }

class ClockedMachine {
 public:
  ClockedMachine(const Graph& g, const Stimulus& s, const ClockedOptions& opts)
      : g_(g), s_(s), opts_(opts), iterations_(stimulus_iterations(g, s)) {
    auto order = g.topological_order();
    if (!order) throw Error(ErrorCode::InvalidGraph, "graph has a cycle");
    order_ = *order;
    const auto r = compute_repetition_vector(g);
    const auto nn = g.nodes.size();
    nodes_.resize(nn);
    dps_.resize(nn);
    plans_.resize(nn);
    src_pos_.assign(nn, 0);
    result_.firing_starts.resize(nn);
    std::int64_t sum = 0;
    for (std::size_t n = 0; n < nn; ++n) {
      const auto& node = g.nodes[n];
      nodes_[n].length = node.length();
      if (node.kind == NodeKind::Sink) continue;
      nodes_[n].total = r[n] * iterations_;
      sum += r[n] * static_cast<std::int64_t>(node.length());
      if (node.kind == NodeKind::Compute) {
        plans_[n] = lower_hof_node(node);
        dps_[n].plan = &plans_[n];
        dps_[n].in.resize(node.patterns.inputs.size());
        dps_[n].out.resize(node.patterns.outputs.size());
      }
    }
    horizon_ = opts.horizon.value_or(std::max<std::int64_t>(16, iterations_ * sum * 4));
    const auto ne = g.edges.size();
    fifo_ctrl_.resize(ne);
    fifos_.resize(ne);
    pregs_.resize(ne);
    for (std::size_t e = 0; e < ne; ++e)
      if (g.edges[e].kind == EdgeKind::Fifo) {
        fifo_ctrl_[e].table = edge_thresholds(g.edges[e], opts.threshold_delta);
        fifo_ctrl_[e].backlog_limit = source_backlog_limit(g.edges[e]);
      }
    for (const auto& n : g.nodes)
      if (n.kind == NodeKind::Sink) result_.sinks[n.name];
  }

  SimResult run() {
    std::int64_t t = 0;
    for (; !all_done(); ++t) {
      if (t >= horizon_) throw Error(ErrorCode::HorizonExceeded, "clocked simulation did not finish");
      decide(t);
      bool any = false;
      for (const auto& nc : nodes_) any = any || nc.running;
      if (!any) {
        std::ostringstream os;
        os << "no node can fire at cycle " << t;
        throw Error(ErrorCode::Deadlock, os.str());
      }
      for (auto n : order_)
        if (nodes_[n].running) execute(n, t);
      commit();
    }
    result_.cycles = t;
    return std::move(result_);
  }

 private:
  bool all_done() const {
    return std::all_of(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.done(); });
  }

  void decide(std::int64_t t) {
    for (auto n : order_) {
      auto& nc = nodes_[n];
      const auto& node = g_.nodes[n];
      if (node.kind == NodeKind::Sink) continue;
      nc.running = false;
      if (nc.busy_next) {
        nc.running = true;
        ++nc.phase;
        continue;
      }
      bool fire = nc.fired < nc.total;
      bool pipe_loaded = false;
      for (auto e : g_.in_edges(n)) {
        const auto& ed = g_.edges[e];
        if (ed.kind == EdgeKind::PipelineRegister) {
          pipe_loaded = pipe_loaded || pregs_[e].loaded;
          fire = fire && pregs_[e].loaded;
        } else {
          fire = fire && fifo_ctrl_[e].ready(nodes_[ed.from.node]);
        }
      }
      if (node.kind == NodeKind::Source)
        for (auto e : g_.out_edges(n))
          if (g_.edges[e].kind == EdgeKind::Fifo) fire = fire && fifo_ctrl_[e].count <= fifo_ctrl_[e].backlog_limit;
      if (!fire && pipe_loaded)
        throw Error(ErrorCode::PipelineHazard, "'" + node.name + "' missed data held in its pipeline register");
      if (fire) {
        nc.running = true;
        nc.phase = 0;
        ++nc.fired;
        result_.firing_starts[n].push_back(t);
        if (dps_[n].plan) dps_[n].reset();
      }
    }
    // Busy for any node whose firing already started in an earlier cycle was
    // already captured above; also account for pipeline hazards when busy.
    for (auto n : order_) {
      if (nodes_[n].running && nodes_[n].phase > 0)
        for (auto e : g_.in_edges(n))
          if (g_.edges[e].kind == EdgeKind::PipelineRegister && pregs_[e].loaded)
            throw Error(ErrorCode::PipelineHazard,
                        "'" + g_.nodes[n].name + "' is busy when its pipeline register delivers a new firing");
    }
  }

  void push(std::size_t node, std::size_t port, Token v, std::int64_t t) {
    for (auto e : g_.out_edges(node)) {
      const auto& ed = g_.edges[e];
      if (ed.from.port != port) continue;
      switch (ed.kind) {
        case EdgeKind::SinkWire:
          result_.sinks[g_.nodes[ed.to.node].name].push_back({v, t});
          break;
        case EdgeKind::PipelineRegister: pregs_[e].next.push_back(v); break;
        case EdgeKind::Fifo:
          fifos_[e].push_back(v);
          if (opts_.capacities && static_cast<std::int64_t>(fifos_[e].size()) > opts_.capacities->at(e))
            throw Error(ErrorCode::FifoOverflow, "FIFO " + g_.edge_name(e) + " exceeds its capacity of " +
                                                     std::to_string(opts_.capacities->at(e)));
          break;
      }
    }
  }

  Token pop(std::size_t e, std::size_t idx) {
    if (g_.edges[e].kind == EdgeKind::PipelineRegister) {
      const auto& d = pregs_[e].data;
      if (idx < d.size()) return d[idx];
      ++result_.underflows;
      return 0;
    }
    auto& q = fifos_[e];
    if (q.empty()) {
      ++result_.underflows;
      return 0;
    }
    const auto v = q.front();
    q.pop_front();
    return v;
  }

  void execute(std::size_t n, std::int64_t t) {
    const auto& node = g_.nodes[n];
    const auto k = nodes_[n].phase;
    const auto mask = width_mask(node.width);
    if (node.kind == NodeKind::Source) {
      const auto firing = nodes_[n].fired - 1;
      const auto& v = s_.firings.at(node.name).at(static_cast<std::size_t>(firing));
      for (std::int64_t i = 0; i < node.patterns.outputs[0][k]; ++i) push(n, 0, v.at(src_pos_[n]++) & mask, t);
      if (k + 1 == node.length()) src_pos_[n] = 0;
      return;
    }
    auto& dp = dps_[n];
    dp.firing = static_cast<std::size_t>(nodes_[n].fired - 1);
    for (std::size_t p = 0; p < node.patterns.inputs.size(); ++p) {
      const auto e = *g_.input_edge(n, p);
      for (std::int64_t i = 0; i < node.patterns.inputs[p][k]; ++i)
        dp.in[p].push_back(pop(e, static_cast<std::size_t>(i)));
    }
    const auto& plan = *dp.plan;
    for (std::size_t o = 0; o < plan.outputs.size(); ++o) {
      const auto& op = plan.outputs[o];
      auto& st = dp.out[o];
      const auto produce = static_cast<std::size_t>(node.patterns.outputs[o][k]);
      switch (op.style) {
        case OutputStyle::Elementwise:
          for (std::size_t i = 0; i < produce; ++i, ++st.emitted) push(n, o, lane_value(dp, op, st.emitted), t);
          break;
        case OutputStyle::Fold: {
          std::size_t avail = op.fold_length;
          for (auto p : op.lane_inputs) avail = std::min(avail, dp.in[p].size());
          for (; st.folded < avail; ++st.folded) {
            const auto x = lane_value(dp, op, st.folded);
            if (!st.has_acc) {
              st.acc = op.fold1 ? x : combine(op, op.init & mask, x, node.width);
              st.has_acc = true;
            } else {
              st.acc = combine(op, st.acc, x, node.width);
            }
          }
          if (opts_.on_accumulator) opts_.on_accumulator({n, o, dp.firing, k, st.folded, st.acc});
          for (std::size_t i = 0; i < produce; ++i) push(n, o, st.has_acc ? st.acc : op.init & mask, t);
          break;
        }
        case OutputStyle::Combinational: {
          if (produce == 0) break;
          if (st.cache.empty()) {
            std::vector<Token> flat;
            for (std::size_t p = 0; p < dp.in.size(); ++p) {
              const auto want = static_cast<std::size_t>(node.patterns.inputs[p].total());
              for (std::size_t i = 0; i < want; ++i) flat.push_back(at_or_zero(dp.in[p], i));
            }
            for (const auto& u : op.unrolled) st.cache.push_back(eval_scalar(*u, flat, node.width));
          }
          for (std::size_t i = 0; i < produce; ++i, ++st.emitted) push(n, o, at_or_zero(st.cache, st.emitted), t);
          break;
        }
      }
    }
  }

  Token lane_value(const Datapath& dp, const OutputPlan& op, std::size_t element) const {
    std::vector<Token> operands(dp.in.size(), 0);
    for (auto p : op.lane_inputs) operands[p] = at_or_zero(dp.in[p], element);
    return eval_scalar(*op.lane, operands, dp.plan->width);
  }

  static Token combine(const OutputPlan& op, Token acc, Token x, int width) {
    const Token args[2] = {acc, x};
    return eval_scalar(*op.combine, args, width);
  }

  void commit() {
    for (std::size_t e = 0; e < g_.edges.size(); ++e) {
      const auto& ed = g_.edges[e];
      const auto& prod = nodes_[ed.from.node];
      const auto& cons = nodes_[ed.to.node];
      if (ed.kind == EdgeKind::Fifo) {
        const auto wr = prod.running ? ed.pp[prod.phase] : 0;
        const auto rd = cons.running ? ed.cp[cons.phase] : 0;
        auto& c = fifo_ctrl_[e].count;
        c = std::max<std::int64_t>(0, c + wr - rd);
      } else if (ed.kind == EdgeKind::PipelineRegister) {
        auto& r = pregs_[e];
        r.data = std::move(r.next);
        r.next.clear();
        r.loaded = prod.running && prod.phase == 0;
      }
    }
    for (auto& nc : nodes_) {
      nc.busy_next = nc.running && nc.phase + 1 < nc.length;
      if (!nc.running) nc.phase = 0;
    }
  }

  const Graph& g_;
  const Stimulus& s_;
  const ClockedOptions& opts_;
  int iterations_;
  std::int64_t horizon_ = 0;
  std::vector<std::size_t> order_;
  std::vector<NodeController> nodes_;
  std::vector<FifoController> fifo_ctrl_;
  std::vector<std::deque<Token>> fifos_;
  std::vector<PipelineReg> pregs_;
  std::vector<DatapathPlan> plans_;
  std::vector<Datapath> dps_;
  std::vector<std::size_t> src_pos_;
  SimResult result_;
};

}  // namespace

SimResult simulate_clocked(const Graph& g, const Stimulus& s, const ClockedOptions& opts) {
  return ClockedMachine(g, s, opts).run();
}

namespace {

Stimulus draw_stimulus(const Graph& g, const RepetitionVector& r, int iterations, std::mt19937_64& rng) {
  Stimulus s;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    const auto& node = g.nodes[n];
    if (node.kind != NodeKind::Source) continue;
    std::uniform_int_distribution<Token> dist(0, width_mask(node.width));
    auto& fs = s.firings[node.name];
    const auto per = static_cast<std::size_t>(node.patterns.outputs.at(0).total());
    for (std::int64_t f = 0; f < r[n] * iterations; ++f) {
      std::vector<Token> v(per);
      for (auto& x : v) x = dist(rng);
      fs.push_back(std::move(v));
    }
  }
  return s;
}

}  // namespace

Stimulus random_stimulus(const Graph& g, int iterations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return draw_stimulus(g, compute_repetition_vector(g), iterations, rng);
}

EquivalenceReport equivalence_check(const Graph& g, std::size_t trials, std::uint64_t seed,
                                    const EquivalenceOptions& opts) {
  EquivalenceReport rep;
  rep.trials = trials;
  const auto r = compute_repetition_vector(g);
  ClockedOptions copts;
  copts.threshold_delta = opts.threshold_delta;
  for (std::size_t i = 0; i < trials; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    auto stim = draw_stimulus(g, r, opts.iterations, rng);
    const auto expected = eval_combinational(g, stim);
    std::map<std::string, std::vector<Token>> actual;
    std::string error;
    try {
      const auto res = simulate_clocked(g, stim, copts);
      for (const auto& [name, toks] : res.sinks)
        for (const auto& tk : toks) actual[name].push_back(tk.value);
      for (const auto& [name, _] : expected) actual[name];
    } catch (const Error& e) {
      error = e.what();
    }
    if (error.empty() && actual == expected) continue;
    ++rep.mismatches;
    if (rep.counterexamples.size() < opts.max_counterexamples)
      rep.counterexamples.push_back({i, std::move(stim), expected, std::move(actual), std::move(error)});
  }
  return rep;
}

}  // namespace sdfap

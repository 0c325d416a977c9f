#include "sdfap/codegen.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sdfap/error.hpp"

namespace sdfap {

using namespace rtl;
using NetPtr = rtl::ExprPtr;

std::string_view to_string(FifoFlavor f) {
  return f == FifoFlavor::RegisterFile ? "register_file" : "memory_array";
}

FifoFlavor fifo_flavor(std::int64_t capacity, const LoweringOptions& opts) {
  return capacity <= opts.register_file_limit ? FifoFlavor::RegisterFile : FifoFlavor::MemoryArray;
}

int counter_width(std::int64_t max_value) {
  return std::max(1, static_cast<int>(std::bit_width(static_cast<std::uint64_t>(std::max<std::int64_t>(max_value, 1)))));
}

std::string sanitize(std::string_view name) {
  std::string s;
  for (char c : name) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) s = "n_" + s;
  return s;
}

std::string edge_identifier(const Graph& g, std::size_t e) {
  const auto& ed = g.edges[e];
  return sanitize(g.nodes[ed.from.node].name) + "_" + std::to_string(ed.from.port) + "_to_" +
         sanitize(g.nodes[ed.to.node].name) + "_" + std::to_string(ed.to.port);
}

namespace {

NetPtr one() { return lit(1, 1); }
NetPtr zero() { return lit(0, 1); }
NetPtr and_(NetPtr a, NetPtr b) { return bin(BinOp::And, std::move(a), std::move(b)); }
NetPtr or_(NetPtr a, NetPtr b) { return bin(BinOp::Or, std::move(a), std::move(b)); }
NetPtr not_(NetPtr a) { return bin(BinOp::Eq, std::move(a), zero()); }
NetPtr is(NetPtr x, std::int64_t v) { return bin(BinOp::Eq, x, lit(static_cast<std::uint64_t>(v), x->width)); }

// Constant table indexed by a phase signal.
NetPtr table(const std::vector<std::int64_t>& vals, const NetPtr& phase, int width) {
  if (std::all_of(vals.begin(), vals.end(), [&](auto v) { return v == vals[0]; }))
    return lit(static_cast<std::uint64_t>(vals[0]), width);
  NetPtr r = lit(static_cast<std::uint64_t>(vals.back()), width);
  for (std::size_t k = vals.size() - 1; k-- > 0;)
    r = mux(is(phase, static_cast<std::int64_t>(k)), lit(static_cast<std::uint64_t>(vals[k]), width), r);
  return r;
}

NetPtr nonzero_table(const AccessPattern& p, const NetPtr& phase) {
  std::vector<std::int64_t> v;
  for (auto x : p.phases()) v.push_back(x != 0);
  return table(v, phase, 1);
}

std::vector<std::int64_t> cumulative(const AccessPattern& p) {
  std::vector<std::int64_t> c(p.length());
  std::partial_sum(p.phases().begin(), p.phases().end(), c.begin());
  return c;
}

std::size_t crossing(const std::vector<std::int64_t>& cum, std::int64_t element) {
  return static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), element) - cum.begin());
}

// Adds wires to a module under construction.
struct Builder {
  Module& m;
  std::size_t next = 0;

  NetPtr wire(const std::string& name, NetPtr value) {
    const int w = value->width;
    m.wires.push_back({name, w, std::move(value)});
    return ref(name, w);
  }
  NetPtr temp(NetPtr value) { return wire("t" + std::to_string(next++), std::move(value)); }
  NetPtr reg(const std::string& name, int width, NetPtr next_value, NetPtr enable = nullptr) {
    m.registers.push_back({name, width, 0, std::move(next_value), std::move(enable)});
    return ref(name, width);
  }
  void port(const std::string& name, Dir d, int width) { m.ports.push_back({name, d, width}); }
  void drive(const std::string& port, NetPtr value) { m.outputs[port] = std::move(value); }
};

// Scalar DAG to netlist; every operator becomes one named wire so shared
// nodes are emitted once.
struct ScalarLowering {
  Builder& b;
  int width;
  std::function<NetPtr(std::size_t)> operand;
  std::unordered_map<const ScalarExpr*, NetPtr> memo;

  NetPtr operator()(const ScalarPtr& e) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    NetPtr r;
    switch (e->kind) {
      case ScalarExpr::Kind::Operand: r = operand(e->slot); break;
      case ScalarExpr::Kind::Const: r = lit(e->value, width); break;
      case ScalarExpr::Kind::Prim: {
        auto a = (*this)(e->a);
        auto c = (*this)(e->b);
        switch (e->op) {
          case PrimOp::Add: r = b.temp(bin(BinOp::Add, a, c)); break;
          case PrimOp::Sub: r = b.temp(bin(BinOp::Sub, a, c)); break;
          case PrimOp::Mul: r = b.temp(bin(BinOp::Mul, a, c)); break;
          case PrimOp::Min: r = b.temp(mux(bin(BinOp::Lt, a, c), a, c)); break;
          case PrimOp::Max: r = b.temp(mux(bin(BinOp::Lt, a, c), c, a)); break;
          case PrimOp::Lt: r = b.temp(mux(bin(BinOp::Lt, a, c), lit(1, width), lit(0, width))); break;
          case PrimOp::Eq: r = b.temp(mux(bin(BinOp::Eq, a, c), lit(1, width), lit(0, width))); break;
        }
        break;
      }
    }
    memo.emplace(e.get(), r);
    return r;
  }
};

// Selects among per-phase choices; `choices` is non-empty.
NetPtr phase_select(const NetPtr& phase, const std::vector<std::pair<std::size_t, NetPtr>>& choices) {
  NetPtr r = choices.back().second;
  for (std::size_t i = choices.size() - 1; i-- > 0;)
    r = mux(is(phase, static_cast<std::int64_t>(choices[i].first)), choices[i].second, r);
  return r;
}

Module node_controller(const NodeSpec& n, const std::string& name) {
  Module m;
  m.name = name;
  Builder b{m};
  const auto L = static_cast<std::int64_t>(n.length());
  const int cw = counter_width(L);
  b.port("clk", Dir::In, 1);
  b.port("reset", Dir::In, 1);
  for (std::size_t p = 0; p < n.patterns.inputs.size(); ++p) b.port("ready" + std::to_string(p), Dir::In, 1);
  b.port("running", Dir::Out, 1);
  b.port("phase", Dir::Out, cw);
  for (std::size_t p = 0; p < n.patterns.inputs.size(); ++p) b.port("cons_en" + std::to_string(p), Dir::Out, 1);
  for (std::size_t k = 0; k < n.patterns.outputs.size(); ++k) b.port("prod_en" + std::to_string(k), Dir::Out, 1);

  auto active = ref("active", 1);
  auto phase_q = ref("phase_q", cw);
  NetPtr all_ready = one();
  for (std::size_t p = 0; p < n.patterns.inputs.size(); ++p) all_ready = and_(all_ready, ref("ready" + std::to_string(p), 1));
  auto start = b.wire("start", and_(not_(active), all_ready));
  auto running = b.wire("running_w", or_(active, start));
  auto phase = b.wire("phase_w", mux(active, phase_q, lit(0, cw)));
  auto last = b.wire("last", is(phase, L - 1));
  b.reg("active", 1, and_(running, not_(last)));
  b.reg("phase_q", cw, bin(BinOp::Add, phase, lit(1, cw)), running);
  b.drive("running", running);
  b.drive("phase", phase);
  for (std::size_t p = 0; p < n.patterns.inputs.size(); ++p)
    b.drive("cons_en" + std::to_string(p), and_(running, nonzero_table(n.patterns.inputs[p], phase)));
  for (std::size_t k = 0; k < n.patterns.outputs.size(); ++k)
    b.drive("prod_en" + std::to_string(k), and_(running, nonzero_table(n.patterns.outputs[k], phase)));
  m.params["length"] = std::to_string(L);
  return m;
}

Module node_datapath(const NodeSpec& n, const DatapathPlan& plan, const std::string& name) {
  Module m;
  m.name = name;
  Builder b{m};
  const int W = n.width;
  const int cw = counter_width(static_cast<std::int64_t>(n.length()));
  b.port("clk", Dir::In, 1);
  b.port("reset", Dir::In, 1);
  b.port("running", Dir::In, 1);
  b.port("phase", Dir::In, cw);
  for (std::size_t p = 0; p < n.patterns.inputs.size(); ++p)
    b.port("in" + std::to_string(p), Dir::In, static_cast<int>(n.patterns.inputs[p].rate()) * W);
  for (std::size_t k = 0; k < n.patterns.outputs.size(); ++k)
    b.port("out" + std::to_string(k), Dir::Out, static_cast<int>(n.patterns.outputs[k].rate()) * W);
  auto running = ref("running", 1);
  auto phase = ref("phase", cw);

  // Current value of every input element: straight from the bus in its
  // arrival phase, from a holding register afterwards.
  std::vector<std::vector<NetPtr>> elem(n.patterns.inputs.size());
  for (std::size_t p = 0; p < n.patterns.inputs.size(); ++p) {
    const auto& cp = n.patterns.inputs[p];
    const auto cum = cumulative(cp);
    auto bus = ref("in" + std::to_string(p), static_cast<int>(cp.rate()) * W);
    for (std::int64_t x = 0; x < cp.total(); ++x) {
      const auto a = crossing(cum, x);
      const auto slot = x - (a ? cum[a - 1] : 0);
      auto direct = slice(bus, static_cast<int>(slot) * W, W);
      const auto nm = "e" + std::to_string(p) + "_" + std::to_string(x);
      if (plan.buffered[p][static_cast<std::size_t>(x)]) {
        auto held = b.reg("buf" + std::to_string(p) + "_" + std::to_string(x), W, direct,
                          and_(running, is(phase, static_cast<std::int64_t>(a))));
        elem[p].push_back(b.wire(nm, mux(is(phase, static_cast<std::int64_t>(a)), direct, held)));
      } else {
        elem[p].push_back(b.wire(nm, direct));
      }
    }
  }

  for (std::size_t k = 0; k < plan.outputs.size(); ++k) {
    const auto& o = plan.outputs[k];
    const auto& pp = n.patterns.outputs[k];
    const auto ks = std::to_string(k);
    const auto prod = cumulative(pp);
    std::vector<std::size_t> out_phases;
    for (std::size_t ph = 0; ph < pp.length(); ++ph)
      if (pp[ph] != 0) out_phases.push_back(ph);
    auto before = [&](const std::vector<std::int64_t>& cum, std::size_t ph) { return ph ? cum[ph - 1] : 0; };
    std::vector<NetPtr> tokens;  // one per output lane, token 0 first

    switch (o.style) {
      case OutputStyle::Elementwise: {
        for (std::size_t i = 0; i < o.lanes; ++i) {
          ScalarLowering lower{b, W, {}, {}};
          lower.operand = [&, i](std::size_t port) {
            std::vector<std::pair<std::size_t, NetPtr>> ch;
            for (auto ph : out_phases)
              ch.emplace_back(ph, elem[port][static_cast<std::size_t>(before(prod, ph)) + i]);
            return b.wire("o" + ks + "_l" + std::to_string(i) + "_in" + std::to_string(port), phase_select(phase, ch));
          };
          tokens.push_back(lower(o.lane));
        }
        break;
      }
      case OutputStyle::Fold: {
        std::vector<std::int64_t> avail(n.length(), static_cast<std::int64_t>(o.fold_length));
        for (auto q : o.lane_inputs) {
          const auto c = cumulative(n.patterns.inputs[q]);
          for (std::size_t ph = 0; ph < avail.size(); ++ph) avail[ph] = std::min(avail[ph], c[ph]);
        }
        struct Chunk { std::size_t phase; std::int64_t start, size; };
        std::vector<Chunk> chunks;
        for (std::size_t ph = 0; ph < avail.size(); ++ph) {
          const auto prev = ph ? avail[ph - 1] : 0;
          if (avail[ph] > prev) chunks.push_back({ph, prev, avail[ph] - prev});
        }
        const bool multi = chunks.size() > 1;
        std::vector<NetPtr> lanes;
        for (std::size_t i = 0; i < o.lanes; ++i) {
          ScalarLowering lower{b, W, {}, {}};
          lower.operand = [&, i](std::size_t port) {
            std::vector<std::pair<std::size_t, NetPtr>> ch;
            for (const auto& c : chunks)
              if (static_cast<std::int64_t>(i) < c.size)
                ch.emplace_back(c.phase, elem[port][static_cast<std::size_t>(c.start) + i]);
            return b.wire("o" + ks + "_l" + std::to_string(i) + "_in" + std::to_string(port), phase_select(phase, ch));
          };
          lanes.push_back(lower(o.lane));
        }
        auto combine = [&](NetPtr acc, NetPtr x) {
          ScalarLowering lower{b, W, {}, {}};
          lower.operand = [&](std::size_t slot) { return slot == 0 ? acc : x; };
          return lower(o.combine);
        };
        auto in_chunk_wider_than = [&](std::size_t i) {
          NetPtr r;
          bool all = true;
          for (const auto& c : chunks) {
            if (c.size > static_cast<std::int64_t>(i)) {
              auto t = is(phase, static_cast<std::int64_t>(c.phase));
              r = r ? or_(r, t) : t;
            } else {
              all = false;
            }
          }
          return all ? NetPtr{} : (r ? r : zero());
        };
        auto acc = ref("acc" + ks, W);
        const auto first_phase = static_cast<std::int64_t>(chunks.front().phase);
        NetPtr t;
        std::size_t i0 = 0;
        if (multi) {
          auto first = is(phase, first_phase);
          if (o.fold1) {
            t = b.wire("o" + ks + "_f0", mux(first, lanes[0], combine(acc, lanes[0])));
          } else {
            auto seed = b.wire("o" + ks + "_seed", mux(first, lit(o.init, W), acc));
            t = combine(seed, lanes[0]);
          }
          i0 = 1;
        } else if (o.fold1) {
          t = lanes[0];
          i0 = 1;
        } else {
          t = lit(o.init, W);
        }
        for (std::size_t i = i0; i < o.lanes; ++i) {
          auto c = combine(t, lanes[i]);
          auto valid = in_chunk_wider_than(i);
          t = valid ? b.wire("o" + ks + "_f" + std::to_string(i), mux(valid, c, t)) : c;
        }
        NetPtr result = t;
        if (o.accumulator) {
          NetPtr load;
          for (const auto& c : chunks) {
            auto x = is(phase, static_cast<std::int64_t>(c.phase));
            load = load ? or_(load, x) : x;
          }
          b.reg("acc" + ks, W, t, and_(running, load));
          const auto last_chunk = chunks.back().phase;
          std::vector<std::pair<std::size_t, NetPtr>> ch;
          for (auto ph : out_phases) ch.emplace_back(ph, ph == last_chunk ? t : acc);
          result = phase_select(phase, ch);
        }
        tokens.push_back(result);
        break;
      }
      case OutputStyle::Combinational: {
        ScalarLowering lower{b, W, {}, {}};
        lower.operand = [&](std::size_t slot) {
          auto port = static_cast<std::size_t>(
              std::upper_bound(plan.input_offsets.begin(), plan.input_offsets.end(), slot) - plan.input_offsets.begin() - 1);
          return elem[port][slot - plan.input_offsets[port]];
        };
        std::vector<NetPtr> values;
        for (const auto& u : o.unrolled) values.push_back(lower(u));
        for (std::int64_t j = 0; j < pp.rate(); ++j) {
          std::vector<std::pair<std::size_t, NetPtr>> ch;
          for (auto ph : out_phases) ch.emplace_back(ph, values[static_cast<std::size_t>(before(prod, ph) + j)]);
          tokens.push_back(phase_select(phase, ch));
        }
        break;
      }
    }
    std::reverse(tokens.begin(), tokens.end());
    b.drive("out" + ks, concat(tokens));
    m.params["out" + ks + "_style"] = std::string(to_string(o.style));
    m.params["out" + ks + "_lanes"] = std::to_string(o.lanes);
  }
  m.params["multipliers"] = std::to_string(plan.multipliers());
  m.params["width"] = std::to_string(W);
  return m;
}

Module fifo_controller(const EdgeSpec& e, std::int64_t capacity, int prod_cw, int cons_cw, const std::string& name) {
  Module m;
  m.name = name;
  Builder b{m};
  const auto fc = compute_fifo_thresholds(e.pp, e.cp);
  const auto limit = e.cp.total() - std::gcd(e.pp.total(), e.cp.total());
  const int cw = counter_width(std::max({capacity, e.cp.total(), limit}));
  b.port("clk", Dir::In, 1);
  b.port("reset", Dir::In, 1);
  b.port("prod_running", Dir::In, 1);
  b.port("prod_phase", Dir::In, prod_cw);
  b.port("cons_running", Dir::In, 1);
  b.port("cons_phase", Dir::In, cons_cw);
  b.port("ready", Dir::Out, 1);
  b.port("wr_en", Dir::Out, 1);
  b.port("rd_en", Dir::Out, 1);
  b.port("backlog_ok", Dir::Out, 1);
  auto prod_running = ref("prod_running", 1);
  auto count = ref("count", cw);
  auto thr = b.wire("threshold", mux(prod_running, table(fc.per_phase, ref("prod_phase", prod_cw), cw),
                                     lit(static_cast<std::uint64_t>(fc.idle), cw)));
  auto wr = b.wire("wr", and_(prod_running, nonzero_table(e.pp, ref("prod_phase", prod_cw))));
  auto rd = b.wire("rd", and_(ref("cons_running", 1), nonzero_table(e.cp, ref("cons_phase", cons_cw))));
  auto added = b.wire("added", bin(BinOp::Add, count, mux(wr, lit(static_cast<std::uint64_t>(e.pp.rate()), cw), lit(0, cw))));
  b.reg("count", cw, bin(BinOp::Sub, added, mux(rd, lit(static_cast<std::uint64_t>(e.cp.rate()), cw), lit(0, cw))));
  b.drive("ready", bin(BinOp::Ge, count, thr));
  b.drive("wr_en", wr);
  b.drive("rd_en", rd);
  b.drive("backlog_ok", bin(BinOp::Le, count, lit(static_cast<std::uint64_t>(std::max<std::int64_t>(limit, 0)), cw)));
  m.params["thresholds"] = fc.str();
  m.params["pp"] = e.pp.str();
  m.params["cp"] = e.cp.str();
  return m;
}

Module fifo_storage(const EdgeSpec& e, std::int64_t depth, int W, FifoFlavor flavor, const std::string& name) {
  Module m;
  m.name = name;
  Builder b{m};
  const auto nw = e.pp.rate();
  const auto nr = e.cp.rate();
  const int aw = counter_width(depth - 1);
  const int xw = counter_width(2 * depth);
  const int cw = counter_width(depth);
  b.port("clk", Dir::In, 1);
  b.port("reset", Dir::In, 1);
  b.port("wr_en", Dir::In, 1);
  b.port("wr_data", Dir::In, static_cast<int>(nw) * W);
  b.port("rd_en", Dir::In, 1);
  b.port("rd_data", Dir::Out, static_cast<int>(nr) * W);
  auto head = ref("head", aw);
  auto tail = ref("tail", aw);
  auto count = ref("count", cw);
  auto wr_data = ref("wr_data", static_cast<int>(nw) * W);

  // (base + off) mod depth, for base < depth and off <= depth.
  auto wrap = [&](const std::string& nm, NetPtr base, NetPtr off) {
    auto full = b.wire(nm + "_x", bin(BinOp::Add, resize(base, xw), resize(off, xw)));
    auto lim = lit(static_cast<std::uint64_t>(depth), xw);
    auto wrapped = b.wire(nm + "_w", mux(bin(BinOp::Ge, full, lim), bin(BinOp::Sub, full, lim), full));
    return b.wire(nm, slice(wrapped, 0, aw));
  };

  Memory mem{"mem", W, static_cast<int>(depth), flavor == FifoFlavor::RegisterFile ? "registers" : "block", {}};
  for (std::int64_t i = 0; i < nw; ++i)
    mem.writes.push_back({ref("wr_en", 1), wrap("wa" + std::to_string(i), tail, lit(static_cast<std::uint64_t>(i), xw)),
                          slice(wr_data, static_cast<int>(i) * W, W)});
  m.memories.push_back(std::move(mem));

  std::vector<NetPtr> reads;
  for (std::int64_t i = 0; i < nr; ++i) {
    auto addr = wrap("ra" + std::to_string(i), head, lit(static_cast<std::uint64_t>(i), xw));
    // Same-cycle bypass of tokens written this cycle.
    NetPtr bypass = lit(0, W);
    for (std::int64_t j = std::min(i, nw - 1); j >= 0; --j)
      bypass = mux(is(count, i - j), slice(wr_data, static_cast<int>(j) * W, W), bypass);
    reads.push_back(b.wire("r" + std::to_string(i),
                           mux(bin(BinOp::Ge, count, lit(static_cast<std::uint64_t>(std::min<std::int64_t>(i + 1, (1LL << cw) - 1)), cw)),
                               index("mem", W, addr), bypass)));
  }
  std::reverse(reads.begin(), reads.end());
  b.drive("rd_data", concat(reads));

  auto wr = ref("wr_en", 1);
  auto rd = ref("rd_en", 1);
  auto nwv = mux(wr, lit(static_cast<std::uint64_t>(nw), xw), lit(0, xw));
  auto nrv = mux(rd, lit(static_cast<std::uint64_t>(nr), xw), lit(0, xw));
  b.reg("head", aw, wrap("head_n", head, nrv));
  b.reg("tail", aw, wrap("tail_n", tail, nwv));
  auto cnt = b.wire("count_x", bin(BinOp::Sub, bin(BinOp::Add, resize(count, xw), nwv), nrv));
  b.reg("count", cw, slice(cnt, 0, cw));
  m.params["depth"] = std::to_string(depth);
  m.params["width"] = std::to_string(W);
  m.params["flavor"] = std::string(to_string(flavor));
  return m;
}

Module pipeline_register(const EdgeSpec& e, int W, const std::string& name) {
  Module m;
  m.name = name;
  Builder b{m};
  const int bw = static_cast<int>(e.pp.rate()) * W;
  b.port("clk", Dir::In, 1);
  b.port("reset", Dir::In, 1);
  b.port("d", Dir::In, bw);
  b.port("start", Dir::In, 1);
  b.port("q", Dir::Out, bw);
  b.port("loaded", Dir::Out, 1);
  b.drive("q", b.reg("data_q", bw, ref("d", bw)));
  b.drive("loaded", b.reg("loaded_q", 1, ref("start", 1)));
  m.params["tokens"] = std::to_string(e.pp.rate());
  m.params["width"] = std::to_string(W);
  return m;
}

}  // namespace

Design lower_graph(const Graph& g, const std::vector<std::int64_t>& capacities, const LoweringOptions& opts) {
  if (capacities.size() != g.edges.size())
    throw Error(ErrorCode::CapacityMissing, "expected one capacity per edge (" + std::to_string(g.edges.size()) +
                                                "), got " + std::to_string(capacities.size()));
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (g.edges[e].kind == EdgeKind::Fifo && capacities[e] <= 0)
      throw Error(ErrorCode::CapacityMissing, "FIFO " + g.edge_name(e) + " has no capacity");

  Design d;
  d.top = sanitize(g.name) + "_top";
  std::set<std::string> names;
  std::map<std::string, std::string> origin;
  auto add = [&](Module m, const std::string& from) {
    if (!names.insert(m.name).second)
      throw Error(ErrorCode::NameCollision, "module name '" + m.name + "' for " + from + " collides with " + origin[m.name]);
    origin[m.name] = from;
    d.modules.push_back(std::move(m));
  };

  std::vector<DatapathPlan> plans(g.nodes.size());
  std::set<std::string> node_ids;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    if (!node_ids.insert(sanitize(g.nodes[n].name)).second)
      throw Error(ErrorCode::NameCollision, "node '" + g.nodes[n].name + "' sanitizes to a name already in use");
    if (g.nodes[n].kind != NodeKind::Compute) continue;
    plans[n] = lower_hof_node(g.nodes[n]);
    const auto id = sanitize(g.nodes[n].name);
    add(node_datapath(g.nodes[n], plans[n], id + "_datapath"), "node '" + g.nodes[n].name + "'");
    add(node_controller(g.nodes[n], id + "_ctrl"), "node '" + g.nodes[n].name + "'");
  }
  auto phase_width = [&](std::size_t n) { return counter_width(static_cast<std::int64_t>(g.nodes[n].length())); };
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    const auto id = edge_identifier(g, e);
    const int W = g.nodes[ed.from.node].width;
    if (ed.kind == EdgeKind::Fifo) {
      add(fifo_storage(ed, capacities[e], W, fifo_flavor(capacities[e], opts), id + "_fifo"), "edge " + g.edge_name(e));
      add(fifo_controller(ed, capacities[e], phase_width(ed.from.node), phase_width(ed.to.node), id + "_fifo_ctrl"),
          "edge " + g.edge_name(e));
    } else if (ed.kind == EdgeKind::PipelineRegister) {
      add(pipeline_register(ed, W, id + "_preg"), "edge " + g.edge_name(e));
    }
  }

  // Top level wiring.
  Module top;
  top.name = d.top;
  Builder b{top};
  b.port("clk", Dir::In, 1);
  b.port("reset", Dir::In, 1);
  auto clk = ref("clk", 1);
  auto reset = ref("reset", 1);
  std::vector<NetPtr> running(g.nodes.size()), phase(g.nodes.size());
  std::vector<std::vector<NetPtr>> data(g.nodes.size()), prod_en(g.nodes.size());
  auto declare = [&](const std::string& name, int w) {
    top.wires.push_back({name, w, nullptr});
    return ref(name, w);
  };
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    const auto& node = g.nodes[n];
    const auto id = sanitize(node.name);
    const int W = node.width;
    if (node.kind == NodeKind::Source) {
      const auto& pp = node.patterns.outputs.at(0);
      const int bw = static_cast<int>(pp.rate()) * W;
      b.port(id + "_data", Dir::In, bw);
      b.port(id + "_running", Dir::In, 1);
      b.port(id + "_phase", Dir::In, phase_width(n));
      b.port(id + "_ready", Dir::Out, 1);
      running[n] = ref(id + "_running", 1);
      phase[n] = ref(id + "_phase", phase_width(n));
      data[n] = {ref(id + "_data", bw)};
      prod_en[n] = {and_(running[n], nonzero_table(pp, phase[n]))};
    } else if (node.kind == NodeKind::Compute) {
      running[n] = declare(id + "_running", 1);
      phase[n] = declare(id + "_phase", phase_width(n));
      for (std::size_t k = 0; k < node.patterns.outputs.size(); ++k) {
        data[n].push_back(declare(id + "_out" + std::to_string(k), static_cast<int>(node.patterns.outputs[k].rate()) * W));
        prod_en[n].push_back(declare(id + "_prod_en" + std::to_string(k), 1));
      }
    }
  }
  std::vector<NetPtr> edge_ready(g.edges.size()), edge_data(g.edges.size()), backlog_ok(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    const auto id = edge_identifier(g, e);
    const int W = g.nodes[ed.from.node].width;
    const auto p = ed.from.node;
    const auto c = ed.to.node;
    if (ed.kind == EdgeKind::Fifo) {
      auto wr = declare(id + "_wr_en", 1);
      auto rd = declare(id + "_rd_en", 1);
      edge_ready[e] = declare(id + "_ready", 1);
      backlog_ok[e] = declare(id + "_backlog_ok", 1);
      edge_data[e] = declare(id + "_rd_data", static_cast<int>(ed.cp.rate()) * W);
      top.instances.push_back({id + "_fifo_ctrl", "u_" + id + "_fifo_ctrl",
                               {{"clk", clk}, {"reset", reset}, {"prod_running", running[p]}, {"prod_phase", phase[p]},
                                {"cons_running", running[c]}, {"cons_phase", phase[c]}, {"ready", edge_ready[e]},
                                {"wr_en", wr}, {"rd_en", rd}, {"backlog_ok", backlog_ok[e]}}});
      top.instances.push_back({id + "_fifo", "u_" + id + "_fifo",
                               {{"clk", clk}, {"reset", reset}, {"wr_en", wr}, {"wr_data", data[p][ed.from.port]},
                                {"rd_en", rd}, {"rd_data", edge_data[e]}}});
    } else if (ed.kind == EdgeKind::PipelineRegister) {
      edge_ready[e] = declare(id + "_loaded", 1);
      edge_data[e] = declare(id + "_q", static_cast<int>(ed.cp.rate()) * W);
      top.instances.push_back({id + "_preg", "u_" + id + "_preg",
                               {{"clk", clk}, {"reset", reset}, {"d", data[p][ed.from.port]},
                                {"start", and_(running[p], is(phase[p], 0))}, {"q", edge_data[e]},
                                {"loaded", edge_ready[e]}}});
    } else {
      const auto sid = sanitize(g.nodes[c].name);
      b.port(sid + "_data", Dir::Out, data[p][ed.from.port]->width);
      b.port(sid + "_valid", Dir::Out, 1);
      b.drive(sid + "_data", data[p][ed.from.port]);
      b.drive(sid + "_valid", prod_en[p][ed.from.port]);
    }
  }
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    const auto& node = g.nodes[n];
    const auto id = sanitize(node.name);
    if (node.kind == NodeKind::Source) {
      NetPtr ok = one();
      for (auto e : g.out_edges(n))
        if (backlog_ok[e]) ok = and_(ok, backlog_ok[e]);
      b.drive(id + "_ready", ok);
      continue;
    }
    if (node.kind != NodeKind::Compute) continue;
    Instance ctrl{id + "_ctrl", "u_" + id + "_ctrl", {{"clk", clk}, {"reset", reset}}};
    Instance dp{id + "_datapath", "u_" + id + "_datapath",
                {{"clk", clk}, {"reset", reset}, {"running", running[n]}, {"phase", phase[n]}}};
    for (std::size_t p = 0; p < node.patterns.inputs.size(); ++p) {
      const auto e = g.input_edge(n, p);
      if (!e) throw Error(ErrorCode::InvalidGraph, "'" + node.name + "' input " + std::to_string(p) + " is unconnected");
      ctrl.connections.emplace_back("ready" + std::to_string(p), edge_ready[*e]);
      dp.connections.emplace_back("in" + std::to_string(p), edge_data[*e]);
    }
    ctrl.connections.emplace_back("running", running[n]);
    ctrl.connections.emplace_back("phase", phase[n]);
    for (std::size_t p = 0; p < node.patterns.inputs.size(); ++p)
      ctrl.connections.emplace_back("cons_en" + std::to_string(p), declare(id + "_cons_en" + std::to_string(p), 1));
    for (std::size_t k = 0; k < node.patterns.outputs.size(); ++k) {
      ctrl.connections.emplace_back("prod_en" + std::to_string(k), prod_en[n][k]);
      dp.connections.emplace_back("out" + std::to_string(k), data[n][k]);
    }
    top.instances.push_back(std::move(ctrl));
    top.instances.push_back(std::move(dp));
  }
  top.params["graph"] = g.name;
  add(std::move(top), "top level");

  if (auto problems = validate(d); !problems.empty())
    throw Error(ErrorCode::InvalidGraph, "internal netlist check failed: " + problems.front());
  return d;
}

nlohmann::json design_manifest(const Design& d) {
  nlohmann::json j;
  j["top"] = d.top;
  auto mods = nlohmann::json::array();
  for (const auto& m : d.modules) {
    nlohmann::json mj;
    mj["name"] = m.name;
    mj["file"] = m.name + ".v";
    auto ports = nlohmann::json::array();
    for (const auto& p : m.ports)
      ports.push_back({{"name", p.name}, {"dir", p.dir == Dir::In ? "input" : "output"}, {"width", p.width}});
    mj["ports"] = ports;
    mj["params"] = m.params;
    mods.push_back(mj);
  }
  j["modules"] = mods;
  return j;
}

}  // namespace sdfap

#include "sdfap/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "sdfap/error.hpp"

namespace sdfap {

FiringThresholds edge_thresholds(const EdgeSpec& e, std::int64_t delta) {
  auto fc = compute_fifo_thresholds(e.pp, e.cp);
  for (auto& v : fc.per_phase) v = std::max<std::int64_t>(0, v + delta);
  fc.idle = std::max<std::int64_t>(0, fc.idle + delta);
  return fc;
}

std::int64_t source_backlog_limit(const EdgeSpec& e) {
  return e.cp.total() - std::gcd(e.pp.total(), e.cp.total());
}

namespace {

struct NodeState {
  std::int64_t start = -1;  // start of the current firing, -1 when idle
  std::int64_t started = 0;
  std::int64_t total = 0;
};

std::int64_t default_horizon(const Graph& g, const RepetitionVector& r, int iterations) {
  std::int64_t sum = 0;
  for (std::size_t n = 0; n < g.nodes.size(); ++n)
    if (g.nodes[n].kind != NodeKind::Sink) sum += r[n] * static_cast<std::int64_t>(g.nodes[n].length());
  return std::max<std::int64_t>(16, static_cast<std::int64_t>(iterations) * sum * 4);
}

}  // namespace

Schedule simulate_schedule(const Graph& g, int iterations, const ScheduleOptions& opts) {
  if (iterations < 1) throw Error(ErrorCode::InvalidGraph, "iterations must be at least 1");
  auto order = g.topological_order();
  if (!order) throw Error(ErrorCode::InvalidGraph, "graph has a cycle");

  Schedule s;
  s.iterations = iterations;
  s.repetitions = compute_repetition_vector(g);
  const auto horizon = opts.horizon.value_or(default_horizon(g, s.repetitions, iterations));
  const auto nn = g.nodes.size();
  const auto ne = g.edges.size();
  s.firing_starts.resize(nn);
  s.sink_arrivals.resize(nn);
  s.occupancy.resize(ne);
  s.produced.resize(ne);
  s.consumed.resize(ne);

  std::vector<NodeState> st(nn);
  for (std::size_t n = 0; n < nn; ++n)
    if (g.nodes[n].kind != NodeKind::Sink) st[n].total = s.repetitions[n] * iterations;

  std::vector<FiringThresholds> fc(ne);
  for (std::size_t e = 0; e < ne; ++e)
    if (g.edges[e].kind == EdgeKind::Fifo) fc[e] = edge_thresholds(g.edges[e], opts.threshold_delta);

  std::vector<std::vector<std::size_t>> ins(nn), outs(nn);
  for (std::size_t n = 0; n < nn; ++n) {
    ins[n] = g.in_edges(n);
    outs[n] = g.out_edges(n);
  }

  std::vector<std::int64_t> occ(ne, 0);
  std::vector<bool> pipe_loaded(ne, false);

  auto active_phase = [&](std::size_t n, std::int64_t t) -> std::optional<std::size_t> {
    if (st[n].start < 0) return std::nullopt;
    const auto k = t - st[n].start;
    if (k < 0 || k >= static_cast<std::int64_t>(g.nodes[n].length())) return std::nullopt;
    return static_cast<std::size_t>(k);
  };

  auto finished = [&](std::int64_t t) {
    for (std::size_t n = 0; n < nn; ++n)
      if (st[n].started < st[n].total || active_phase(n, t)) return false;
    return true;
  };

  std::int64_t t = 0;
  for (; !finished(t); ++t) {
    if (t >= horizon) {
      std::ostringstream os;
      os << "schedule incomplete after " << horizon << " cycles";
      throw Error(ErrorCode::HorizonExceeded, os.str());
    }
    std::vector<bool> started_now(nn, false);
    for (auto n : *order) {
      const auto& node = g.nodes[n];
      if (node.kind == NodeKind::Sink) continue;
      auto& ns = st[n];
      if (ns.start >= 0 && !active_phase(n, t)) ns.start = -1;
      bool fires = false;
      if (ns.start < 0 && ns.started < ns.total) {
        fires = true;
        for (auto e : ins[n]) {
          const auto& ed = g.edges[e];
          if (ed.kind == EdgeKind::PipelineRegister) {
            fires = fires && pipe_loaded[e];
          } else {
            const auto ph = active_phase(ed.from.node, t);
            fires = fires && occ[e] >= (ph ? fc[e].at(*ph) : fc[e].idle);
          }
        }
        if (node.kind == NodeKind::Source)
          for (auto e : outs[n])
            if (g.edges[e].kind == EdgeKind::Fifo) fires = fires && occ[e] <= source_backlog_limit(g.edges[e]);
      }
      if (fires) {
        ns.start = t;
        ++ns.started;
        s.firing_starts[n].push_back(t);
        started_now[n] = true;
      } else {
        for (auto e : ins[n])
          if (g.edges[e].kind == EdgeKind::PipelineRegister && pipe_loaded[e])
            throw Error(ErrorCode::PipelineHazard, "'" + node.name + "' cannot fire when pipeline register " +
                                                       g.edge_name(e) + " delivers its data");
      }
    }

    bool any_active = false;
    for (std::size_t n = 0; n < nn; ++n) any_active = any_active || active_phase(n, t).has_value();
    if (!any_active) {
      std::ostringstream os;
      os << "no node can fire at cycle " << t << " and the graph has not completed";
      throw Error(ErrorCode::Deadlock, os.str());
    }

    for (std::size_t e = 0; e < ne; ++e) {
      const auto& ed = g.edges[e];
      const auto pph = active_phase(ed.from.node, t);
      const std::int64_t prod = pph ? ed.pp[*pph] : 0;
      std::int64_t cons = 0;
      if (ed.kind == EdgeKind::SinkWire) {
        cons = prod;
        for (std::int64_t k = 0; k < prod; ++k) s.sink_arrivals[ed.to.node].push_back(t);
      } else if (const auto cph = active_phase(ed.to.node, t)) {
        cons = ed.cp[*cph];
      }
      s.occupancy[e].push_back(occ[e]);
      s.produced[e].push_back(prod);
      s.consumed[e].push_back(cons);
      if (ed.kind == EdgeKind::Fifo && occ[e] + prod - cons < 0) ++s.underflows;
      if (ed.kind == EdgeKind::PipelineRegister) {
        if (occ[e] < cons) ++s.underflows;
        occ[e] = prod;
      } else if (ed.kind == EdgeKind::Fifo) {
        occ[e] = std::max<std::int64_t>(0, occ[e] + prod - cons);
      }
      pipe_loaded[e] = ed.kind == EdgeKind::PipelineRegister && started_now[ed.from.node];
    }
  }
  s.horizon = t;
  return s;
}

std::vector<std::int64_t> size_fifos(const Schedule& s, const Graph& g) {
  std::vector<std::int64_t> cap(g.edges.size(), 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    switch (g.edges[e].kind) {
      case EdgeKind::Fifo:
        for (std::size_t t = 0; t < s.occupancy[e].size(); ++t)
          cap[e] = std::max(cap[e], s.occupancy[e][t] + s.produced[e][t]);
        break;
      case EdgeKind::PipelineRegister:
        for (auto p : s.produced[e]) cap[e] = std::max(cap[e], p);
        break;
      case EdgeKind::SinkWire: break;
    }
  }
  return cap;
}

TimingReport timing_report(const Schedule& s, const Graph& g) {
  TimingReport r;
  r.makespan = s.horizon;
  r.fifo_capacities = size_fifos(s, g);

  std::int64_t first = s.horizon;
  for (const auto& fs : s.firing_starts)
    if (!fs.empty()) first = std::min(first, fs.front());
  if (first == s.horizon) return r;  // nothing fired

  r.iteration_completion.assign(static_cast<std::size_t>(s.iterations), 0);
  bool has_sink = false;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    if (g.nodes[n].kind != NodeKind::Sink || g.nodes[n].patterns.inputs.empty()) continue;
    const auto per_iter = s.repetitions[n] * g.nodes[n].patterns.inputs[0].total();
    const auto& arr = s.sink_arrivals[n];
    has_sink = has_sink || per_iter > 0;
    for (int m = 0; m < s.iterations; ++m) {
      const auto idx = static_cast<std::size_t>((m + 1) * per_iter - 1);
      if (idx < arr.size()) r.iteration_completion[m] = std::max(r.iteration_completion[m], arr[idx]);
    }
  }
  if (!has_sink) {
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
      if (g.nodes[n].kind == NodeKind::Sink) continue;
      const auto L = static_cast<std::int64_t>(g.nodes[n].length());
      for (int m = 0; m < s.iterations; ++m) {
        const auto idx = static_cast<std::size_t>((m + 1) * s.repetitions[n] - 1);
        if (idx < s.firing_starts[n].size())
          r.iteration_completion[m] = std::max(r.iteration_completion[m], s.firing_starts[n][idx] + L - 1);
      }
    }
  }
  r.latency_cycles = r.iteration_completion.front() - first + 1;
  if (s.iterations >= 2 && r.iteration_completion.back() > r.iteration_completion.front())
    r.throughput = static_cast<double>(s.iterations - 1) /
                   static_cast<double>(r.iteration_completion.back() - r.iteration_completion.front());
  else
    r.throughput = 1.0 / static_cast<double>(r.latency_cycles);
  return r;
}

std::string render_gantt(const Schedule& s, const Graph& g) {
  std::size_t name_w = 4;
  for (const auto& n : g.nodes) name_w = std::max(name_w, n.name.size());
  std::ostringstream os;
  os << std::string(name_w, ' ') << " |";
  for (std::int64_t t = 0; t < s.horizon; ++t) os << (t % 10);
  os << "|\n";
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    if (g.nodes[n].kind == NodeKind::Sink) continue;
    std::string row(static_cast<std::size_t>(s.horizon), '.');
    const auto L = static_cast<std::int64_t>(g.nodes[n].length());
    for (auto st : s.firing_starts[n])
      for (std::int64_t k = 0; k < L && st + k < s.horizon; ++k) row[static_cast<std::size_t>(st + k)] = '#';
    os << g.nodes[n].name << std::string(name_w - g.nodes[n].name.size(), ' ') << " |" << row << "|\n";
  }
  return os.str();
}

}  // namespace sdfap

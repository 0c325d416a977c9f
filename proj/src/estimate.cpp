#include "sdfap/estimate.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "sdfap/error.hpp"

namespace sdfap {

ResourceReport estimate_resources(const Graph& g, const std::vector<std::int64_t>& capacities,
                                  const LoweringOptions& opts) {
  if (capacities.size() != g.edges.size())
    throw Error(ErrorCode::CapacityMissing, "expected one capacity per edge");
  ResourceReport r;
  r.graph = g.name;
  for (const auto& n : g.nodes) {
    if (n.kind != NodeKind::Compute) continue;
    const auto plan = lower_hof_node(n);
    NodeResources nr;
    nr.name = n.name;
    nr.dsp = static_cast<std::int64_t>(plan.multipliers());
    nr.accumulator_bits = static_cast<std::int64_t>(plan.accumulators()) * n.width;
    nr.buffer_bits = static_cast<std::int64_t>(plan.buffer_elements()) * n.width;
    nr.phase_counter_bits = counter_width(static_cast<std::int64_t>(n.length()));
    nr.register_bits = nr.accumulator_bits + nr.buffer_bits + nr.phase_counter_bits;
    for (const auto& o : plan.outputs) nr.operators += static_cast<std::int64_t>(o.operators);
    r.dsp_count += nr.dsp;
    r.register_bits += nr.register_bits;
    r.controller_bits += nr.phase_counter_bits;
    ++r.controller_count;
    r.nodes.push_back(nr);
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    const std::int64_t W = g.nodes[ed.from.node].width;
    EdgeResources er;
    er.name = g.edge_name(e);
    er.kind = ed.kind;
    er.capacity = capacities[e];
    switch (ed.kind) {
      case EdgeKind::Fifo: {
        const auto flavor = fifo_flavor(capacities[e], opts);
        er.storage = std::string(to_string(flavor));
        (flavor == FifoFlavor::RegisterFile ? er.register_bits : er.memory_bits) = capacities[e] * W;
        const auto limit = ed.cp.total() - std::gcd(ed.pp.total(), ed.cp.total());
        er.controller_bits = counter_width(std::max({capacities[e], ed.cp.total(), limit}));
        ++r.controller_count;
        break;
      }
      case EdgeKind::PipelineRegister:
        er.storage = "pipeline_register";
        er.register_bits = ed.pp.rate() * W;
        break;
      case EdgeKind::SinkWire: er.storage = "none"; break;
    }
    r.register_bits += er.register_bits;
    r.memory_bits += er.memory_bits;
    r.controller_bits += er.controller_bits;
    r.edges.push_back(er);
  }
  return r;
}

nlohmann::json report_to_json(const ResourceReport& r) {
  nlohmann::json j;
  j["graph"] = r.graph;
  j["dsp_count"] = r.dsp_count;
  j["register_bits"] = r.register_bits;
  j["memory_bits"] = r.memory_bits;
  j["controller_count"] = r.controller_count;
  j["controller_bits"] = r.controller_bits;
  j["luts"] = "not modeled";
  j["fmax"] = "not modeled";
  auto nodes = nlohmann::json::array();
  for (const auto& n : r.nodes)
    nodes.push_back({{"name", n.name},
                     {"dsp", n.dsp},
                     {"operators", n.operators},
                     {"accumulator_bits", n.accumulator_bits},
                     {"buffer_bits", n.buffer_bits},
                     {"phase_counter_bits", n.phase_counter_bits},
                     {"register_bits", n.register_bits}});
  j["nodes"] = nodes;
  auto edges = nlohmann::json::array();
  for (const auto& e : r.edges)
    edges.push_back({{"name", e.name},
                     {"kind", std::string(to_string(e.kind))},
                     {"storage", e.storage},
                     {"capacity", e.capacity},
                     {"register_bits", e.register_bits},
                     {"memory_bits", e.memory_bits},
                     {"controller_bits", e.controller_bits}});
  j["edges"] = edges;
  return j;
}

std::string render_report_table(const std::vector<ResourceReport>& reports) {
  std::vector<std::string> labels = {"", "DSPs", "Registers (bits)", "Memory bits", "Controllers", "Controller bits",
                                     "LUTs", "FMAX"};
  std::vector<std::vector<std::string>> cols;
  for (const auto& r : reports)
    cols.push_back({r.graph, std::to_string(r.dsp_count), std::to_string(r.register_bits),
                    std::to_string(r.memory_bits), std::to_string(r.controller_count),
                    std::to_string(r.controller_bits), "not modeled", "not modeled"});
  std::size_t lw = 0;
  for (const auto& l : labels) lw = std::max(lw, l.size());
  std::vector<std::size_t> cw;
  for (const auto& c : cols) {
    std::size_t w = 0;
    for (const auto& s : c) w = std::max(w, s.size());
    cw.push_back(w);
  }
  std::ostringstream os;
  for (std::size_t row = 0; row < labels.size(); ++row) {
    os << std::left << std::setw(static_cast<int>(lw)) << labels[row];
    for (std::size_t c = 0; c < cols.size(); ++c) os << "  " << std::right << std::setw(static_cast<int>(cw[c])) << cols[c][row];
    os << "\n";
  }
  return os.str();
}

}  // namespace sdfap

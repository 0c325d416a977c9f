#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdfap/codegen.hpp"
#include "sdfap/graph.hpp"

namespace sdfap {

struct NodeResources {
  std::string name;
  std::int64_t dsp = 0;
  std::int64_t accumulator_bits = 0;
  std::int64_t buffer_bits = 0;         // input elements held across phases
  std::int64_t phase_counter_bits = 0;
  std::int64_t register_bits = 0;       // sum of the three above
  std::int64_t operators = 0;           // all arithmetic operator instances
};

struct EdgeResources {
  std::string name;
  EdgeKind kind = EdgeKind::Fifo;
  std::string storage;  // "register_file", "memory_array", "pipeline_register", "none"
  std::int64_t capacity = 0;
  std::int64_t register_bits = 0;
  std::int64_t memory_bits = 0;
  std::int64_t controller_bits = 0;  // occupancy counter
};

struct ResourceReport {
  std::string graph;
  std::int64_t dsp_count = 0;
  std::int64_t register_bits = 0;
  std::int64_t memory_bits = 0;
  std::int64_t controller_count = 0;  // node controllers + FIFO controllers
  std::int64_t controller_bits = 0;   // phase counters + occupancy counters
  std::vector<NodeResources> nodes;
  std::vector<EdgeResources> edges;
};

// One DSP per multiplier instance. LUTs, ALMs and FMAX are not modeled.
ResourceReport estimate_resources(const Graph& g, const std::vector<std::int64_t>& capacities,
                                  const LoweringOptions& opts = {});

nlohmann::json report_to_json(const ResourceReport& r);
// Aligned columns, one per report.
std::string render_report_table(const std::vector<ResourceReport>& reports);

}  // namespace sdfap

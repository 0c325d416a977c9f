#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdfap/graph.hpp"
#include "sdfap/rtl.hpp"

namespace sdfap {

enum class FifoFlavor { RegisterFile, MemoryArray };

std::string_view to_string(FifoFlavor f);

struct LoweringOptions {
  // FIFOs holding at most this many tokens are built from registers.
  std::int64_t register_file_limit = 16;
};

FifoFlavor fifo_flavor(std::int64_t capacity, const LoweringOptions& opts = {});

// Bits of a counter that must hold 0..max_value.
int counter_width(std::int64_t max_value);

// Identifier-safe form: [A-Za-z0-9_], never starting with a digit.
std::string sanitize(std::string_view name);
// "p_0_to_c_0"
std::string edge_identifier(const Graph& g, std::size_t e);

// Capacities are per edge (size_fifos); FIFO edges need a positive entry.
// Throws CapacityMissing, NameCollision, UnsupportedExpr.
rtl::Design lower_graph(const Graph& g, const std::vector<std::int64_t>& capacities,
                        const LoweringOptions& opts = {});

// Module names, files, ports and descriptive parameters.
nlohmann::json design_manifest(const rtl::Design& d);

}  // namespace sdfap

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdfap/expr.hpp"
#include "sdfap/pattern.hpp"

namespace sdfap {

enum class NodeKind { Source, Sink, Compute };

std::string_view to_string(NodeKind k);

struct NodeSpec {
  std::string name;
  NodeKind kind = NodeKind::Compute;
  ExprPtr body;  // Compute only
  PatternSet patterns;
  int width = 8;

  std::size_t length() const { return patterns.length(); }
};

struct PortRef {
  std::size_t node = 0;
  std::size_t port = 0;
  friend bool operator==(const PortRef&, const PortRef&) = default;
};

// How an edge is realised in hardware.
enum class EdgeKind {
  Fifo,              // FIFO + controller with a threshold table
  PipelineRegister,  // compute -> compute with pp == cp
  SinkWire,          // into a sink; not synthesised
};

std::string_view to_string(EdgeKind k);

struct EdgeSpec {
  PortRef from;
  PortRef to;
  AccessPattern pp;
  AccessPattern cp;
  EdgeKind kind = EdgeKind::Fifo;
};

struct Graph {
  std::string name;
  int iterations = 1;
  std::vector<NodeSpec> nodes;
  std::vector<EdgeSpec> edges;

  std::optional<std::size_t> find(std::string_view node_name) const;
  // "p.0->c.0"
  std::string edge_name(std::size_t e) const;
  std::optional<std::size_t> find_edge(std::string_view name) const;
  std::vector<std::size_t> in_edges(std::size_t node) const;
  std::vector<std::size_t> out_edges(std::size_t node) const;
  // Edge feeding the given input port, if connected.
  std::optional<std::size_t> input_edge(std::size_t node, std::size_t port) const;
  // Kahn order; nullopt if the graph has a cycle.
  std::optional<std::vector<std::size_t>> topological_order() const;
  std::size_t compute_count() const;
};

// Raw document shape, decoupled from any serialization format.
struct NodeDocument {
  std::string name;
  std::string kind;
  int width = 8;
  std::string expr;
  std::vector<std::vector<std::int64_t>> inputs;
  std::vector<std::vector<std::int64_t>> outputs;
};

struct EdgeDocument {
  std::string from;  // "node.port"
  std::string to;
};

struct GraphDocument {
  std::string name = "graph";
  int iterations = 1;
  std::vector<NodeDocument> nodes;
  std::vector<EdgeDocument> edges;
};

// Links names, validates every pattern and parses bodies. Throws Error with
// UnknownNode, DuplicatePort, DanglingEdge, ParseError or a pattern error.
Graph build_graph(const GraphDocument& doc);

struct Diagnostic {
  std::string code;  // e.g. "PatternLengthMismatch"
  std::string subject;
  std::string message;
};

// Runs every static check and collects all findings; empty means valid.
std::vector<Diagnostic> validate_graph(const Graph& g);

// Per-node firing counts per graph iteration. Throws InconsistentRates.
using RepetitionVector = std::vector<std::int64_t>;
RepetitionVector compute_repetition_vector(const Graph& g);

enum class OutputStyle { Elementwise, Fold, Combinational };

std::string_view to_string(OutputStyle s);

// Lowered structure of one output port of a compute node.
struct OutputPlan {
  OutputStyle style = OutputStyle::Combinational;
  std::size_t lanes = 0;  // parallel element lanes

  // Elementwise: value of one output element. Fold: value of one folded
  // element. Operand slot k is element i of input port k.
  ScalarPtr lane;
  std::vector<std::size_t> lane_inputs;

  // Fold only. Slot 0 is the running value, slot 1 the next element.
  ScalarPtr combine;
  bool fold1 = false;
  std::uint64_t init = 0;
  std::size_t fold_length = 0;
  std::size_t combiners = 0;
  bool accumulator = false;

  // Combinational only: one DAG per output token; operand slot is the flat
  // input index (port offsets in DatapathPlan::input_offsets).
  std::vector<ScalarPtr> unrolled;

  std::size_t multipliers = 0;
  std::size_t operators = 0;
};

struct DatapathPlan {
  std::string node;
  int width = 8;
  std::vector<OutputPlan> outputs;
  std::vector<std::size_t> input_offsets;  // flat index of port k's first token
  // buffered[p][e]: element e of port p must be held past its arrival phase.
  std::vector<std::vector<bool>> buffered;

  std::size_t multipliers() const;
  std::size_t accumulators() const;
  std::size_t buffer_elements() const;
};

// Throws Error{UnsupportedExpr} for bodies outside the supported core.
DatapathPlan lower_hof_node(const NodeSpec& n);

}  // namespace sdfap

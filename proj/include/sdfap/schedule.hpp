#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdfap/graph.hpp"

namespace sdfap {

struct ScheduleOptions {
  std::optional<std::int64_t> horizon;
  // Added to every FIFO threshold entry, clamped at 0. Fault injection only.
  std::int64_t threshold_delta = 0;
};

// Self-timed execution under strict pattern matching. Cycle-indexed traces
// have one entry per simulated cycle.
struct Schedule {
  int iterations = 1;
  std::int64_t horizon = 0;  // cycles simulated
  RepetitionVector repetitions;
  std::vector<std::vector<std::int64_t>> firing_starts;  // per node, ascending
  std::vector<std::vector<std::int64_t>> occupancy;      // per edge, at the start of each cycle
  std::vector<std::vector<std::int64_t>> produced;       // per edge, tokens written in each cycle
  std::vector<std::vector<std::int64_t>> consumed;       // per edge, tokens read in each cycle
  std::vector<std::vector<std::int64_t>> sink_arrivals;  // per node (sinks only), cycle of each token
  std::int64_t underflows = 0;  // reads beyond available tokens; 0 unless thresholds are corrupted
};

// Throws Error{Deadlock | HorizonExceeded | PipelineHazard}.
Schedule simulate_schedule(const Graph& g, int iterations, const ScheduleOptions& opts = {});

// Effective threshold table of a FIFO edge after fault injection.
FiringThresholds edge_thresholds(const EdgeSpec& e, std::int64_t delta = 0);

// Largest occupancy a source may leave on an outgoing FIFO and still fire.
std::int64_t source_backlog_limit(const EdgeSpec& e);

struct TimingReport {
  std::int64_t latency_cycles = 0;
  double throughput = 0.0;  // graph iterations per cycle
  std::vector<std::int64_t> fifo_capacities;  // per edge; 0 for sink wires
  std::int64_t makespan = 0;
  std::vector<std::int64_t> iteration_completion;  // cycle each iteration finished
};

TimingReport timing_report(const Schedule& s, const Graph& g);

// Storage each edge needs: for FIFOs the peak of tokens held plus tokens
// written in the same cycle; for pipeline registers the widest write.
std::vector<std::int64_t> size_fifos(const Schedule& s, const Graph& g);

// One row per firing node, one column per cycle, '#' while active.
std::string render_gantt(const Schedule& s, const Graph& g);

}  // namespace sdfap

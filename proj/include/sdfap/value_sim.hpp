#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdfap/graph.hpp"

namespace sdfap {

using Token = std::uint64_t;

// Per source, one token vector per firing.
struct Stimulus {
  std::map<std::string, std::vector<std::vector<Token>>> firings;
};

struct SinkToken {
  Token value = 0;
  std::int64_t cycle = 0;
  friend bool operator==(const SinkToken&, const SinkToken&) = default;
};

struct SimResult {
  std::map<std::string, std::vector<SinkToken>> sinks;
  std::int64_t cycles = 0;
  std::vector<std::vector<std::int64_t>> firing_starts;  // per node
  std::int64_t underflows = 0;  // FIFO reads with no data (read as 0)
};

// Fold state after one phase of one firing.
struct AccumulatorSample {
  std::size_t node = 0;
  std::size_t output = 0;
  std::size_t firing = 0;
  std::size_t phase = 0;
  std::size_t folded = 0;  // elements folded so far
  Token value = 0;
};

struct ClockedOptions {
  // Per edge; a FIFO holding more tokens raises FifoOverflow.
  std::optional<std::vector<std::int64_t>> capacities;
  std::int64_t threshold_delta = 0;
  std::optional<std::int64_t> horizon;
  std::function<void(const AccumulatorSample&)> on_accumulator;
};

// Graph iterations covered by the stimulus. Throws ShapeMismatch.
int stimulus_iterations(const Graph& g, const Stimulus& s);

// Pure evaluation, no timing. Sink name -> tokens in order.
std::map<std::string, std::vector<Token>> eval_combinational(const Graph& g, const Stimulus& s);

// Cycle-level model of controllers, FIFOs, pipeline registers and datapaths.
// Throws Deadlock, HorizonExceeded, PipelineHazard, FifoOverflow, ShapeMismatch.
SimResult simulate_clocked(const Graph& g, const Stimulus& s, const ClockedOptions& opts = {});

Stimulus random_stimulus(const Graph& g, int iterations, std::uint64_t seed);

struct EquivalenceOptions {
  int iterations = 1;
  std::int64_t threshold_delta = 0;
  std::size_t max_counterexamples = 5;
};

struct Counterexample {
  std::size_t trial = 0;
  Stimulus stimulus;
  std::map<std::string, std::vector<Token>> expected;
  std::map<std::string, std::vector<Token>> actual;
  std::string error;  // set when the clocked run aborted
};

struct EquivalenceReport {
  std::size_t trials = 0;
  std::size_t mismatches = 0;
  std::vector<Counterexample> counterexamples;
};

// Trial i draws its stimulus from a generator seeded with (seed, i).
EquivalenceReport equivalence_check(const Graph& g, std::size_t trials, std::uint64_t seed,
                                    const EquivalenceOptions& opts = {});

}  // namespace sdfap

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sdfap {

// Per-cycle token counts for one port over one firing. Entries are either 0
// or a single shared positive value.
class AccessPattern {
 public:
  // Throws Error{EmptyPattern | MixedNonZeroValues | AllZero}.
  static AccessPattern from(std::span<const std::int64_t> phases);
  static AccessPattern from(std::initializer_list<std::int64_t> phases);
  static AccessPattern uniform(std::int64_t value, std::size_t length);

  std::size_t length() const noexcept { return phases_.size(); }
  std::int64_t operator[](std::size_t i) const { return phases_[i]; }
  const std::vector<std::int64_t>& phases() const noexcept { return phases_; }

  // The shared non-zero value.
  std::int64_t rate() const noexcept { return rate_; }
  std::int64_t total() const noexcept { return total_; }
  std::size_t nonzero_phases() const noexcept;
  std::size_t last_nonzero_phase() const noexcept;

  std::string str() const;

  friend bool operator==(const AccessPattern& a, const AccessPattern& b) {
    return a.phases_ == b.phases_;
  }

 private:
  explicit AccessPattern(std::vector<std::int64_t> phases);

  std::vector<std::int64_t> phases_;
  std::int64_t rate_ = 0;
  std::int64_t total_ = 0;
};

// Same as AccessPattern::from.
AccessPattern validate_pattern(std::span<const std::int64_t> phases);

// Minimum FIFO occupancy before a consumer may fire, indexed by the
// producer's current phase; `idle` applies while the producer is not firing.
struct FiringThresholds {
  std::vector<std::int64_t> per_phase;
  std::int64_t idle = 0;

  std::int64_t at(std::size_t producer_phase) const { return per_phase.at(producer_phase); }
  // "[2,2,3] idle=4"
  std::string str() const;

  friend bool operator==(const FiringThresholds&, const FiringThresholds&) = default;
};

// Threshold for a consumer starting while the producer still has to emit
// `remaining` (one entry per upcoming cycle, current cycle first). Tokens
// produced in a cycle are consumable in that same cycle.
std::int64_t start_threshold(std::span<const std::int64_t> remaining,
                             std::span<const std::int64_t> consumption);

FiringThresholds compute_fifo_thresholds(const AccessPattern& pp, const AccessPattern& cp);

// Every uniform pattern [d,...,d] with d | total, largest d first.
std::vector<AccessPattern> divisor_refinements(std::int64_t total);

// Per-node pattern bundle; all patterns share one length.
struct PatternSet {
  std::vector<AccessPattern> inputs;
  std::vector<AccessPattern> outputs;

  // 0 when the set is empty.
  std::size_t length() const;
  bool consistent() const;
};

}  // namespace sdfap

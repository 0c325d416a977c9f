#include "sdfap/pattern.hpp"

#include <algorithm>
#include <sstream>

#include "sdfap/error.hpp"

namespace sdfap {

AccessPattern::AccessPattern(std::vector<std::int64_t> phases) : phases_(std::move(phases)) {
  for (auto v : phases_) {
    total_ += v;
    if (v != 0) rate_ = v;
  }
}

AccessPattern AccessPattern::from(std::span<const std::int64_t> phases) {
  if (phases.empty()) throw Error(ErrorCode::EmptyPattern, "pattern has no phases");
  std::int64_t rate = 0;
  for (auto v : phases) {
    if (v < 0) throw Error(ErrorCode::MixedNonZeroValues, "negative token count in pattern");
    if (v == 0) continue;
    if (rate != 0 && v != rate) {
      std::ostringstream os;
      os << "entries " << rate << " and " << v << " differ";
      throw Error(ErrorCode::MixedNonZeroValues, os.str());
    }
    rate = v;
  }
  if (rate == 0) throw Error(ErrorCode::AllZero, "pattern transfers no tokens");
  return AccessPattern({phases.begin(), phases.end()});
}

AccessPattern AccessPattern::from(std::initializer_list<std::int64_t> phases) {
  return from(std::span<const std::int64_t>(phases.begin(), phases.size()));
}

AccessPattern AccessPattern::uniform(std::int64_t value, std::size_t length) {
  std::vector<std::int64_t> v(length, value);
  return from(v);
}

std::size_t AccessPattern::nonzero_phases() const noexcept {
  return static_cast<std::size_t>(std::count_if(phases_.begin(), phases_.end(), [](auto v) { return v != 0; }));
}

std::size_t AccessPattern::last_nonzero_phase() const noexcept {
  for (std::size_t i = phases_.size(); i-- > 0;)
    if (phases_[i] != 0) return i;
  return 0;
}

std::string AccessPattern::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < phases_.size(); ++i) os << (i ? "," : "") << phases_[i];
  os << ']';
  return os.str();
}

AccessPattern validate_pattern(std::span<const std::int64_t> phases) { return AccessPattern::from(phases); }

std::string FiringThresholds::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < per_phase.size(); ++i) os << (i ? "," : "") << per_phase[i];
  os << "] idle=" << idle;
  return os.str();
}

std::int64_t start_threshold(std::span<const std::int64_t> remaining,
                             std::span<const std::int64_t> consumption) {
  // Shorter side is zero-padded; past the end of either list the running
  // sums stay flat.
  const std::size_t n = std::max(remaining.size(), consumption.size());
  std::int64_t produced = 0, consumed = 0, worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < remaining.size()) produced += remaining[i];
    if (i < consumption.size()) consumed += consumption[i];
    worst = std::max(worst, consumed - produced);
  }
  return worst;
}

FiringThresholds compute_fifo_thresholds(const AccessPattern& pp, const AccessPattern& cp) {
  FiringThresholds fc;
  const auto& prod = pp.phases();
  const auto& cons = cp.phases();
  fc.per_phase.reserve(prod.size());
  for (std::size_t j = 0; j < prod.size(); ++j)
    fc.per_phase.push_back(start_threshold(std::span(prod).subspan(j), cons));
  fc.idle = start_threshold({}, cons);
  return fc;
}

std::vector<AccessPattern> divisor_refinements(std::int64_t total) {
  if (total < 1) throw Error(ErrorCode::AllZero, "refinement total must be positive");
  std::vector<AccessPattern> out;
  for (std::int64_t d = total; d >= 1; --d)
    if (total % d == 0) out.push_back(AccessPattern::uniform(d, static_cast<std::size_t>(total / d)));
  return out;
}

std::size_t PatternSet::length() const {
  if (!inputs.empty()) return inputs.front().length();
  if (!outputs.empty()) return outputs.front().length();
  return 0;
}

bool PatternSet::consistent() const {
  const auto n = length();
  auto same = [n](const AccessPattern& p) { return p.length() == n; };
  return std::all_of(inputs.begin(), inputs.end(), same) && std::all_of(outputs.begin(), outputs.end(), same);
}

}  // namespace sdfap

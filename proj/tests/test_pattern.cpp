#include <gtest/gtest.h>

#include "sdfap/error.hpp"
#include "sdfap/pattern.hpp"
#include "support.hpp"

namespace sdfap {
namespace {

using testing::all_patterns;
using testing::brute_force_threshold;

ErrorCode code_of(std::initializer_list<std::int64_t> raw) {
  try {
    (void)AccessPattern::from(raw);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::InvalidGraph;
}

TEST(ValidatePattern, UniformPattern) {
  auto p = AccessPattern::from({2, 2, 2});
  EXPECT_EQ(p.rate(), 2);
  EXPECT_EQ(p.total(), 6);
  EXPECT_EQ(p.length(), 3u);
}

TEST(ValidatePattern, SingleToken) {
  auto p = AccessPattern::from({1});
  EXPECT_EQ(p.rate(), 1);
  EXPECT_EQ(p.total(), 1);
}

TEST(ValidatePattern, Errors) {
  EXPECT_EQ(code_of({1, 2}), ErrorCode::MixedNonZeroValues);
  EXPECT_EQ(code_of({}), ErrorCode::EmptyPattern);
  EXPECT_EQ(code_of({0, 0}), ErrorCode::AllZero);
  EXPECT_EQ(code_of({0, -1}), ErrorCode::MixedNonZeroValues);
}

TEST(ValidatePattern, ZerosAreAllowed) {
  auto p = AccessPattern::from({0, 3, 0, 3});
  EXPECT_EQ(p.nonzero_phases(), 2u);
  EXPECT_EQ(p.last_nonzero_phase(), 3u);
  EXPECT_EQ(p.str(), "[0,3,0,3]");
}

TEST(FifoThresholds, WorkedExample) {
  auto fc = compute_fifo_thresholds(AccessPattern::from({0, 1, 1}), AccessPattern::from({1, 1, 1, 1}));
  EXPECT_EQ(fc.per_phase, (std::vector<std::int64_t>{2, 2, 3}));
  EXPECT_EQ(fc.idle, 4);
  EXPECT_EQ(fc.str(), "[2,2,3] idle=4");
}

TEST(FifoThresholds, InPhaseProduction) {
  auto fc = compute_fifo_thresholds(AccessPattern::from({6}), AccessPattern::from({6}));
  EXPECT_EQ(fc.per_phase, (std::vector<std::int64_t>{0}));
  EXPECT_EQ(fc.idle, 6);
}

TEST(FifoThresholds, ProducerConsumerPairMatchesBruteForce) {
  const std::vector<std::int64_t> pp = {0, 1}, cp = {1, 1, 1};
  auto fc = compute_fifo_thresholds(AccessPattern::from(pp), AccessPattern::from(cp));
  for (std::size_t j = 0; j < pp.size(); ++j)
    EXPECT_EQ(fc.per_phase[j], brute_force_threshold({pp.begin() + static_cast<long>(j), pp.end()}, cp));
  EXPECT_EQ(fc.per_phase, (std::vector<std::int64_t>{2, 2}));
  EXPECT_EQ(fc.idle, 3);
}

TEST(FifoThresholds, BoundedByConsumptionTotal) {
  const auto pats = all_patterns(4, 3);
  for (const auto& pp : pats)
    for (const auto& cp : pats) {
      auto fc = compute_fifo_thresholds(AccessPattern::from(pp), AccessPattern::from(cp));
      const auto total = AccessPattern::from(cp).total();
      ASSERT_EQ(fc.idle, total);
      ASSERT_EQ(fc.per_phase.size(), pp.size());
      for (auto v : fc.per_phase) {
        ASSERT_GE(v, 0);
        ASSERT_LE(v, total);
      }
    }
}

// Removing future production (same alignment) never lowers the threshold.
TEST(FifoThresholds, MonotoneInFutureProduction) {
  const auto pats = all_patterns(5, 3);
  std::vector<std::vector<std::int64_t>> cps;
  for (const auto& p : pats)
    if (p.size() <= 5) cps.push_back(p);
  for (const auto& pp : pats) {
    for (std::uint32_t drop = 1; drop < (1u << pp.size()); ++drop) {
      auto fewer = pp;
      for (std::size_t i = 0; i < pp.size(); ++i)
        if ((drop >> i) & 1u) fewer[i] = 0;
      for (const auto& cp : cps)
        ASSERT_GE(start_threshold(fewer, cp), start_threshold(pp, cp));
    }
  }
}

TEST(FifoThresholds, ExhaustiveOracleAgreement) {
  const auto pats = all_patterns(5, 3);
  std::size_t checked = 0;
  for (const auto& pp : pats)
    for (const auto& cp : pats) {
      auto fc = compute_fifo_thresholds(AccessPattern::from(pp), AccessPattern::from(cp));
      for (std::size_t j = 0; j < pp.size(); ++j, ++checked)
        ASSERT_EQ(fc.per_phase[j], brute_force_threshold({pp.begin() + static_cast<long>(j), pp.end()}, cp));
      ASSERT_EQ(fc.idle, brute_force_threshold({}, cp));
    }
  EXPECT_GT(checked, 10000u);
}

std::vector<std::vector<std::int64_t>> phases_of(const std::vector<AccessPattern>& v) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& p : v) out.push_back(p.phases());
  return out;
}

TEST(DivisorRefinements, Six) {
  EXPECT_EQ(phases_of(divisor_refinements(6)),
            (std::vector<std::vector<std::int64_t>>{{6}, {3, 3}, {2, 2, 2}, {1, 1, 1, 1, 1, 1}}));
}

TEST(DivisorRefinements, One) {
  EXPECT_EQ(phases_of(divisor_refinements(1)), (std::vector<std::vector<std::int64_t>>{{1}}));
}

TEST(DivisorRefinements, TwentyMatchesDivisors) {
  std::vector<std::vector<std::int64_t>> expected;
  for (std::int64_t d = 20; d >= 1; --d)
    if (20 % d == 0) expected.push_back(std::vector<std::int64_t>(static_cast<std::size_t>(20 / d), d));
  const auto got = divisor_refinements(20);
  EXPECT_EQ(phases_of(got), expected);
  EXPECT_EQ(got.size(), 6u);
  for (const auto& p : got) EXPECT_EQ(p.total(), 20);
}

TEST(PatternSet, ConsistencyRequiresEqualLengths) {
  PatternSet ok{{AccessPattern::from({1, 1})}, {AccessPattern::from({0, 2})}};
  PatternSet bad{{AccessPattern::from({1, 1}), AccessPattern::from({2, 2, 2})}, {}};
  EXPECT_TRUE(ok.consistent());
  EXPECT_EQ(ok.length(), 2u);
  EXPECT_FALSE(bad.consistent());
}

}  // namespace
}  // namespace sdfap

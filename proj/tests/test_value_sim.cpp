#include <gtest/gtest.h>

#include <numeric>

#include "sdfap/error.hpp"
#include "sdfap/io.hpp"
#include "sdfap/schedule.hpp"
#include "sdfap/value_sim.hpp"
#include "support.hpp"

namespace sdfap {
namespace {

using testing::fixture;
using testing::load_fixture;

Stimulus one_to_six() {
  Stimulus s;
  s.firings["xs"] = {{1, 2, 3, 4, 5, 6}};
  s.firings["ys"] = {{1, 2, 3, 4, 5, 6}};
  return s;
}

// Hand evaluation: sum of squares.
Token sum_of_squares(const std::vector<Token>& v) {
  Token acc = 0;
  for (auto x : v) acc += x * x;
  return acc;
}

ErrorCode sim_error(const Graph& g, const Stimulus& s, const ClockedOptions& o = {}) {
  try {
    (void)simulate_clocked(g, s, o);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "simulation completed";
  return ErrorCode::InvalidGraph;
}

TEST(EvalCombinational, DotProduct) {
  auto g = load_fixture("dotp.json");
  auto out = eval_combinational(g, one_to_six());
  EXPECT_EQ(out.at("out"), (std::vector<Token>{sum_of_squares({1, 2, 3, 4, 5, 6})}));
  EXPECT_EQ(out.at("out")[0], 91u);
}

TEST(EvalCombinational, Zeros) {
  auto g = load_fixture("dotp.json");
  Stimulus s;
  s.firings["xs"] = {std::vector<Token>(6, 0)};
  s.firings["ys"] = {{9, 9, 9, 9, 9, 9}};
  EXPECT_EQ(eval_combinational(g, s).at("out"), (std::vector<Token>{0}));
}

TEST(EvalCombinational, WrapsAtWidth) {
  auto g = load_fixture("dotp.json");
  Stimulus s;
  s.firings["xs"] = {{200, 200, 0, 0, 0, 0}};
  s.firings["ys"] = {{2, 1, 0, 0, 0, 0}};
  EXPECT_EQ(eval_combinational(g, s).at("out"), (std::vector<Token>{(400 + 200) & 0xFF}));
}

TEST(SimulateClocked, DotProductPipeline) {
  auto g = load_fixture("dotp-2261.json");
  auto r = simulate_clocked(g, load_stimulus(fixture("stimulus-dotp-2261.json")));
  ASSERT_EQ(r.sinks.at("out").size(), 1u);
  EXPECT_EQ(r.sinks.at("out")[0], (SinkToken{91, 3}));
  EXPECT_EQ(r.underflows, 0);
}

TEST(SimulateClocked, Fig2ArrivesAtSix) {
  auto g = load_fixture("fig2.json");
  auto r = simulate_clocked(g, Stimulus{});
  ASSERT_EQ(r.sinks.at("out").size(), 1u);
  EXPECT_EQ(r.sinks.at("out")[0].cycle, 6);
  EXPECT_EQ(r.sinks.at("out")[0].value, 3u);  // three unit tokens folded
}

TEST(SimulateClocked, EmptyStimulus) {
  auto g = load_fixture("empty.json");
  auto r = simulate_clocked(g, load_stimulus(fixture("stimulus-empty.json")));
  EXPECT_EQ(r.cycles, 0);
  for (const auto& [name, toks] : r.sinks) EXPECT_TRUE(toks.empty()) << name;
}

TEST(SimulateClocked, FiringStartsMatchScheduler) {
  for (const auto& name : testing::valid_fixtures()) {
    auto g = load_fixture(name);
    for (int iters : {1, 3}) {
      auto stim = random_stimulus(g, iters, 7);
      auto r = simulate_clocked(g, stim);
      auto s = simulate_schedule(g, stimulus_iterations(g, stim));
      EXPECT_EQ(r.firing_starts, s.firing_starts) << name << " x" << iters;
      for (std::size_t n = 0; n < g.nodes.size(); ++n) {
        if (g.nodes[n].kind != NodeKind::Sink) continue;
        const auto& toks = r.sinks.at(g.nodes[n].name);
        ASSERT_EQ(toks.size(), s.sink_arrivals[n].size()) << name;
        for (std::size_t k = 0; k < toks.size(); ++k) EXPECT_EQ(toks[k].cycle, s.sink_arrivals[n][k]) << name;
      }
    }
  }
}

TEST(SimulateClocked, ArrivalsNondecreasing) {
  for (const auto& name : testing::valid_fixtures()) {
    auto g = load_fixture(name);
    auto r = simulate_clocked(g, random_stimulus(g, 2, 3));
    for (const auto& [sink, toks] : r.sinks)
      for (std::size_t k = 1; k < toks.size(); ++k) EXPECT_LE(toks[k - 1].cycle, toks[k].cycle) << name;
  }
}

TEST(SimulateClocked, SizedCapacitiesSuffice) {
  for (const auto& name : testing::valid_fixtures()) {
    auto g = load_fixture(name);
    ClockedOptions o;
    o.capacities = size_fifos(simulate_schedule(g, 3), g);
    EXPECT_NO_THROW(simulate_clocked(g, random_stimulus(g, 3, 11), o)) << name;
  }
}

TEST(SimulateClocked, FifoOverflow) {
  auto g = load_fixture("dotp-20.json");
  ClockedOptions o;
  o.capacities = std::vector<std::int64_t>(g.edges.size(), 1);
  EXPECT_EQ(sim_error(g, random_stimulus(g, 1, 1), o), ErrorCode::FifoOverflow);
}

TEST(SimulateClocked, ShapeMismatch) {
  auto g = load_fixture("dotp.json");
  auto s = one_to_six();
  s.firings["ys"][0].pop_back();
  EXPECT_EQ(sim_error(g, s), ErrorCode::ShapeMismatch);
  s = one_to_six();
  s.firings.erase("ys");
  EXPECT_EQ(sim_error(g, s), ErrorCode::ShapeMismatch);
  s = one_to_six();
  s.firings["xs"].push_back(s.firings["xs"][0]);
  EXPECT_EQ(sim_error(g, s), ErrorCode::ShapeMismatch);
}

// After each phase the fold holds init plus the elements seen so far.
TEST(SimulateClocked, FoldAccumulatorPerPhase) {
  auto g = load_fixture("fold-pipeline.json");
  const auto acc = *g.find("acc");
  const int width = g.nodes[acc].width;
  const Token mask = (Token{1} << width) - 1;
  auto stim = random_stimulus(g, 3, 42);
  std::vector<AccumulatorSample> samples;
  ClockedOptions o;
  o.on_accumulator = [&](const AccumulatorSample& s) { samples.push_back(s); };
  (void)simulate_clocked(g, stim, o);

  std::size_t checked = 0;
  for (const auto& s : samples) {
    if (s.node != acc) continue;
    const auto& xs = stim.firings.at("src").at(s.firing);
    EXPECT_EQ(s.folded, (s.phase + 1) * 2);
    Token want = 7;
    for (std::size_t i = 0; i < s.folded; ++i) want = (want + xs[i] * 3) & mask;
    EXPECT_EQ(s.value, want) << "firing " << s.firing << " phase " << s.phase;
    ++checked;
  }
  EXPECT_EQ(checked, 3u * 4u);
}

TEST(Equivalence, AllFixtures) {
  for (const auto& name : testing::valid_fixtures()) {
    auto g = load_fixture(name);
    EquivalenceOptions o;
    o.iterations = 2;
    auto rep = equivalence_check(g, 40, 2024, o);
    EXPECT_EQ(rep.trials, 40u);
    EXPECT_EQ(rep.mismatches, 0u) << name;
  }
}

TEST(Equivalence, EveryRefinement) {
  for (const auto& p : divisor_refinements(12)) {
    auto g = build_graph(testing::dotp_document(p.rate(), p.length(), 18));
    EXPECT_EQ(equivalence_check(g, 25, 5).mismatches, 0u) << p.str();
  }
}

TEST(Equivalence, Reproducible) {
  auto g = load_fixture("dotp-unbundled.json");
  EquivalenceOptions o;
  o.threshold_delta = -1;
  auto a = equivalence_check(g, 20, 99, o);
  auto b = equivalence_check(g, 20, 99, o);
  EXPECT_EQ(a.mismatches, b.mismatches);
  ASSERT_EQ(a.counterexamples.size(), b.counterexamples.size());
  for (std::size_t i = 0; i < a.counterexamples.size(); ++i)
    EXPECT_EQ(a.counterexamples[i].stimulus.firings, b.counterexamples[i].stimulus.firings);
}

TEST(Equivalence, FaultInjectionDetected) {
  auto g = load_fixture("dotp-unbundled.json");
  EquivalenceOptions o;
  o.threshold_delta = -1;
  auto rep = equivalence_check(g, 50, 1, o);
  EXPECT_GE(rep.mismatches, 1u);
  ASSERT_FALSE(rep.counterexamples.empty());
  EXPECT_LE(rep.counterexamples.size(), o.max_counterexamples);
  // a counterexample replays to the same disagreement
  const auto& cx = rep.counterexamples.front();
  EXPECT_NE(cx.expected, cx.actual);
  EXPECT_EQ(eval_combinational(g, cx.stimulus), cx.expected);
}

TEST(Equivalence, FaultShowsAsUnderflow) {
  auto g = load_fixture("dotp-unbundled.json");
  ClockedOptions o;
  o.threshold_delta = -1;
  auto r = simulate_clocked(g, random_stimulus(g, 1, 8), o);
  EXPECT_GT(r.underflows, 0);
}

TEST(StimulusJson, RoundTrip) {
  auto g = load_fixture("com-shaped.json");
  auto s = random_stimulus(g, 2, 77);
  EXPECT_EQ(stimulus_from_json(stimulus_to_json(s)).firings, s.firings);
  EXPECT_EQ(stimulus_iterations(g, s), 2);
}

TEST(StimulusJson, RejectsGarbage) {
  try {
    (void)stimulus_from_json(nlohmann::json::parse(R"({"xs": "nope"})"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(SimResultJson, Shape) {
  auto g = load_fixture("dotp.json");
  auto j = sim_result_to_json(simulate_clocked(g, one_to_six()), g);
  EXPECT_EQ(j["sinks"]["out"][0]["value"], 91);
}

}  // namespace
}  // namespace sdfap

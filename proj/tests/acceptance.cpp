// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "sdfap/codegen.hpp"
#include "sdfap/estimate.hpp"
#include "sdfap/pattern.hpp"
#include "sdfap/rtl.hpp"
#include "sdfap/schedule.hpp"
#include "sdfap/value_sim.hpp"
#include "support.hpp"

using namespace sdfap;
using testing::dotp_document;
using testing::load_fixture;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

const char* const kDotp[] = {"dotp-1x20.json", "dotp-5555.json", "dotp-1010.json", "dotp-20.json"};

std::vector<std::int64_t> caps(const Graph& g) { return size_fifos(simulate_schedule(g, 2), g); }

Outcome ac1() {
  const auto pp = AccessPattern::from({0, 1, 1});
  const auto cp = AccessPattern::from({1, 1, 1, 1});
  const auto t0 = std::chrono::steady_clock::now();
  const auto fc = compute_fifo_thresholds(pp, cp);
  const auto us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = fc.per_phase == std::vector<std::int64_t>{2, 2, 3} && us < 1000.0;
  return {ok, fc.str() + ", " + std::to_string(static_cast<int>(us)) + " us"};
}

Outcome ac2() {
  auto g = load_fixture("fig2.json");
  auto s = simulate_schedule(g, 1);
  const auto& p = s.firing_starts[*g.find("p")];
  const auto& c = s.firing_starts[*g.find("c")];
  // c's last token is written in the second phase of p's third firing and
  // lands on the following clock edge
  const auto last_arrival = p.size() == 3 ? p[2] + 1 + 1 : -1;
  const auto& arrivals = s.sink_arrivals[*g.find("out")];
  const bool ok = p == std::vector<std::int64_t>{0, 2, 4} && c == std::vector<std::int64_t>{4} && last_arrival == 6 &&
                  arrivals == std::vector<std::int64_t>{6};
  std::ostringstream os;
  os << "p@" << (p.size() == 3 ? "{0,2,4}" : "?") << " c@" << (c.empty() ? -1 : c[0]) << ", last input at "
     << last_arrival << ", output at "
     << (arrivals.empty() ? -1 : arrivals[0]);
  return {ok, os.str()};
}

Outcome ac3() {
  const std::int64_t want[] = {21, 5, 3, 2};
  bool ok = true;
  std::ostringstream os;
  for (int i = 0; i < 4; ++i) {
    auto g = load_fixture(kDotp[i]);
    const auto lat = timing_report(simulate_schedule(g, 1), g).latency_cycles;
    ok = ok && lat == want[i];
    os << (i ? " " : "latencies ") << lat;
  }
  return {ok, os.str()};
}

Outcome ac4() {
  const std::int64_t want[] = {1, 5, 10, 20};
  bool ok = true;
  std::ostringstream os;
  for (int i = 0; i < 4; ++i) {
    auto g = load_fixture(kDotp[i]);
    auto r = estimate_resources(g, caps(g));
    ok = ok && r.dsp_count == want[i] && r.memory_bits == 720;
    os << (i ? " " : "dsp ") << r.dsp_count << "/" << r.memory_bits << "b";
  }
  return {ok, os.str()};
}

Outcome ac5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0, trials = 0;
  for (const char* name : kDotp) {
    auto rep = equivalence_check(load_fixture(name), 1000, 0x5eed);
    mismatches += rep.mismatches;
    trials += rep.trials;
  }
  EquivalenceOptions fault;
  fault.threshold_delta = -1;
  auto bad = equivalence_check(load_fixture("dotp-unbundled.json"), 1000, 0x5eed, fault);
  const auto s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream os;
  os << trials << " trials, " << mismatches << " mismatches; fault run " << bad.mismatches << " mismatches; " << s
     << " s";
  return {mismatches == 0 && trials == 4000 && bad.mismatches >= 1 && s < 30.0, os.str()};
}

Outcome ac6() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pats = testing::all_patterns(5, 3);
  std::size_t pairs = 0, bad = 0;
  for (const auto& pp : pats)
    for (const auto& cp : pats) {
      const auto fc = compute_fifo_thresholds(AccessPattern::from(pp), AccessPattern::from(cp));
      for (std::size_t j = 0; j < pp.size(); ++j)
        bad += fc.per_phase[j] !=
               testing::brute_force_threshold({pp.begin() + static_cast<long>(j), pp.end()}, cp);
      bad += fc.idle != testing::brute_force_threshold({}, cp);
      ++pairs;
    }
  const auto s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream os;
  os << pairs << " pattern pairs, " << bad << " disagreements, " << s << " s";
  return {bad == 0 && s < 10.0, os.str()};
}

Outcome ac7() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& p : divisor_refinements(20)) {
    auto g = build_graph(dotp_document(p.rate(), p.length(), 18));
    const auto len = static_cast<std::int64_t>(p.length());
    const auto dsp = estimate_resources(g, caps(g)).dsp_count;
    const auto lat = timing_report(simulate_schedule(g, 1), g).latency_cycles;
    ok = ok && dsp * len == 20 && lat == len + 1;
    os << p.rate() << "x" << len << ":" << dsp << "/" << lat << " ";
  }
  return {ok, os.str() + "(dsp/latency)"};
}

Outcome ac8() {
  auto emit = [](const Graph& g) { return rtl::emit_verilog(lower_graph(g, caps(g))); };
  auto g = load_fixture("fig2.json");
  auto a = emit(g), b = emit(g);
  bool identical = a.size() == b.size();
  for (std::size_t i = 0; identical && i < a.size(); ++i) identical = a[i].name == b[i].name && a[i].text == b[i].text;

  bool inventory = true, no_preg_ctrl = true;
  for (const auto& name : testing::valid_fixtures()) {
    auto gg = load_fixture(name);
    auto d = lower_graph(gg, caps(gg));
    std::size_t fifo = 0, preg = 0;
    for (std::size_t e = 0; e < gg.edges.size(); ++e) {
      const auto kind = gg.edges[e].kind;
      fifo += kind == EdgeKind::Fifo;
      preg += kind == EdgeKind::PipelineRegister;
      if (kind == EdgeKind::PipelineRegister && d.find(edge_identifier(gg, e) + "_fifo_ctrl"))
        no_preg_ctrl = false;
    }
    inventory = inventory && d.modules.size() == gg.compute_count() * 2 + fifo * 2 + preg + 1;
  }
  std::ostringstream os;
  os << "fig2 " << a.size() << " modules, identical=" << identical << ", inventory=" << inventory
     << ", no preg controllers=" << no_preg_ctrl;
  return {identical && inventory && no_preg_ctrl && a.size() == 7, os.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1 threshold golden", ac1},      {"AC2 fig2 schedule", ac2},    {"AC3 dotp latency", ac3},
      {"AC4 dotp resources", ac4},        {"AC5 equivalence", ac5},      {"AC6 threshold oracle", ac6},
      {"AC7 divisor scaling", ac7},       {"AC8 codegen structure", ac8},
  };
  int failed = 0;
  for (const auto& [label, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.ok;
    std::printf("%s %-24s %s\n", o.ok ? "PASS" : "FAIL", label, o.detail.c_str());
  }
  return failed ? 1 : 0;
}

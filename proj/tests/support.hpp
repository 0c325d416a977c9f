#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "sdfap/graph.hpp"
#include "sdfap/io.hpp"
#include "sdfap/schedule.hpp"

namespace sdfap::testing {

inline std::string fixture(const std::string& name) { return std::string(SDFAP_FIXTURES) + "/" + name; }

inline Graph load_fixture(const std::string& name) { return load_graph(fixture(name)); }

// Minimal starting occupancy found by trying every candidate and stepping
// the timeline cycle by cycle (production of a cycle usable in that cycle).
inline std::int64_t brute_force_threshold(const std::vector<std::int64_t>& remaining,
                                          const std::vector<std::int64_t>& consumption) {
  for (std::int64_t occ = 0;; ++occ) {
    std::int64_t have = occ;
    bool ok = true;
    for (std::size_t i = 0; i < consumption.size() && ok; ++i) {
      have += i < remaining.size() ? remaining[i] : 0;
      have -= consumption[i];
      ok = have >= 0;
    }
    if (ok) return occ;
  }
}

// Every 0/n pattern with length <= max_len and n <= max_n.
inline std::vector<std::vector<std::int64_t>> all_patterns(std::size_t max_len, std::int64_t max_n) {
  std::vector<std::vector<std::int64_t>> out;
  for (std::size_t len = 1; len <= max_len; ++len)
    for (std::int64_t n = 1; n <= max_n; ++n)
      for (std::uint32_t mask = 1; mask < (1u << len); ++mask) {
        std::vector<std::int64_t> p(len);
        for (std::size_t i = 0; i < len; ++i) p[i] = (mask >> i) & 1u ? n : 0;
        out.push_back(p);
      }
  return out;
}

// Token movement per edge and cycle rebuilt from firing starts alone.
struct Replay {
  std::vector<std::vector<std::int64_t>> produced, consumed, occupancy_before;
  bool never_negative = true;
};

inline Replay replay(const Graph& g, const Schedule& s) {
  Replay r;
  const auto H = static_cast<std::size_t>(s.horizon);
  auto activity = [&](std::size_t node, const AccessPattern& p) {
    std::vector<std::int64_t> a(H, 0);
    for (auto st : s.firing_starts[node])
      for (std::size_t k = 0; k < p.length(); ++k)
        if (static_cast<std::size_t>(st) + k < H) a[static_cast<std::size_t>(st) + k] += p[k];
    return a;
  };
  for (const auto& e : g.edges) {
    auto prod = activity(e.from.node, e.pp);
    auto cons = e.kind == EdgeKind::SinkWire ? prod : activity(e.to.node, e.cp);
    std::vector<std::int64_t> occ(H, 0);
    std::int64_t level = 0;
    for (std::size_t t = 0; t < H; ++t) {
      occ[t] = level;
      if (e.kind == EdgeKind::PipelineRegister) {
        if (cons[t] > level) r.never_negative = false;
        level = prod[t];
      } else {
        level += prod[t] - cons[t];
        if (level < 0) r.never_negative = false;
      }
    }
    r.produced.push_back(prod);
    r.consumed.push_back(cons);
    r.occupancy_before.push_back(occ);
  }
  return r;
}

// Two sources -> zipWith(*) -> foldl1(+) -> sink; the fold emits in its last
// phase (bundled) unless `fold_cp` overrides its consumption pattern.
inline GraphDocument dotp_document(std::int64_t n, std::size_t length, int width,
                                   std::vector<std::int64_t> fold_cp = {}) {
  const std::int64_t total = n * static_cast<std::int64_t>(length);
  std::vector<std::int64_t> pat(length, n);
  if (fold_cp.empty()) fold_cp = pat;
  std::vector<std::int64_t> fold_pp(fold_cp.size(), 0);
  fold_pp.back() = 1;
  GraphDocument d;
  d.name = "dotp_" + std::to_string(n) + "x" + std::to_string(length);
  d.nodes = {
      {"xs", "source", width, "", {}, {{total}}},
      {"ys", "source", width, "", {}, {{total}}},
      {"zw", "compute", width, "(zipWith * (in 0) (in 1))", {pat, pat}, {pat}},
      {"fl", "compute", width, "(foldl1 + (in 0))", {fold_cp}, {fold_pp}},
      {"out", "sink", width, "", {{1}}, {}},
  };
  d.edges = {{"xs.0", "zw.0"}, {"ys.0", "zw.1"}, {"zw.0", "fl.0"}, {"fl.0", "out.0"}};
  return d;
}

inline const std::vector<std::string>& valid_fixtures() {
  static const std::vector<std::string> names = {
      "fig2.json",      "alg1-example.json", "dotp.json",       "dotp-20.json",      "dotp-1010.json",
      "dotp-5555.json", "dotp-1x20.json",    "dotp-2261.json",  "dotp-unbundled.json", "fold-pipeline.json",
      "identity.json",  "com-shaped.json",   "dct-shaped.json", "no-mul.json"};
  return names;
}

}  // namespace sdfap::testing

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdfap/codegen.hpp"
#include "sdfap/error.hpp"
#include "sdfap/estimate.hpp"
#include "sdfap/io.hpp"
#include "sdfap/schedule.hpp"
#include "sdfap/value_sim.hpp"

namespace {

using namespace sdfap;

enum class Level { Error, Warn, Info, Debug };

Level log_level() {
  const char* v = std::getenv("SDFAP_LOG");
  if (!v) return Level::Warn;
  const std::string s(v);
  if (s == "error") return Level::Error;
  if (s == "info") return Level::Info;
  if (s == "debug") return Level::Debug;
  return Level::Warn;
}

void log(Level l, const std::string& msg) {
  static const Level threshold = log_level();
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (l <= threshold) std::cerr << "[" << names[static_cast<int>(l)] << "] " << msg << "\n";
}

// Usage/parse failures exit 2, every other domain failure exits 1.
struct Exit {
  int code;
};

Graph load_checked(const std::string& path) {
  auto g = load_graph(path);
  const auto diags = validate_graph(g);
  for (const auto& d : diags) std::cerr << d.code << " " << d.subject << ": " << d.message << "\n";
  if (!diags.empty()) throw Exit{1};
  log(Level::Info, "loaded " + path + ": " + std::to_string(g.nodes.size()) + " nodes, " +
                       std::to_string(g.edges.size()) + " edges");
  return g;
}

std::vector<std::int64_t> steady_state_capacities(const Graph& g) {
  const auto s = simulate_schedule(g, std::max(2, g.iterations));
  return size_fifos(s, g);
}

int cmd_check(const std::string& path) {
  auto g = load_checked(path);
  std::cout << "ok: " << g.name << " (" << g.nodes.size() << " nodes, " << g.edges.size() << " edges)\n";
  return 0;
}

int cmd_fc(const std::string& path, const std::string& edge) {
  auto g = load_checked(path);
  if (!edge.empty()) {
    auto e = g.find_edge(edge);
    if (!e) throw Error(ErrorCode::UnknownEdge, "no edge named '" + edge + "'");
    std::cout << compute_fifo_thresholds(g.edges[*e].pp, g.edges[*e].cp).str() << "\n";
    return 0;
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.edges[e].kind == EdgeKind::SinkWire) continue;
    std::cout << g.edge_name(e) << " " << compute_fifo_thresholds(g.edges[e].pp, g.edges[e].cp).str() << "\n";
  }
  return 0;
}

int cmd_schedule(const std::string& path, int iterations, const std::string& format) {
  auto g = load_checked(path);
  if (iterations <= 0) iterations = g.iterations;
  const auto s = simulate_schedule(g, iterations);
  const auto r = timing_report(s, g);
  if (format == "json") {
    auto j = schedule_to_json(s, g);
    j["timing"] = timing_to_json(r, g);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << render_gantt(s, g) << "latency " << r.latency_cycles << " cycles, throughput " << r.throughput
              << " iterations/cycle\n";
  }
  return 0;
}

void dump_counterexamples(const EquivalenceReport& rep, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& c : rep.counterexamples) {
    const auto file = std::filesystem::path(dir) / ("counterexample-" + std::to_string(c.trial) + ".json");
    std::ofstream(file) << stimulus_to_json(c.stimulus).dump(2) << "\n";
    log(Level::Info, "wrote " + file.string());
  }
}

int cmd_simulate(const std::string& path, const std::string& stimulus, std::size_t random, std::uint64_t seed,
                 int iterations, const std::string& dump) {
  auto g = load_checked(path);
  if (!stimulus.empty()) {
    const auto stim = load_stimulus(stimulus);
    const auto expected = eval_combinational(g, stim);
    ClockedOptions opts;
    opts.capacities = steady_state_capacities(g);
    const auto res = simulate_clocked(g, stim, opts);
    std::map<std::string, std::vector<Token>> actual;
    for (const auto& [name, toks] : res.sinks) {
      auto& dst = actual[name];
      for (const auto& t : toks) dst.push_back(t.value);
    }
    const bool pass = actual == expected;
    auto j = sim_result_to_json(res, g);
    j["expected"] = expected;
    j["pass"] = pass;
    std::cout << j.dump(2) << "\n";
    return pass ? 0 : 1;
  }
  if (random == 0) throw CLI::ValidationError("simulate", "give --stimulus FILE or --random N");
  EquivalenceOptions opts;
  opts.iterations = iterations > 0 ? iterations : g.iterations;
  const auto rep = equivalence_check(g, random, seed, opts);
  nlohmann::json j;
  j["trials"] = rep.trials;
  j["mismatches"] = rep.mismatches;
  j["seed"] = seed;
  auto ces = nlohmann::json::array();
  for (const auto& c : rep.counterexamples)
    ces.push_back({{"trial", c.trial}, {"stimulus", stimulus_to_json(c.stimulus)}, {"expected", c.expected},
                   {"actual", c.actual}, {"error", c.error}});
  j["counterexamples"] = ces;
  j["pass"] = rep.mismatches == 0;
  std::cout << j.dump(2) << "\n";
  if (!dump.empty() && !rep.counterexamples.empty()) dump_counterexamples(rep, dump);
  return rep.mismatches == 0 ? 0 : 1;
}

int cmd_estimate(const std::vector<std::string>& paths, const std::string& format, std::int64_t limit) {
  std::vector<ResourceReport> reports;
  for (const auto& p : paths) {
    auto g = load_checked(p);
    reports.push_back(estimate_resources(g, steady_state_capacities(g), {limit}));
  }
  if (format == "json") {
    auto j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(report_to_json(r));
    std::cout << (j.size() == 1 ? j[0] : j).dump(2) << "\n";
  } else {
    std::cout << render_report_table(reports);
  }
  return 0;
}

int cmd_emit(const std::string& path, const std::string& out, std::int64_t limit) {
  auto g = load_checked(path);
  const auto design = lower_graph(g, steady_state_capacities(g), {limit});
  std::filesystem::create_directories(out);
  for (const auto& f : rtl::emit_verilog(design)) {
    std::ofstream(std::filesystem::path(out) / f.name, std::ios::binary) << f.text;
    log(Level::Debug, "wrote " + f.name);
  }
  std::ofstream(std::filesystem::path(out) / "manifest.json", std::ios::binary) << design_manifest(design).dump(2) << "\n";
  std::cout << design.modules.size() << " module(s) written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataflow HLS toolkit for SDF graphs with access patterns"};
  app.require_subcommand(1);
  std::string path, edge, format = "gantt", stimulus, out, dump;
  std::vector<std::string> paths;
  int iterations = 0;
  std::size_t random = 0;
  std::uint64_t seed = 1;
  std::int64_t limit = LoweringOptions{}.register_file_limit;
  std::string est_format = "table";

  auto* check = app.add_subcommand("check", "Validate a graph document");
  check->add_option("graph", path, "Graph JSON")->required();

  auto* fc = app.add_subcommand("fc", "Print FIFO firing thresholds");
  fc->add_option("graph", path, "Graph JSON")->required();
  fc->add_option("--edge", edge, "Edge name, e.g. p.0->c.0");

  auto* sched = app.add_subcommand("schedule", "Self-timed schedule");
  sched->add_option("graph", path, "Graph JSON")->required();
  sched->add_option("--iterations", iterations, "Graph iterations (default: document meta)");
  sched->add_option("--format", format, "gantt or json")->check(CLI::IsMember({"gantt", "json"}));

  auto* sim = app.add_subcommand("simulate", "Clocked simulation against the combinational reference");
  sim->add_option("graph", path, "Graph JSON")->required();
  auto* stim_opt = sim->add_option("--stimulus", stimulus, "Stimulus JSON");
  auto* rand_opt = sim->add_option("--random", random, "Number of random trials");
  stim_opt->excludes(rand_opt);
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--iterations", iterations, "Graph iterations per random trial");
  sim->add_option("--dump", dump, "Directory for counterexample stimulus files");

  auto* est = app.add_subcommand("estimate", "Resource estimate");
  est->add_option("graphs", paths, "Graph JSON files")->required();
  est->add_option("--format", est_format, "table or json")->check(CLI::IsMember({"table", "json"}));
  est->add_option("--register-file-limit", limit, "Largest FIFO built from registers");

  auto* emit = app.add_subcommand("emit", "Write Verilog and a manifest");
  emit->add_option("graph", path, "Graph JSON")->required();
  emit->add_option("--out", out, "Output directory")->required();
  emit->add_option("--register-file-limit", limit, "Largest FIFO built from registers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(path);
    if (*fc) return cmd_fc(path, edge);
    if (*sched) return cmd_schedule(path, iterations, format);
    if (*sim) return cmd_simulate(path, stimulus, random, seed, iterations, dump);
    if (*est) return cmd_estimate(paths, est_format, limit);
    if (*emit) return cmd_emit(path, out, limit);
  } catch (const Exit& e) {
    return e.code;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == ErrorCode::ParseError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

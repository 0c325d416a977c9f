#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "support.hpp"

namespace sdfap {
namespace {

namespace fs = std::filesystem;
using testing::fixture;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SDFAP_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string f(const std::string& name) { return "'" + fixture(name) + "'"; }

fs::path scratch(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("sdfap-cli-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

TEST(CliCheck, ExitCodes) {
  EXPECT_EQ(run("check " + f("dotp.json")).code, 0);
  EXPECT_EQ(run("check " + f("invalid/malformed.json")).code, 2);
  EXPECT_EQ(run("check " + f("invalid/mixed.json")).code, 1);
  EXPECT_EQ(run("check " + f("invalid/fold-not-at-root.json")).code, 1);
  EXPECT_EQ(run("check " + f("invalid/length-mismatch.json")).code, 1);
  EXPECT_EQ(run("check /nonexistent/graph.json").code, 2);
}

TEST(CliCheck, MixedValuesNamed) {
  const std::string cmd = std::string(SDFAP_CLI) + " check " + f("invalid/mixed.json") + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  std::string out;
  std::array<char, 1024> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  pclose(p);
  EXPECT_NE(out.find("MixedNonZeroValues"), std::string::npos) << out;
}

TEST(CliUsage, Errors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("schedule").code, 2);
  EXPECT_EQ(run("schedule " + f("fig2.json") + " --format xml").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(CliFc, Tables) {
  auto r = run("fc " + f("fig2.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("[2,2] idle=3"), std::string::npos) << r.out;
  r = run("fc " + f("alg1-example.json") + " --edge 'a.0->b.0'");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("[2,2,3] idle=4"), std::string::npos) << r.out;
  r = run("fc " + f("dotp.json"));
  EXPECT_NE(r.out.find("[0] idle=6"), std::string::npos) << r.out;
  EXPECT_EQ(run("fc " + f("fig2.json") + " --edge nope").code, 1);
}

TEST(CliSchedule, Gantt) {
  auto r = run("schedule " + f("fig2.json") + " --iterations 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("p    |######.|"), std::string::npos) << r.out;
  r = run("schedule " + f("dotp-2261.json") + " --iterations 1");
  EXPECT_NE(r.out.find("latency 4 cycles"), std::string::npos) << r.out;
}

TEST(CliSchedule, Json) {
  auto r = run("schedule " + f("fig2.json") + " --iterations 1 --format json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["firing_starts"]["p"], nlohmann::json({0, 2, 4}));
  EXPECT_EQ(j["firing_starts"]["c"], nlohmann::json({4}));
}

TEST(CliSimulate, FixtureStimulus) {
  auto r = run("simulate " + f("dotp.json") + " --stimulus " + f("stimulus-dotp.json"));
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["sinks"]["out"][0]["value"], 91);
}

TEST(CliSimulate, Random) {
  auto r = run("simulate " + f("dotp-5555.json") + " --random 100 --seed 9");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["mismatches"], 0);
  EXPECT_EQ(run("simulate " + f("dotp-5555.json") + " --random 100 --seed 9").out, r.out);
}

TEST(CliSimulate, EmptyStimulus) {
  auto r = run("simulate " + f("empty.json") + " --stimulus " + f("stimulus-empty.json"));
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["sinks"].empty());
  EXPECT_EQ(j["cycles"], 0);
}

TEST(CliEstimate, Table) {
  auto r = run("estimate " + f("dotp-1x20.json") + " " + f("dotp-5555.json") + " " + f("dotp-1010.json") + " " +
               f("dotp-20.json"));
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line, dsp, mem;
  while (std::getline(lines, line)) {
    if (line.rfind("DSPs", 0) == 0) dsp = line;
    if (line.rfind("Memory bits", 0) == 0) mem = line;
  }
  std::istringstream d(dsp.substr(4));
  std::vector<int> vals;
  for (int v; d >> v;) vals.push_back(v);
  EXPECT_EQ(vals, (std::vector<int>{1, 5, 10, 20})) << dsp;
  EXPECT_NE(mem.find("720"), std::string::npos) << mem;
}

TEST(CliEstimate, Json) {
  auto r = run("estimate " + f("no-mul.json") + " --format json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  if (j.is_array()) j = j[0];
  EXPECT_EQ(j["dsp_count"], 0);
}

TEST(CliEmit, Fig2Files) {
  const auto a = scratch("a"), b = scratch("b");
  ASSERT_EQ(run("emit " + f("fig2.json") + " --out '" + a.string() + "'").code, 0);
  ASSERT_EQ(run("emit " + f("fig2.json") + " --out '" + b.string() + "'").code, 0);
  auto fa = read_dir(a), fb = read_dir(b);
  std::size_t verilog = 0;
  for (const auto& [name, text] : fa) verilog += name.ends_with(".v");
  EXPECT_EQ(verilog, 7u);
  EXPECT_TRUE(fa.contains("manifest.json"));
  EXPECT_EQ(fa, fb);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(CliEmit, EmptyGraph) {
  const auto dir = scratch("empty");
  ASSERT_EQ(run("emit " + f("empty.json") + " --out '" + dir.string() + "'").code, 0);
  std::size_t verilog = 0;
  for (const auto& [name, text] : read_dir(dir)) verilog += name.ends_with(".v");
  EXPECT_EQ(verilog, 1u);
  fs::remove_all(dir);
}

TEST(CliEmit, RevalidatesFirst) {
  const auto dir = scratch("bad");
  EXPECT_EQ(run("emit " + f("invalid/fold-not-at-root.json") + " --out '" + dir.string() + "'").code, 1);
  EXPECT_FALSE(fs::exists(dir));
}

}  // namespace
}  // namespace sdfap

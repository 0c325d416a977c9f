#include <gtest/gtest.h>

#include <regex>

#include "sdfap/codegen.hpp"
#include "sdfap/error.hpp"
#include "sdfap/estimate.hpp"
#include "sdfap/schedule.hpp"
#include "support.hpp"

namespace sdfap {
namespace {

using testing::load_fixture;

std::vector<std::int64_t> capacities(const Graph& g) {
  return size_fifos(simulate_schedule(g, 2), g);
}

rtl::Design lower(const Graph& g) { return lower_graph(g, capacities(g)); }

std::size_t expected_modules(const Graph& g) {
  std::size_t fifo = 0, preg = 0;
  for (const auto& e : g.edges) {
    fifo += e.kind == EdgeKind::Fifo;
    preg += e.kind == EdgeKind::PipelineRegister;
  }
  return g.compute_count() * 2 + fifo * 2 + preg + 1;
}

bool has_module(const rtl::Design& d, const std::string& name) { return d.find(name) != nullptr; }

std::size_t count_mul(const rtl::Design& d) {
  std::size_t n = 0;
  for (const auto& f : rtl::emit_verilog(d)) {
    const std::string needle = " * ";
    for (auto pos = f.text.find(needle); pos != std::string::npos; pos = f.text.find(needle, pos + 1)) ++n;
  }
  return n;
}

ErrorCode lower_error(const Graph& g, const std::vector<std::int64_t>& caps) {
  try {
    (void)lower_graph(g, caps);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "lowering succeeded";
  return ErrorCode::InvalidGraph;
}

TEST(Lowering, Fig2Inventory) {
  auto g = load_fixture("fig2.json");
  auto d = lower(g);
  EXPECT_EQ(d.modules.size(), 7u);
  for (const char* m : {"p_datapath", "p_ctrl", "c_datapath", "c_ctrl", "p_0_to_c_0_fifo", "p_0_to_c_0_fifo_ctrl",
                        "fig2_top"})
    EXPECT_TRUE(has_module(d, m)) << m;
  EXPECT_EQ(d.top, "fig2_top");
}

TEST(Lowering, ModuleCountFormula) {
  for (const auto& name : testing::valid_fixtures()) {
    auto g = load_fixture(name);
    EXPECT_EQ(lower(g).modules.size(), expected_modules(g)) << name;
  }
}

TEST(Lowering, EmptyGraphIsTopOnly) {
  auto g = load_fixture("empty.json");
  auto d = lower_graph(g, {});
  ASSERT_EQ(d.modules.size(), 1u);
  std::vector<std::string> ports;
  for (const auto& p : d.modules[0].ports) ports.push_back(p.name);
  EXPECT_EQ(ports, (std::vector<std::string>{"clk", "reset"}));
}

TEST(Lowering, PipelineRegisterHasNoController) {
  auto g = load_fixture("dotp-2261.json");
  auto d = lower(g);
  EXPECT_TRUE(has_module(d, "zw_0_to_fl_0_preg"));
  EXPECT_FALSE(has_module(d, "zw_0_to_fl_0_fifo"));
  EXPECT_FALSE(has_module(d, "zw_0_to_fl_0_fifo_ctrl"));
  EXPECT_TRUE(has_module(d, "xs_0_to_zw_0_fifo_ctrl"));
}

TEST(Lowering, ThresholdTableBakedIn) {
  auto g = load_fixture("fig2.json");
  auto d = lower(g);
  const auto* ctrl = d.find("p_0_to_c_0_fifo_ctrl");
  ASSERT_NE(ctrl, nullptr);
  EXPECT_EQ(ctrl->params.at("thresholds"), "[2,2] idle=3");
  const auto text = rtl::emit_module(*ctrl);
  EXPECT_NE(text.find("2'd2"), std::string::npos);
  EXPECT_NE(text.find("2'd3"), std::string::npos);
}

TEST(Lowering, ValidatesCleanly) {
  for (const auto& name : testing::valid_fixtures()) {
    auto d = lower(load_fixture(name));
    auto problems = rtl::validate(d);
    EXPECT_TRUE(problems.empty()) << name << ": " << (problems.empty() ? "" : problems[0]);
  }
}

TEST(Lowering, FifoFlavorFollowsCapacity) {
  EXPECT_EQ(fifo_flavor(16), FifoFlavor::RegisterFile);
  EXPECT_EQ(fifo_flavor(17), FifoFlavor::MemoryArray);
  LoweringOptions o;
  o.register_file_limit = 32;
  EXPECT_EQ(fifo_flavor(20, o), FifoFlavor::RegisterFile);

  auto g = load_fixture("dotp-20.json");
  auto d = lower(g);
  const auto* fifo = d.find("xs_0_to_zw_0_fifo");
  ASSERT_NE(fifo, nullptr);
  EXPECT_EQ(fifo->params.at("flavor"), "memory_array");
  EXPECT_EQ(fifo->params.at("depth"), "20");
}

TEST(Lowering, MultiplierTextMatchesDsp) {
  for (const auto& name : testing::valid_fixtures()) {
    auto g = load_fixture(name);
    auto caps = capacities(g);
    auto d = lower_graph(g, caps);
    EXPECT_EQ(static_cast<std::int64_t>(count_mul(d)), estimate_resources(g, caps).dsp_count) << name;
  }
}

TEST(Lowering, FiveMultiplierLanes) {
  auto g = load_fixture("dotp-5555.json");
  auto d = lower(g);
  std::size_t n = 0;
  for (const auto& f : rtl::emit_verilog(d))
    if (f.name == "zw_datapath.v")
      for (auto pos = f.text.find(" * "); pos != std::string::npos; pos = f.text.find(" * ", pos + 1)) ++n;
  EXPECT_EQ(n, 5u);
}

TEST(Emission, Deterministic) {
  for (const auto& name : testing::valid_fixtures()) {
    auto g = load_fixture(name);
    auto a = rtl::emit_verilog(lower(g));
    auto b = rtl::emit_verilog(lower(g));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].name, b[i].name);
      EXPECT_EQ(a[i].text, b[i].text) << name << " " << a[i].name;
    }
  }
}

TEST(Emission, WellFormedText) {
  auto files = rtl::emit_verilog(lower(load_fixture("com-shaped.json")));
  const std::regex header(R"(^module [A-Za-z_][A-Za-z0-9_]* \()");
  for (const auto& f : files) {
    EXPECT_TRUE(std::regex_search(f.text, header)) << f.name;
    EXPECT_NE(f.text.find("endmodule"), std::string::npos) << f.name;
    EXPECT_EQ(f.text.find('\r'), std::string::npos) << f.name;
    EXPECT_EQ(f.text.back(), '\n') << f.name;
  }
}

TEST(Emission, ManifestListsModules) {
  auto g = load_fixture("fig2.json");
  auto d = lower(g);
  auto m = design_manifest(d);
  EXPECT_EQ(m["top"], "fig2_top");
  ASSERT_EQ(m["modules"].size(), d.modules.size());
  EXPECT_EQ(m["modules"][0]["file"], d.modules[0].name + ".v");
}

TEST(LoweringErrors, CapacityMissing) {
  auto g = load_fixture("fig2.json");
  EXPECT_EQ(lower_error(g, {}), ErrorCode::CapacityMissing);
  EXPECT_EQ(lower_error(g, {0, 0}), ErrorCode::CapacityMissing);
}

TEST(LoweringErrors, NameCollision) {
  GraphDocument d;
  d.nodes = {{"x-y", "compute", 8, "1", {}, {{1}}},
             {"x_y", "compute", 8, "2", {}, {{1}}},
             {"o1", "sink", 8, "", {{1}}, {}},
             {"o2", "sink", 8, "", {{1}}, {}}};
  d.edges = {{"x-y.0", "o1.0"}, {"x_y.0", "o2.0"}};
  auto g = build_graph(d);
  EXPECT_EQ(lower_error(g, capacities(g)), ErrorCode::NameCollision);
}

TEST(Naming, Sanitize) {
  EXPECT_EQ(sanitize("a-b.c"), "a_b_c");
  EXPECT_EQ(sanitize("9lives"), "n_9lives");
  EXPECT_EQ(sanitize("ok_1"), "ok_1");
  auto g = load_fixture("fig2.json");
  EXPECT_EQ(edge_identifier(g, 0), "p_0_to_c_0");
}

TEST(Naming, CounterWidth) {
  EXPECT_EQ(counter_width(0), 1);
  EXPECT_EQ(counter_width(1), 1);
  EXPECT_EQ(counter_width(3), 2);
  EXPECT_EQ(counter_width(4), 3);
  EXPECT_EQ(counter_width(20), 5);
}

TEST(RtlValidate, CatchesBrokenDesigns) {
  rtl::Design d;
  rtl::Module m;
  m.name = "t";
  m.ports = {{"a", rtl::Dir::In, 4}, {"y", rtl::Dir::Out, 8}};
  m.outputs["y"] = rtl::ref("a", 4);  // width mismatch
  m.instances.push_back({"missing", "u0", {}});
  d.modules.push_back(m);
  d.top = "t";
  auto problems = rtl::validate(d);
  EXPECT_GE(problems.size(), 2u);

  m.instances.clear();
  m.outputs["y"] = rtl::resize(rtl::ref("a", 4), 8);
  d.modules[0] = m;
  EXPECT_TRUE(rtl::validate(d).empty());
  const auto text = rtl::emit_module(m);
  EXPECT_NE(text.find("output wire [7:0] y"), std::string::npos) << text;
}

TEST(RtlValidate, UndrivenOutput) {
  rtl::Design d;
  rtl::Module m;
  m.name = "t";
  m.ports = {{"y", rtl::Dir::Out, 1}};
  d.modules.push_back(m);
  d.top = "t";
  EXPECT_FALSE(rtl::validate(d).empty());
}

}  // namespace
}  // namespace sdfap

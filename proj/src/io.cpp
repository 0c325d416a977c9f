#include "sdfap/io.hpp"

#include <fstream>
#include <sstream>

#include "sdfap/error.hpp"

namespace sdfap {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

std::vector<std::vector<std::int64_t>> patterns_of(const json& j, const std::string& where) {
  std::vector<std::vector<std::int64_t>> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw Error(ErrorCode::ParseError, where + " must be an array of patterns");
  for (const auto& p : j) {
    if (!p.is_array()) throw Error(ErrorCode::ParseError, where + " must contain integer arrays");
    std::vector<std::int64_t> v;
    for (const auto& x : p) {
      if (!x.is_number_integer()) throw Error(ErrorCode::ParseError, where + " entries must be integers");
      v.push_back(x.get<std::int64_t>());
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

GraphDocument parse_graph_document(std::string_view text) {
  const auto j = parse_json(text);
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "graph document must be a JSON object");
  GraphDocument doc;
  try {
    if (auto m = j.find("meta"); m != j.end()) {
      doc.name = m->value("name", doc.name);
      doc.iterations = m->value("iterations", doc.iterations);
    }
    for (const auto& n : j.value("nodes", json::array())) {
      NodeDocument nd;
      nd.name = n.at("name").get<std::string>();
      nd.kind = n.at("kind").get<std::string>();
      nd.width = n.value("width", 8);
      nd.expr = n.value("expr", std::string{});
      nd.inputs = patterns_of(n.value("inputs", json()), "'" + nd.name + "'.inputs");
      nd.outputs = patterns_of(n.value("outputs", json()), "'" + nd.name + "'.outputs");
      doc.nodes.push_back(std::move(nd));
    }
    for (const auto& e : j.value("edges", json::array()))
      doc.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>()});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return doc;
}

GraphDocument load_graph_document(const std::filesystem::path& path) { return parse_graph_document(read_file(path)); }

Graph load_graph(const std::filesystem::path& path) { return build_graph(load_graph_document(path)); }

json schedule_to_json(const Schedule& s, const Graph& g) {
  json j;
  j["iterations"] = s.iterations;
  j["horizon"] = s.horizon;
  json starts = json::object();
  for (std::size_t n = 0; n < g.nodes.size(); ++n)
    if (g.nodes[n].kind != NodeKind::Sink) starts[g.nodes[n].name] = s.firing_starts[n];
  j["firing_starts"] = starts;
  json occ = json::object();
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (g.edges[e].kind != EdgeKind::SinkWire) occ[g.edge_name(e)] = s.occupancy[e];
  j["occupancy"] = occ;
  return j;
}

json timing_to_json(const TimingReport& r, const Graph& g) {
  json j;
  j["latency_cycles"] = r.latency_cycles;
  j["throughput"] = r.throughput;
  j["makespan"] = r.makespan;
  json caps = json::object();
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (g.edges[e].kind != EdgeKind::SinkWire) caps[g.edge_name(e)] = r.fifo_capacities[e];
  j["fifo_capacities"] = caps;
  return j;
}

json stimulus_to_json(const Stimulus& s) {
  json j = json::object();
  for (const auto& [name, firings] : s.firings) j[name] = firings;
  return j;
}

Stimulus stimulus_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "stimulus must map source names to lists of token vectors");
  Stimulus s;
  try {
    for (const auto& [name, firings] : j.items()) s.firings[name] = firings.get<std::vector<std::vector<Token>>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return s;
}

Stimulus load_stimulus(const std::filesystem::path& path) { return stimulus_from_json(parse_json(read_file(path))); }

json sim_result_to_json(const SimResult& r, const Graph& g) {
  json j;
  j["cycles"] = r.cycles;
  j["underflows"] = r.underflows;
  json sinks = json::object();
  for (const auto& [name, toks] : r.sinks) {
    json arr = json::array();
    for (const auto& t : toks) arr.push_back({{"value", t.value}, {"cycle", t.cycle}});
    sinks[name] = arr;
  }
  j["sinks"] = sinks;
  json starts = json::object();
  for (std::size_t n = 0; n < g.nodes.size(); ++n)
    if (g.nodes[n].kind != NodeKind::Sink) starts[g.nodes[n].name] = r.firing_starts[n];
  j["firing_starts"] = starts;
  return j;
}

}  // namespace sdfap

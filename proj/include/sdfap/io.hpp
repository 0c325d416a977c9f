#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sdfap/graph.hpp"
#include "sdfap/schedule.hpp"
#include "sdfap/value_sim.hpp"

namespace sdfap {

// Throws Error{ParseError} on malformed JSON or schema violations.
GraphDocument parse_graph_document(std::string_view json_text);
GraphDocument load_graph_document(const std::filesystem::path& path);
// parse + build_graph.
Graph load_graph(const std::filesystem::path& path);

nlohmann::json schedule_to_json(const Schedule& s, const Graph& g);
nlohmann::json timing_to_json(const TimingReport& r, const Graph& g);

nlohmann::json stimulus_to_json(const Stimulus& s);
Stimulus stimulus_from_json(const nlohmann::json& j);  // throws ParseError
Stimulus load_stimulus(const std::filesystem::path& path);
nlohmann::json sim_result_to_json(const SimResult& r, const Graph& g);

std::string read_file(const std::filesystem::path& path);  // throws ParseError

}  // namespace sdfap

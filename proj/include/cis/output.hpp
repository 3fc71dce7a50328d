#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cis/algorithms.hpp"
#include "cis/config.hpp"
#include "cis/geometry.hpp"

namespace cis {

inline constexpr int kSchemaVersion = 1;

/// {"lo":[...], "hi":[...]}
nlohmann::json to_json(const Box& b);
/// Array of boxes.
nlohmann::json to_json(const BoxUnion& u);
/// {"H":[[...]], "b":[...], "V":[[...]]}
nlohmann::json to_json(const geometry::Polytope& p);

Box box_from_json(const nlohmann::json& j);
BoxUnion box_union_from_json(const nlohmann::json& j, std::size_t dim);
geometry::Polytope polytope_from_json(const nlohmann::json& j, std::size_t dim);

/// The schema 1 document. Everything except stats.wall_ms depends only on
/// the config.
nlohmann::json make_output(const RunConfig& cfg, const RunResult& res);

/// Runs the configured algorithm.
RunResult execute(const RunConfig& cfg);

struct LoadedOutput {
  RunConfig config;
  BoxUnion cis;
  ControllerTable controller;
};
/// Throws ConfigError on schema mismatch.
LoadedOutput read_output(const nlohmann::json& j);

/// One row per output: Method | eps | Iterations | Time (s) | Volume.
std::string summarize(const std::vector<nlohmann::json>& outputs);

}  // namespace cis

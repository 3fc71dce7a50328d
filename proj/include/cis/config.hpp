#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cis/algorithms.hpp"
#include "cis/dynamics.hpp"

namespace cis {

enum class Algorithm { fixpoint, accelerated, baseline };

std::string to_string(Algorithm a);
/// Throws ConfigError for unknown names.
Algorithm algorithm_from_string(std::string_view name);

/// A run as written in a config file. Expressions are kept as source text so
/// that serializing reproduces the file's meaning exactly.
struct RunConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::string> f0;              ///< n entries
  std::vector<std::vector<std::string>> g;  ///< n rows of m entries
  Box U;
  std::vector<Box> omega;
  double epsilon = 0.0;
  Algorithm algorithm = Algorithm::fixpoint;
  std::optional<std::size_t> n_u;  ///< baseline only
  double margin_r = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string output;  ///< empty: not set

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Config file layout (TOML):
///
///   [system]
///   n = 2
///   m = 1
///   f0 = ["x1 + 0.01*x2", "..."]
///   g = [["0"], ["0.5*cos(x1)"]]
///   U = [[-0.1, 0.1]]
///
///   [omega]
///   boxes = [[[-0.05, 0.05], [-0.01, 0.01]]]
///
///   [run]
///   epsilon = 1e-3
///   algorithm = "fixpoint"   # fixpoint | accelerated | baseline
///   n_u = 10                 # required iff algorithm = "baseline"
///   margin_r = 0.0
///   seed = 0
///   threads = 1
///   output = "out.json"
///
/// Errors name the offending field, e.g. "run.epsilon: required".
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view text, std::string_view origin = "config");
std::string serialize_config(const RunConfig& cfg);

/// Same fields as the file, as JSON (output omitted). Inverse of config_from_json.
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

/// Checks every field and parses the expressions; throws ConfigError.
void validate(const RunConfig& cfg);
SystemModel build_model(const RunConfig& cfg);
Options build_options(const RunConfig& cfg);

}  // namespace cis

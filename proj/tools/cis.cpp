#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cis/config.hpp"
#include "cis/error.hpp"
#include "cis/output.hpp"

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cis::ConfigError(path + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw cis::ConfigError(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner approximations of controlled invariant sets for control-affine systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> algorithm;
  std::optional<double> epsilon;
  std::optional<std::size_t> n_u;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out_path;
  auto* run = app.add_subcommand("run", "Compute a controlled invariant set from a config file");
  run->add_option("config", config_path, "TOML config")->required();
  run->add_option("--algorithm", algorithm, "fixpoint | accelerated | baseline")
      ->check(CLI::IsMember({"fixpoint", "accelerated", "baseline"}));
  run->add_option("--epsilon", epsilon, "Bisection precision");
  run->add_option("--n-u", n_u, "Inputs per axis for the baseline");
  run->add_option("--seed", seed, "Seed stored with the run (used by verify)");
  run->add_option("--threads", threads, "Worker threads for fixpoint sweeps");
  run->add_option("--out", out_path, "Output JSON path (default: run.output, else stdout)");

  std::vector<std::string> summarize_paths;
  auto* summarize = app.add_subcommand("summarize", "Print a results table for run outputs");
  summarize->add_option("outputs", summarize_paths, "Output JSON files")->required();

  std::string verify_path;
  std::size_t trials = 1000;
  std::size_t horizon = 100;
  std::optional<std::uint64_t> verify_seed;
  auto* verify = app.add_subcommand("verify", "Simulate the closed loop from random states in the set");
  verify->add_option("output", verify_path, "Output JSON file")->required();
  verify->add_option("--trials", trials, "Initial states")->capture_default_str();
  verify->add_option("--horizon", horizon, "Steps per trajectory")->capture_default_str();
  verify->add_option("--seed", verify_seed, "Sampling seed (default: the run's seed)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cis::RunConfig cfg = cis::load_config(config_path);
      if (algorithm) {
        cfg.algorithm = cis::algorithm_from_string(*algorithm);
        if (cfg.algorithm != cis::Algorithm::baseline) cfg.n_u.reset();
      }
      if (n_u) cfg.n_u = *n_u;
      if (epsilon) cfg.epsilon = *epsilon;
      if (seed) cfg.seed = *seed;
      if (threads) cfg.threads = *threads;
      if (out_path) cfg.output = *out_path;
      cis::validate(cfg);

      const cis::RunResult res = cis::execute(cfg);
      const std::string text = cis::make_output(cfg, res).dump() + "\n";
      if (cfg.output.empty() || cfg.output == "-") {
        std::cout << text;
      } else {
        std::ofstream out(cfg.output);
        if (!out) throw cis::ConfigError(cfg.output + ": cannot write");
        out << text;
      }
      const auto& s = res.stats;
      std::cerr << cis::to_string(cfg.algorithm) << ": " << s.pops << " pops, " << s.sweeps << " sweeps, "
                << s.wall_ms / 1000.0 << " s, volume " << 100.0 * s.cis_volume / s.omega_volume << "% of omega, rho "
                << s.rho << "\n";
    } else if (*summarize) {
      std::vector<nlohmann::json> docs;
      for (const auto& p : summarize_paths) docs.push_back(read_json(p));
      std::cout << cis::summarize(docs);
    } else if (*verify) {
      const auto loaded = cis::read_output(read_json(verify_path));
      const cis::SystemModel model = cis::build_model(loaded.config);
      const auto rep = cis::verify_invariance(loaded.cis, loaded.controller, model, trials, horizon,
                                              verify_seed.value_or(loaded.config.seed));
      std::cout << "trials " << rep.trials << ", passed " << rep.passed << ", failed " << rep.failed << " (uncovered "
                << rep.uncovered << "), steps " << rep.steps << ", worst margin " << rep.worst_margin << "\n";
      return rep.failed == 0 ? 0 : 1;
    }
  } catch (const cis::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

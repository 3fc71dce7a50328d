#include "cis/config.hpp"

#include <cmath>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "cis/error.hpp"

namespace cis {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

json toml_to_json(const toml::node& node, const std::string& path) {
  if (const auto* t = node.as_table()) {
    json j = json::object();
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      j[key] = toml_to_json(v, path.empty() ? key : path + "." + key);
    }
    return j;
  }
  if (const auto* a = node.as_array()) {
    json j = json::array();
    for (std::size_t i = 0; i < a->size(); ++i) j.push_back(toml_to_json(*a->get(i), path + "[" + std::to_string(i) + "]"));
    return j;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  fail(path, "dates and times are not supported");
}

void only_keys(const json& table, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : table.items()) {
    if (!ok.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
  }
}

const json& table(const json& parent, const std::string& key) {
  if (!parent.contains(key)) fail(key, "required");
  const json& t = parent.at(key);
  if (!t.is_object()) fail(key, "expected a table");
  return t;
}

const json& field(const json& t, const std::string& path, const std::string& key) {
  if (!t.contains(key)) fail(path + "." + key, "required");
  return t.at(key);
}

double real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "must be finite");
  return d;
}

std::uint64_t count(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto i = v.get<std::int64_t>();
  if (i < 0) fail(path, "must be non-negative");
  return static_cast<std::uint64_t>(i);
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// [[lo, hi], ...]
Box box(const json& v, const std::string& path) {
  array(v, path);
  if (v.empty()) fail(path, "a box needs at least one axis");
  std::vector<Interval> axes;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = at(path, i);
    const json& pair = array(v[i], p);
    if (pair.size() != 2) fail(p, "expected [lo, hi]");
    const double lo = real(pair[0], at(p, 0));
    const double hi = real(pair[1], at(p, 1));
    if (lo > hi) fail(p, "lo exceeds hi");
    axes.emplace_back(lo, hi);
  }
  return Box(std::move(axes));
}

json box_pairs(const Box& b) {
  json j = json::array();
  for (const auto& I : b.axes()) j.push_back({I.lo(), I.hi()});
  return j;
}

RunConfig from_json(const json& j, bool allow_output) {
  if (!j.is_object()) fail("config", "expected a table");
  only_keys(j, "", {"system", "omega", "run"});
  RunConfig c;

  const json& sys = table(j, "system");
  only_keys(sys, "system", {"n", "m", "f0", "g", "U"});
  c.n = count(field(sys, "system", "n"), "system.n");
  c.m = count(field(sys, "system", "m"), "system.m");
  const json& f0 = array(field(sys, "system", "f0"), "system.f0");
  for (std::size_t k = 0; k < f0.size(); ++k) c.f0.push_back(text(f0[k], at("system.f0", k)));
  const json& g = array(field(sys, "system", "g"), "system.g");
  for (std::size_t k = 0; k < g.size(); ++k) {
    const json& row = array(g[k], at("system.g", k));
    std::vector<std::string> r;
    for (std::size_t i = 0; i < row.size(); ++i) r.push_back(text(row[i], at(at("system.g", k), i)));
    c.g.push_back(std::move(r));
  }
  c.U = box(field(sys, "system", "U"), "system.U");

  const json& om = table(j, "omega");
  only_keys(om, "omega", {"boxes"});
  const json& boxes = array(field(om, "omega", "boxes"), "omega.boxes");
  for (std::size_t i = 0; i < boxes.size(); ++i) c.omega.push_back(box(boxes[i], at("omega.boxes", i)));

  const json& run = table(j, "run");
  if (allow_output) {
    only_keys(run, "run", {"epsilon", "algorithm", "n_u", "margin_r", "seed", "threads", "output"});
  } else {
    only_keys(run, "run", {"epsilon", "algorithm", "n_u", "margin_r", "seed", "threads"});
  }
  c.epsilon = real(field(run, "run", "epsilon"), "run.epsilon");
  if (run.contains("algorithm")) {
    const std::string name = text(run.at("algorithm"), "run.algorithm");
    try {
      c.algorithm = algorithm_from_string(name);
    } catch (const ConfigError& e) {
      fail("run.algorithm", e.what());
    }
  }
  if (run.contains("n_u") && !run.at("n_u").is_null()) c.n_u = count(run.at("n_u"), "run.n_u");
  if (run.contains("margin_r")) c.margin_r = real(run.at("margin_r"), "run.margin_r");
  if (run.contains("seed")) c.seed = count(run.at("seed"), "run.seed");
  if (run.contains("threads")) c.threads = count(run.at("threads"), "run.threads");
  if (run.contains("output")) c.output = text(run.at("output"), "run.output");

  validate(c);
  return c;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::fixpoint:
      return "fixpoint";
    case Algorithm::accelerated:
      return "accelerated";
    case Algorithm::baseline:
      return "baseline";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "fixpoint") return Algorithm::fixpoint;
  if (name == "accelerated") return Algorithm::accelerated;
  if (name == "baseline") return Algorithm::baseline;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected fixpoint, accelerated or baseline)");
}

void validate(const RunConfig& c) {
  if (c.n == 0) fail("system.n", "must be at least 1");
  if (c.m == 0) fail("system.m", "must be at least 1");
  if (c.f0.size() != c.n) fail("system.f0", "expected " + std::to_string(c.n) + " expressions");
  if (c.g.size() != c.n) fail("system.g", "expected " + std::to_string(c.n) + " rows");
  for (std::size_t k = 0; k < c.n; ++k) {
    if (c.g[k].size() != c.m) fail(at("system.g", k), "expected " + std::to_string(c.m) + " expressions");
  }
  auto check_expr = [&](const std::string& src, const std::string& path) {
    try {
      (void)expr::parse(src, c.n);
    } catch (const ParseError& e) {
      fail(path, e.what());
    }
  };
  for (std::size_t k = 0; k < c.n; ++k) {
    check_expr(c.f0[k], at("system.f0", k));
    for (std::size_t i = 0; i < c.m; ++i) check_expr(c.g[k][i], at(at("system.g", k), i));
  }
  if (c.U.dim() != c.m) fail("system.U", "expected " + std::to_string(c.m) + " intervals");
  if (c.omega.empty()) fail("omega.boxes", "at least one box required");
  for (std::size_t i = 0; i < c.omega.size(); ++i) {
    if (c.omega[i].dim() != c.n) fail(at("omega.boxes", i), "expected " + std::to_string(c.n) + " intervals");
  }
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) fail("run.epsilon", "must be positive");
  if (c.algorithm == Algorithm::baseline && !c.n_u) fail("run.n_u", "required for algorithm baseline");
  if (c.algorithm != Algorithm::baseline && c.n_u) fail("run.n_u", "only valid for algorithm baseline");
  if (c.n_u && *c.n_u == 0) fail("run.n_u", "must be at least 1");
  if (!(c.margin_r >= 0.0) || !std::isfinite(c.margin_r)) fail("run.margin_r", "must be non-negative");
  if (c.threads == 0) fail("run.threads", "must be at least 1");
  if (c.seed > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    fail("run.seed", "must fit a signed 64-bit integer");
  }
}

RunConfig parse_config(std::string_view text_in, std::string_view origin) {
  toml::table doc;
  try {
    doc = toml::parse(text_in, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  return from_json(toml_to_json(doc, ""), true);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

// JSON scalars and arrays of them are valid TOML values.
std::string serialize_config(const RunConfig& c) {
  const json j = config_to_json(c);
  std::ostringstream os;
  os << "[system]\n";
  for (const char* k : {"n", "m", "f0", "g", "U"}) os << k << " = " << j["system"][k].dump() << "\n";
  os << "\n[omega]\nboxes = [\n";
  for (const auto& b : j["omega"]["boxes"]) os << "  " << b.dump() << ",\n";
  os << "]\n\n[run]\n";
  for (const char* k : {"epsilon", "algorithm", "n_u", "margin_r", "seed", "threads"}) {
    if (j["run"].contains(k)) os << k << " = " << j["run"][k].dump() << "\n";
  }
  if (!c.output.empty()) os << "output = " << json(c.output).dump() << "\n";
  return os.str();
}

json config_to_json(const RunConfig& c) {
  json boxes = json::array();
  for (const auto& b : c.omega) boxes.push_back(box_pairs(b));
  json run = {{"epsilon", c.epsilon},
              {"algorithm", to_string(c.algorithm)},
              {"margin_r", c.margin_r},
              {"seed", c.seed},
              {"threads", c.threads}};
  if (c.n_u) run["n_u"] = *c.n_u;
  return {{"system", {{"n", c.n}, {"m", c.m}, {"f0", c.f0}, {"g", c.g}, {"U", box_pairs(c.U)}}},
          {"omega", {{"boxes", boxes}}},
          {"run", run}};
}

RunConfig config_from_json(const json& j) { return from_json(j, false); }

SystemModel build_model(const RunConfig& c) {
  validate(c);
  SystemModel model;
  model.n = c.n;
  model.m = c.m;
  for (const auto& s : c.f0) model.f0.push_back(expr::parse(s, c.n));
  for (const auto& row : c.g) {
    for (const auto& s : row) model.g.push_back(expr::parse(s, c.n));
  }
  model.U = c.U;
  model.omega = BoxUnion(c.omega);
  model.validate();
  return model;
}

Options build_options(const RunConfig& c) {
  Options opt;
  opt.epsilon = c.epsilon;
  opt.margin_r = c.margin_r;
  opt.threads = c.threads;
  return opt;
}

}  // namespace cis

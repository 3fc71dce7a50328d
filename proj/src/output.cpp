#include "cis/output.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cis/error.hpp"

namespace cis {

using geometry::Polytope;
using geometry::Vector;
using nlohmann::json;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(std::string(what) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// Display width of UTF-8 text, one column per code point.
std::size_t columns(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::string pad(const std::string& s, std::size_t w, bool right) {
  const std::string fill(w > columns(s) ? w - columns(s) : 0, ' ');
  return right ? fill + s : s + fill;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

json to_json(const Box& b) { return {{"lo", b.lo()}, {"hi", b.hi()}}; }

json to_json(const BoxUnion& u) {
  json j = json::array();
  for (const auto& b : u.boxes()) j.push_back(to_json(b));
  return j;
}

json to_json(const Polytope& p) {
  json H = json::array();
  for (Eigen::Index i = 0; i < p.H().rows(); ++i) H.push_back(to_std(p.H().row(i).transpose()));
  json V = json::array();
  for (const auto& v : p.vertices()) V.push_back(to_std(v));
  return {{"H", H}, {"b", to_std(p.b())}, {"V", V}};
}

Box box_from_json(const json& j) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) throw ConfigError("box: expected {\"lo\", \"hi\"}");
  const auto lo = numbers(j.at("lo"), "box.lo");
  const auto hi = numbers(j.at("hi"), "box.hi");
  if (lo.size() != hi.size()) throw ConfigError("box: lo and hi differ in length");
  std::vector<Interval> axes;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) throw ConfigError("box: lo exceeds hi");
    axes.emplace_back(lo[i], hi[i]);
  }
  return Box(std::move(axes));
}

BoxUnion box_union_from_json(const json& j, std::size_t dim) {
  if (!j.is_array()) throw ConfigError("box union: expected an array");
  BoxUnion u(dim);
  for (const auto& b : j) {
    Box box = box_from_json(b);
    if (box.dim() != dim) throw ConfigError("box union: wrong dimension");
    u.add(std::move(box));
  }
  return u;
}

// The vertex list is authoritative; H and b are derived from it.
Polytope polytope_from_json(const json& j, std::size_t dim) {
  if (!j.is_object() || !j.contains("V")) throw ConfigError("polytope: expected {\"H\", \"b\", \"V\"}");
  std::vector<Vector> pts;
  for (const auto& v : j.at("V")) {
    const auto p = numbers(v, "polytope.V");
    if (p.size() != dim) throw ConfigError("polytope: vertex of wrong dimension");
    pts.push_back(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
  }
  return pts.empty() ? Polytope::empty(dim) : Polytope::from_points(pts, dim);
}

RunResult execute(const RunConfig& cfg) {
  const SystemModel model = build_model(cfg);
  const Options opt = build_options(cfg);
  switch (cfg.algorithm) {
    case Algorithm::fixpoint:
      return fixpoint(model.omega, model, opt);
    case Algorithm::accelerated:
      return accelerated(model.omega, model, opt);
    case Algorithm::baseline:
      return baseline_sampled(model.omega, model, opt, *cfg.n_u);
  }
  throw ConfigError("unknown algorithm");
}

json make_output(const RunConfig& cfg, const RunResult& res) {
  json controller = json::array();
  for (const auto& e : res.controller) {
    json parts = json::array();
    for (const auto& p : e.inputs.parts()) parts.push_back(to_json(p));
    controller.push_back({{"box", to_json(e.box)}, {"inputs", parts}});
  }
  json excluded = json::array();
  for (const auto& b : res.excluded) excluded.push_back(to_json(b));
  json indeterminate = json::array();
  for (const auto& b : res.indeterminate) indeterminate.push_back(to_json(b));
  const auto& s = res.stats;
  const double fraction = s.omega_volume > 0.0 ? s.cis_volume / s.omega_volume : 0.0;
  return {{"schema", kSchemaVersion},
          {"config", config_to_json(cfg)},
          {"cis", to_json(res.cis)},
          {"controller", controller},
          {"excluded", excluded},
          {"indeterminate", indeterminate},
          {"stats",
           {{"pops", s.pops},
            {"sweeps", s.sweeps},
            {"wall_ms", std::llround(s.wall_ms)},
            {"volume_fraction", fraction},
            {"rho", s.rho},
            {"r", s.r},
            {"omega_volume", s.omega_volume},
            {"cis_volume", s.cis_volume},
            {"excluded_volume", s.excluded_volume},
            {"indeterminate_volume", s.indeterminate_volume}}}};
}

LoadedOutput read_output(const json& j) {
  if (!j.is_object() || !j.contains("schema")) throw ConfigError("output: missing schema field");
  if (j.at("schema") != kSchemaVersion) throw ConfigError("output: unsupported schema " + j.at("schema").dump());
  for (const char* k : {"config", "cis", "controller"}) {
    if (!j.contains(k)) throw ConfigError(std::string("output: missing ") + k);
  }
  LoadedOutput out;
  out.config = config_from_json(j.at("config"));
  out.cis = box_union_from_json(j.at("cis"), out.config.n);
  for (const auto& e : j.at("controller")) {
    ControllerEntry entry{box_from_json(e.at("box")), geometry::PolyUnion(out.config.m)};
    for (const auto& p : e.at("inputs")) entry.inputs.add(polytope_from_json(p, out.config.m));
    out.controller.push_back(std::move(entry));
  }
  return out;
}

std::string summarize(const std::vector<json>& outputs) {
  std::vector<std::vector<std::string>> rows{{"Method", "ε", "Iterations", "Time (s)", "Volume"}};
  for (const auto& j : outputs) {
    if (!j.is_object() || j.value("schema", 0) != kSchemaVersion) throw ConfigError("summarize: not a schema 1 output");
    const auto& run = j.at("config").at("run");
    const auto& st = j.at("stats");
    std::string method = run.at("algorithm").get<std::string>();
    if (run.contains("n_u")) method += " (n_u = " + run.at("n_u").dump() + ")";
    rows.push_back({method, fmt("%g", run.at("epsilon").get<double>()), st.at("pops").dump(),
                    fmt("%.3f", st.at("wall_ms").get<double>() / 1000.0),
                    fmt("%.1f%%", 100.0 * st.at("volume_fraction").get<double>())});
  }
  std::vector<std::size_t> w(rows.front().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], columns(r[c]));
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      if (c) os << " | ";
      os << pad(rows[i][c], w[c], c > 0 && i > 0);
    }
    os << "\n";
    if (i == 0) {
      for (std::size_t c = 0; c < w.size(); ++c) os << (c ? "-+-" : "") << std::string(w[c], '-');
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace cis

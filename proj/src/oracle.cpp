#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cis/algorithms.hpp"
#include "cis/error.hpp"

namespace cis {

namespace {

// Flat index with axis 0 fastest.
std::size_t flat(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& cells) {
  std::size_t k = 0;
  for (std::size_t a = cells.size(); a-- > 0;) k = k * cells[a] + idx[a];
  return k;
}

Box cell_box(const GridOracle& g, const std::vector<std::size_t>& idx) {
  const auto h = g.cell_size();
  std::vector<Interval> axes;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const double lo = g.frame[a].lo() + h[a] * static_cast<double>(idx[a]);
    const double hi = idx[a] + 1 == g.cells[a] ? g.frame[a].hi() : lo + h[a];
    axes.emplace_back(lo, hi);
  }
  return Box(std::move(axes));
}

bool advance(std::vector<std::size_t>& idx, const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) {
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (++idx[a] < hi[a]) return true;
    idx[a] = lo[a];
  }
  return false;
}

// Summed-area table over kept cells, padded by one on every axis.
struct Prefix {
  std::vector<std::size_t> dims;
  std::vector<long> sum;

  explicit Prefix(const GridOracle& g) {
    for (auto c : g.cells) dims.push_back(c + 1);
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    sum.assign(total, 0);
    std::vector<std::size_t> idx(dims.size(), 0);
    std::vector<std::size_t> zero(dims.size(), 0);
    do {
      bool edge = false;
      for (auto i : idx) edge = edge || i == 0;
      if (edge) continue;
      std::vector<std::size_t> cell(idx);
      for (auto& c : cell) --c;
      long v = g.kept[flat(cell, g.cells)];
      // Inclusion-exclusion over the lower neighbours.
      const std::size_t n = dims.size();
      for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> q(idx);
        int bits = 0;
        for (std::size_t a = 0; a < n; ++a) {
          if (mask >> a & 1) {
            --q[a];
            ++bits;
          }
        }
        v += (bits % 2 ? 1 : -1) * sum[flat(q, dims)];
      }
      sum[flat(idx, dims)] = v;
    } while (advance(idx, zero, dims));
  }

  // Kept cells with index in [lo, hi) per axis.
  long count(const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) const {
    const std::size_t n = dims.size();
    long v = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::vector<std::size_t> q(n);
      int bits = 0;
      for (std::size_t a = 0; a < n; ++a) {
        if (mask >> a & 1) {
          q[a] = lo[a];
          ++bits;
        } else {
          q[a] = hi[a];
        }
      }
      v += (bits % 2 ? -1 : 1) * sum[flat(q, dims)];
    }
    return v;
  }
};

}  // namespace

std::vector<double> GridOracle::cell_size() const {
  std::vector<double> h;
  for (std::size_t a = 0; a < cells.size(); ++a) h.push_back(frame[a].width() / static_cast<double>(cells[a]));
  return h;
}

BoxUnion GridOracle::region() const {
  BoxUnion out(frame.dim());
  std::vector<std::size_t> idx(cells.size(), 0);
  std::vector<std::size_t> zero(cells.size(), 0);
  do {
    if (kept[flat(idx, cells)]) out.add(cell_box(*this, idx));
  } while (advance(idx, zero, cells));
  return out;
}

double GridOracle::distance(std::span<const double> p) const {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(cells.size(), 0);
  std::vector<std::size_t> zero(cells.size(), 0);
  do {
    if (!kept[flat(idx, cells)]) continue;
    const Box c = cell_box(*this, idx);
    double d = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) d = std::max({d, c[a].lo() - p[a], p[a] - c[a].hi()});
    best = std::min(best, d);
  } while (advance(idx, zero, cells));
  return best;
}

GridOracle brute_force_cis(const SystemModel& model, const BoxUnion& omega, std::size_t cells_per_axis,
                           std::size_t inputs_per_axis) {
  model.validate();
  if (cells_per_axis == 0) throw DomainError("oracle needs at least one cell per axis");
  const auto bb = omega.bounding_box();
  if (!bb) throw DomainError("oracle needs a nonempty omega");
  const std::size_t n = model.n;
  const std::size_t m = model.m;

  GridOracle g;
  g.frame = *bb;
  g.cells.assign(n, cells_per_axis);
  std::size_t total = 1;
  for (auto c : g.cells) total *= c;
  g.kept.assign(total, 0);
  const auto h = g.cell_size();

  const auto grid = input_grid(model.U, inputs_per_axis);
  std::vector<double> du(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    du[i] = inputs_per_axis > 1 ? model.U[i].width() / static_cast<double>(inputs_per_axis - 1) : model.U[i].width();
  }

  // |f(x,u) - f(c,v)|_k <= sum_j L_kj h_j/2 + sum_i |g_ki| du_i/2 for x in the
  // cell of c and v the grid input nearest u.
  g.slack.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const Box jf = expr::eval_gradient_interval(model.f0[k], g.frame);
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = jf[j].mag();
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Box jg = expr::eval_gradient_interval(model.g_at(k, i), g.frame);
      for (std::size_t j = 0; j < n; ++j) row[j] += jg[j].mag() * model.U[i].mag();
      s += expr::eval_interval(model.g_at(k, i), g.frame, model.inclusion).mag() * du[i] / 2.0;
    }
    for (std::size_t j = 0; j < n; ++j) s += row[j] * h[j] / 2.0;
    g.slack[k] = s * (1.0 + 1e-9);
  }

  std::vector<std::size_t> idx(n, 0);
  std::vector<std::size_t> zero(n, 0);
  std::vector<std::vector<double>> centers(total);
  do {
    const Box c = cell_box(g, idx);
    const auto k = flat(idx, g.cells);
    centers[k] = c.midpoint();
    // Any overlap with omega of positive measure keeps the cell.
    for (const auto& b : omega.boxes()) {
      const auto o = intersect(b, c);
      if (o && o->volume() > 0.0) g.kept[k] = 1;
    }
  } while (advance(idx, zero, g.cells));

  for (bool changed = true; changed;) {
    changed = false;
    ++g.rounds;
    const Prefix pre(g);
    std::vector<char> next = g.kept;
    for (std::size_t k = 0; k < total; ++k) {
      if (!g.kept[k]) continue;
      bool ok = false;
      for (const auto& u : grid) {
        const auto y = model.step(centers[k], u);
        std::vector<std::size_t> lo(n);
        std::vector<std::size_t> hi(n);
        bool empty = false;
        for (std::size_t a = 0; a < n; ++a) {
          const double a0 = (y[a] - g.slack[a] - g.frame[a].lo()) / h[a];
          const double a1 = (y[a] + g.slack[a] - g.frame[a].lo()) / h[a];
          const double c = static_cast<double>(g.cells[a]);
          if (a1 < 0.0 || a0 > c) {
            empty = true;
            break;
          }
          lo[a] = static_cast<std::size_t>(std::clamp(std::floor(a0), 0.0, c - 1.0));
          hi[a] = static_cast<std::size_t>(std::clamp(std::floor(a1), 0.0, c - 1.0)) + 1;
        }
        if (!empty && pre.count(lo, hi) > 0) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        next[k] = 0;
        changed = true;
      }
    }
    g.kept = std::move(next);
  }
  return g;
}

VerifyReport verify_invariance(const BoxUnion& cis, const ControllerTable& table, const SystemModel& model,
                               std::size_t trials, std::size_t horizon, std::uint64_t seed) {
  constexpr double tol = 1e-9;
  VerifyReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  if (cis.empty()) return rep;

  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  for (const auto& b : cis.boxes()) weights.push_back(b.volume());
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  auto covering = [&](const std::vector<double>& x) -> const ControllerEntry* {
    for (const auto& e : table) {
      if (!e.inputs.empty() && e.box.contains(x, tol)) return &e;
    }
    return nullptr;
  };

  for (std::size_t t = 0; t < trials; ++t) {
    ++rep.trials;
    const Box& b = cis.boxes()[pick(rng)];
    std::vector<double> x(model.n);
    for (std::size_t a = 0; a < model.n; ++a) x[a] = std::uniform_real_distribution<double>(b[a].lo(), b[a].hi())(rng);
    bool ok = true;
    for (std::size_t s = 0; s < horizon && ok; ++s) {
      const ControllerEntry* e = covering(x);
      if (!e) {
        ok = false;
        ++rep.uncovered;
        break;
      }
      double depth = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < model.n; ++a) depth = std::min({depth, x[a] - e->box[a].lo(), e->box[a].hi() - x[a]});
      rep.worst_margin = std::min(rep.worst_margin, depth);
      const geometry::Vector c = e->inputs.parts().front().centroid();
      x = model.step(x, std::span<const double>(c.data(), static_cast<std::size_t>(c.size())));
      ++rep.steps;
      if (!cis.contains(x, tol)) ok = false;
    }
    if (ok && !covering(x)) {
      ok = false;
      ++rep.uncovered;
    }
    ok ? ++rep.passed : ++rep.failed;
  }
  return rep;
}

}  // namespace cis

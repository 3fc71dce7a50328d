#include "cis/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cis/error.hpp"

namespace cis {

using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;

void SystemModel::validate() const {
  if (n == 0) throw DimensionError("state dimension must be at least 1");
  if (m == 0) throw DimensionError("input dimension must be at least 1");
  if (f0.size() != n) throw DimensionError("f0 needs " + std::to_string(n) + " components, got " + std::to_string(f0.size()));
  if (g.size() != n * m) {
    throw DimensionError("g needs " + std::to_string(n) + "x" + std::to_string(m) + " entries, got " + std::to_string(g.size()));
  }
  for (const auto& e : f0) {
    if (e.arity() > n) throw DimensionError("f0 references x" + std::to_string(e.arity()) + " beyond n = " + std::to_string(n));
  }
  for (const auto& e : g) {
    if (e.arity() > n) throw DimensionError("g references x" + std::to_string(e.arity()) + " beyond n = " + std::to_string(n));
  }
  if (U.dim() != m) throw DimensionError("U must have dimension m");
  if (omega.dim() != n) throw DimensionError("omega must have dimension n");
  if (omega.empty()) throw DomainError("omega is empty");
}

std::vector<double> SystemModel::step(std::span<const double> x, std::span<const double> u) const {
  if (x.size() != n || u.size() != m) throw DimensionError("step: wrong state or input size");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double v = expr::eval_real(f0[k], x);
    for (std::size_t i = 0; i < m; ++i) v += expr::eval_real(g_at(k, i), x) * u[i];
    out[k] = v;
  }
  return out;
}

Box SystemModel::step_box(const Box& x, std::span<const double> u) const {
  if (x.dim() != n || u.size() != m) throw DimensionError("step_box: wrong state or input size");
  std::vector<Interval> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Interval v = expr::eval_interval(f0[k], x, inclusion);
    for (std::size_t i = 0; i < m; ++i) {
      if (u[i] != 0.0) v += expr::eval_interval(g_at(k, i), x, inclusion) * Interval(u[i]);
    }
    out.push_back(v);
  }
  return Box(std::move(out));
}

LinearPart decompose_f0(const SystemModel& model, const Box& x) {
  const std::size_t n = model.n;
  const auto mid = x.midpoint();
  const Box at_mid = Box::point(mid);
  LinearPart out{Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), Box()};
  try {
    std::vector<Interval> phi;
    phi.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto grad = expr::eval_gradient(model.f0[k], mid);
      const Box jac = expr::eval_gradient_interval(model.f0[k], x);
      Interval acc = expr::eval_interval(model.f0[k], at_mid);
      for (std::size_t j = 0; j < n; ++j) {
        const double a = grad[j];
        out.A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = a;
        acc -= Interval(a) * Interval(mid[j]);
        acc += (jac[j] - Interval(a)) * (x[j] - Interval(mid[j]));
      }
      phi.push_back(acc);
    }
    out.Phi = Box(std::move(phi));
  } catch (const DomainError&) {
    out.A.setZero();
    std::vector<Interval> phi;
    for (std::size_t k = 0; k < n; ++k) phi.push_back(expr::eval_interval(model.f0[k], x, model.inclusion));
    out.Phi = Box(std::move(phi));
  }
  return out;
}

InputPart decompose_g(const SystemModel& model, const Box& x) {
  const auto n = static_cast<Eigen::Index>(model.n);
  const auto m = static_cast<Eigen::Index>(model.m);
  InputPart out{Matrix(n, m), {}};
  out.Psi.reserve(model.g.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Interval G = expr::eval_interval(model.g_at(static_cast<std::size_t>(k), static_cast<std::size_t>(i)), x, model.inclusion);
      const double s = G.mid();
      double r = std::max(G.hi() - s, s - G.lo());
      if (r > 0.0) r = std::nextafter(r, std::numeric_limits<double>::infinity());
      out.S(k, i) = s;
      out.Psi.emplace_back(-r, r);
    }
  }
  return out;
}

AffineDecomposition decompose(const SystemModel& model, const Box& x) {
  auto lin = decompose_f0(model, x);
  auto inp = decompose_g(model, x);
  return {x, std::move(lin.A), std::move(lin.Phi), std::move(inp.S), std::move(inp.Psi)};
}

WidthBounds width_bounds(const SystemModel& model, const BoxUnion& omega) {
  const auto bb = omega.bounding_box();
  if (!bb) throw DomainError("width bounds need a nonempty region");
  WidthBounds out;
  // w(([J]([x]) - A)([x] - mid)) <= w([J](Omega)) w([x]) per term, since A lies in [J](Omega).
  double l0 = 0.0;
  for (std::size_t k = 0; k < model.n; ++k) {
    const Box jac = expr::eval_gradient_interval(model.f0[k], *bb);
    double row = 0.0;
    for (std::size_t j = 0; j < model.n; ++j) row += jac[j].width();
    l0 = std::max(l0, row);
  }
  out.Ltilde.push_back(l0);
  // Mean-value width of [g]([x]): sum_j 2 |dg/dx_j| rad_j <= (sum_j |dg/dx_j|) w([x]).
  double worst = 0.0;
  for (std::size_t i = 0; i < model.m; ++i) {
    double li = 0.0;
    for (std::size_t k = 0; k < model.n; ++k) {
      const Box jac = expr::eval_gradient_interval(model.g_at(k, i), *bb);
      double row = 0.0;
      for (std::size_t j = 0; j < model.n; ++j) row += jac[j].mag();
      li = std::max(li, row);
    }
    out.Ltilde.push_back(li);
    worst = std::max(worst, li * model.U[i].width());
  }
  out.rho = l0 + worst;
  return out;
}

Polytope reach_P0(const AffineDecomposition& dec, const Box& U) {
  const std::size_t n = dec.box.dim();
  const Polytope ax = geometry::linear_image(dec.A, Polytope::from_box(dec.box));
  const Box psi_u = interval_matrix_times_box(dec.Psi, n, U.dim(), U);
  std::vector<Interval> extra;
  extra.reserve(n);
  for (std::size_t k = 0; k < n; ++k) extra.push_back(dec.Phi[k] + psi_u[k]);
  return geometry::minkowski_sum(ax, Polytope::from_box(Box(std::move(extra))));
}

Polytope reach_full(const Polytope& P0, const AffineDecomposition& dec, const Box& U) {
  return geometry::minkowski_sum(P0, geometry::linear_image(dec.S, Polytope::from_box(U)));
}

Polytope reach_full(const AffineDecomposition& dec, const Box& U) { return reach_full(reach_P0(dec, U), dec, U); }

Polytope reach_fixed(const AffineDecomposition& dec, const Box& U, std::span<const double> u) {
  if (!U.contains(u, 1e-12)) throw DomainError("input outside U");
  const Vector uv = Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(u.size()));
  return reach_P0(dec, U).translated(dec.S * uv);
}

}  // namespace cis

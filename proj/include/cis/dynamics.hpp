#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cis/expr.hpp"
#include "cis/geometry.hpp"
#include "cis/interval.hpp"

namespace cis {

/// x+ = f0(x) + sum_i g_i(x) u_i, with u in the box U.
struct SystemModel {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<expr::Expr> f0;  ///< n entries
  std::vector<expr::Expr> g;   ///< n x m, row-major: g[k * m + i] is component k of g_i
  Box U;
  BoxUnion omega;
  expr::Inclusion inclusion = expr::Inclusion::best;

  const expr::Expr& g_at(std::size_t row, std::size_t col) const { return g[row * m + col]; }

  /// Throws DimensionError / DomainError on inconsistent data.
  void validate() const;

  /// True dynamics at a point.
  std::vector<double> step(std::span<const double> x, std::span<const double> u) const;
  /// Interval image of [x] under a fixed input u (no polytopes).
  Box step_box(const Box& x, std::span<const double> u) const;
};

/// Per-box data with f0([x]) in A[x] + Phi and g_i([x]) in s_i + Psi_i.
struct AffineDecomposition {
  Box box;
  geometry::Matrix A;
  Box Phi;
  geometry::Matrix S;
  std::vector<Interval> Psi;  ///< n x m, row-major, every entry centered at 0
};

struct LinearPart {
  geometry::Matrix A;
  Box Phi;
};

struct InputPart {
  geometry::Matrix S;
  std::vector<Interval> Psi;
};

/// Midpoint linearization with a mean-value remainder. Falls back to A = 0,
/// Phi = [f0]([x]) when f0 has no derivative somewhere on the box.
LinearPart decompose_f0(const SystemModel& model, const Box& x);
InputPart decompose_g(const SystemModel& model, const Box& x);
AffineDecomposition decompose(const SystemModel& model, const Box& x);

struct WidthBounds {
  std::vector<double> Ltilde;  ///< L~0 for f0, then one per input column
  double rho = 0.0;
};

/// Constants valid for every sub-box of the bounding box of `omega`:
/// w(Phi) <= L~0 w([x]) and w(Psi_i) <= L~i w([x]).
WidthBounds width_bounds(const SystemModel& model, const BoxUnion& omega);

/// A[x] + Phi + Psi U
geometry::Polytope reach_P0(const AffineDecomposition& dec, const Box& U);
/// P0 + S U
geometry::Polytope reach_full(const AffineDecomposition& dec, const Box& U);
geometry::Polytope reach_full(const geometry::Polytope& P0, const AffineDecomposition& dec, const Box& U);
/// P0 + {S u}; throws DomainError when u is outside U.
geometry::Polytope reach_fixed(const AffineDecomposition& dec, const Box& U, std::span<const double> u);

}  // namespace cis

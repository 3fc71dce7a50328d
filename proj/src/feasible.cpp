#include <algorithm>
#include <limits>
#include <sstream>

#include "cis/algorithms.hpp"
#include "cis/error.hpp"

namespace cis {

using geometry::Matrix;
using geometry::PolyUnion;
using geometry::Polytope;
using geometry::Vector;

namespace {

// omega ∩ P as polytopes, one per box that touches P.
std::vector<Polytope> clip(const Polytope& P, const Box& pb, const BoxUnion& omega) {
  std::vector<Polytope> parts;
  for (const auto& b : omega.boxes()) {
    const auto near = intersect(b, pb);
    if (!near) continue;
    Polytope part = geometry::intersection(Polytope::from_box(*near), P);
    if (!part.is_empty()) parts.push_back(std::move(part));
  }
  return parts;
}

// {u in U : H S u <= rhs}. H has unit rows, so a row of H S far below the
// scale of S is a constraint that does not involve u; normalizing it would
// blow rounding noise up into a bogus bound.
Polytope input_preimage(const Matrix& H, const Vector& rhs, const Matrix& S, const Box& U) {
  const auto m = static_cast<Eigen::Index>(U.dim());
  const Matrix HS = H * S;
  const double flat = 1e-10 * std::max(S.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < HS.rows(); ++i) {
    if (HS.row(i).lpNorm<Eigen::Infinity>() > flat) {
      keep.push_back(i);
    } else if (rhs(i) < -geometry::kTol) {
      return Polytope::empty(U.dim());
    }
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  Matrix rows(k + 2 * m, m);
  Vector b(k + 2 * m);
  for (Eigen::Index r = 0; r < k; ++r) {
    rows.row(r) = HS.row(keep[static_cast<std::size_t>(r)]);
    b(r) = rhs(keep[static_cast<std::size_t>(r)]);
  }
  rows.bottomRows(2 * m) << Matrix::Identity(m, m), -Matrix::Identity(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    b(k + i) = U[static_cast<std::size_t>(i)].hi();
    b(k + m + i) = -U[static_cast<std::size_t>(i)].lo();
  }
  return Polytope::from_hrep(rows, b);
}

PolyUnion inputs_from_parts(const AffineDecomposition& dec, const Polytope& P0, const std::vector<Polytope>& parts,
                            const BoxUnion& omega, const Box& U) {
  const std::size_t n = dec.box.dim();
  PolyUnion none(U.dim());
  if (parts.empty() || P0.is_empty()) return none;

  std::vector<Vector> pts;
  for (const auto& p : parts) pts.insert(pts.end(), p.vertices().begin(), p.vertices().end());
  const Polytope hull = Polytope::from_points(pts, n);

  // Translations keeping P0 inside the hull, pulled back to inputs.
  Vector beta(hull.H().rows());
  for (Eigen::Index i = 0; i < hull.H().rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& v : P0.vertices()) mx = std::max(mx, hull.H().row(i).dot(v));
    beta(i) = mx;
  }
  const Polytope fit = input_preimage(hull.H(), hull.b() - beta, dec.S, U);
  if (fit.is_empty()) return none;

  // The hull minus omega, as box pieces clipped to the hull. Pieces thinner
  // than the hull are boundary contact and remove nothing.
  const Box hb = hull.bounding_box();
  BoxUnion outside(std::vector<Box>{hb});
  for (const auto& b : omega.boxes()) {
    if (b.intersects(hb)) outside.subtract(b);
  }
  std::vector<Polytope> blocked;
  for (const auto& piece : outside.boxes()) {
    const Polytope q = geometry::intersection(Polytope::from_box(piece), hull);
    if (q.is_empty() || q.affine_dim() < hull.affine_dim()) continue;
    const Polytope overlap = geometry::overlap_set(P0, q);
    if (overlap.is_empty()) continue;
    const Polytope hit = input_preimage(overlap.H(), overlap.b(), dec.S, U);
    if (!hit.is_empty()) blocked.push_back(hit);
  }
  return geometry::set_difference(fit, blocked);
}

}  // namespace

PolyUnion feasible_inputs(const AffineDecomposition& dec, const Polytope& P0, const Polytope& P,
                          const BoxUnion& omega, const Box& U) {
  if (P.is_empty()) return PolyUnion(U.dim());
  return inputs_from_parts(dec, P0, clip(P, P.bounding_box(), omega), omega, U);
}

PolyUnion feasible_inputs(const AffineDecomposition& dec, const BoxUnion& omega, const Box& U) {
  const Polytope P0 = reach_P0(dec, U);
  return feasible_inputs(dec, P0, reach_full(P0, dec, U), omega, U);
}

Classification classify(const Box& x, const BoxUnion& reach_target, const BoxUnion& fit_target,
                        const SystemModel& model, double epsilon) {
  try {
    const AffineDecomposition dec = decompose(model, x);
    const Polytope P0 = reach_P0(dec, model.U);
    const Polytope P = reach_full(P0, dec, model.U);
    const Box pb = P.bounding_box();
    auto parts = clip(P, pb, reach_target);
    if (parts.empty()) return outcome::Disjoint{};
    if (&fit_target != &reach_target) parts = clip(P, pb, fit_target);
    auto inputs = inputs_from_parts(dec, P0, parts, fit_target, model.U);
    if (!inputs.empty()) return outcome::Inside{std::move(inputs), pb};
  } catch (const DomainError& e) {
    std::ostringstream os;
    os << e.what() << " (on box " << x << ")";
    throw DomainError(os.str());
  }
  if (x.width() <= epsilon) return outcome::Indeterminate{};
  auto [l, r] = x.bisect();
  return outcome::Split{std::move(l), std::move(r)};
}

Classification classify(const Box& x, const BoxUnion& omega, const SystemModel& model, double epsilon) {
  return classify(x, omega, omega, model, epsilon);
}

}  // namespace cis

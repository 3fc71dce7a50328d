#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cis/interval.hpp"

namespace cis::geometry {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance for membership, vertex merging and flatness tests.
/// Halfspace rows are kept at unit 2-norm so it reads as a distance.
inline constexpr double kTol = 1e-9;

/// {x : h.x <= b}
struct Halfspace {
  Vector h;
  double b = 0.0;
};

/// Bounded convex polytope in R^n (n <= 3) holding both representations.
///
/// The H-rep is irredundant with unit-norm rows; lower-dimensional polytopes
/// (points, segments, polygons in 3-D) carry a pair of opposite rows for each
/// direction normal to their affine hull. Vertices are the extreme points; in
/// a 2-D affine hull they are listed in cyclic order.
class Polytope {
 public:
  Polytope() = default;
  static Polytope empty(std::size_t dim);
  static Polytope from_box(const Box& box);
  /// Throws GeometryError if {x : Hx <= b} is unbounded.
  static Polytope from_hrep(const Matrix& H, const Vector& b);
  /// Convex hull of a finite point set.
  static Polytope from_points(const std::vector<Vector>& points, std::size_t dim);

  std::size_t dim() const { return dim_; }
  bool is_empty() const { return affine_dim_ < 0; }
  /// Dimension of the affine hull, -1 when empty.
  int affine_dim() const { return affine_dim_; }
  bool is_full_dimensional() const { return affine_dim_ == static_cast<int>(dim_); }

  const Matrix& H() const { return H_; }
  const Vector& b() const { return b_; }
  const std::vector<Vector>& vertices() const { return vertices_; }

  /// Mean of the vertices; a point of the relative interior.
  Vector centroid() const;
  bool contains(const Vector& p, double tol = kTol) const;
  Polytope translated(const Vector& t) const;
  /// Smallest box containing the polytope.
  Box bounding_box() const;

 private:
  std::size_t dim_ = 0;
  int affine_dim_ = -1;
  Matrix H_;
  Vector b_;
  std::vector<Vector> vertices_;
};

/// Finite union of polytopes of one ambient dimension.
class PolyUnion {
 public:
  PolyUnion() = default;
  explicit PolyUnion(std::size_t dim) : dim_(dim) {}
  PolyUnion(std::size_t dim, std::vector<Polytope> parts);

  std::size_t dim() const { return dim_; }
  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }
  const std::vector<Polytope>& parts() const { return parts_; }
  /// Adds p unless it is empty.
  void add(Polytope p);
  bool contains(const Vector& p, double tol = kTol) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Polytope> parts_;
};

Polytope convex_hull(const std::vector<Vector>& points, std::size_t dim);
Polytope minkowski_sum(const Polytope& p, const Polytope& q);
/// {A x : x in p}; A may be singular or rectangular.
Polytope linear_image(const Matrix& A, const Polytope& p);
Polytope intersection(const Polytope& p, const Polytope& q);

/// Translations r with p + {r} inside q. Empty when p does not fit.
Polytope insertion_set(const Polytope& p, const Polytope& q);
/// Translations s with (p + {s}) meeting q; equals q + (-p). Built from the
/// two-sided halfspace description up to 2-D, from the Minkowski sum in 3-D.
Polytope overlap_set(const Polytope& p, const Polytope& q);
/// Translations s with (p + {s}) meeting the halfspace h.
Halfspace overlap_halfspace(const Polytope& p, const Halfspace& h);

/// Closed-set intersection test (stacked constraints).
bool intersects(const Polytope& p, const Polytope& q);
/// Intersection test that checks every defining halfspace of each polytope
/// against the other one's vertices. Exact for n <= 2; in 3-D an edge-edge
/// separation can slip through, so it is only a necessary condition there.
bool intersects_by_halfspaces(const Polytope& p, const Polytope& q);

/// Closure of p minus the union of qs, as interior-disjoint pieces of the same
/// affine dimension as p. Contacts of lower dimension remove nothing.
PolyUnion set_difference(const Polytope& p, const std::vector<Polytope>& qs);

double volume(const Polytope& p);
/// Volume of the union, overlaps counted once.
double union_volume(const PolyUnion& u);
double union_volume(const BoxUnion& u);

}  // namespace cis::geometry

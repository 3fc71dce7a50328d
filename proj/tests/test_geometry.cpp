#include <random>

#include <gtest/gtest.h>

#include "cis/error.hpp"
#include "cis/geometry.hpp"
#include "support.hpp"

namespace cis::geometry {
namespace {

using cis::testing::fm_feasible;
using cis::testing::random_polygon;
using cis::testing::vec;
using cis::testing::violation;

Polytope square(double lo, double hi) { return Polytope::from_box(Box{Interval(lo, hi), Interval(lo, hi)}); }

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix M(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) M(i, j++) = v;
    ++i;
  }
  return M;
}

// Every vertex of a is within tol of a vertex of b and vice versa.
bool same_vertices(const Polytope& a, const Polytope& b, double tol) {
  auto covered = [tol](const Polytope& x, const Polytope& y) {
    for (const auto& v : x.vertices()) {
      bool hit = false;
      for (const auto& w : y.vertices()) hit = hit || (v - w).lpNorm<Eigen::Infinity>() <= tol;
      if (!hit) return false;
    }
    return true;
  };
  return a.is_empty() == b.is_empty() && covered(a, b) && covered(b, a);
}

// Random point of p as a random convex combination of its vertices.
Vector inside(const Polytope& p, std::mt19937& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(p.dim()));
  double total = 0.0;
  for (const auto& v : p.vertices()) {
    const double w = e(rng);
    acc += w * v;
    total += w;
  }
  return acc / total;
}

void check_invariants(const Polytope& p) {
  for (Eigen::Index i = 0; i < p.H().rows(); ++i) EXPECT_NEAR(p.H().row(i).norm(), 1.0, 1e-12);
  for (const auto& v : p.vertices()) EXPECT_LE(violation(p, v), 1e-9);
}

TEST(Polytope, FromBox) {
  const Polytope sq = square(0, 1);
  EXPECT_EQ(sq.H().rows(), 4);
  EXPECT_EQ(sq.vertices().size(), 4u);
  check_invariants(sq);
  const Polytope seg = Polytope::from_box(Box{Interval(-1, 1)});
  EXPECT_EQ(seg.vertices().size(), 2u);
  EXPECT_EQ(seg.affine_dim(), 1);
  const std::vector<double> p{0.5, 0.25};
  const Polytope pt = Polytope::from_box(Box::point(p));
  EXPECT_EQ(pt.affine_dim(), 0);
  EXPECT_EQ(pt.vertices().size(), 1u);
  EXPECT_TRUE(pt.contains(vec(p)));
}

TEST(Polytope, HrepToVrep) {
  const Polytope sq = Polytope::from_hrep(rows({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}), vec({1, 0, 1, 0}));
  EXPECT_EQ(sq.vertices().size(), 4u);
  EXPECT_NEAR(volume(sq), 1.0, 1e-12);
  const Polytope tri = Polytope::from_points({vec({0, 0}), vec({1, 0}), vec({0, 1})}, 2);
  EXPECT_EQ(tri.H().rows(), 3);
  check_invariants(tri);
  EXPECT_TRUE(Polytope::from_hrep(rows({{1}, {-1}}), vec({-1, -1})).is_empty());
  EXPECT_THROW(Polytope::from_hrep(rows({{1, 0}, {0, 1}}), vec({1, 1})), GeometryError);
}

TEST(Polytope, RepresentationsRoundTrip) {
  std::mt19937 rng(21);
  for (int t = 0; t < 200; ++t) {
    const Polytope p = random_polygon(rng, -1, 1, 3 + t % 6);
    check_invariants(p);
    const Polytope q = Polytope::from_hrep(p.H(), p.b());
    EXPECT_TRUE(same_vertices(p, q, 1e-9));
    const Polytope r = Polytope::from_points(q.vertices(), 2);
    EXPECT_EQ(r.H().rows(), p.H().rows());
  }
}

TEST(ConvexHull, Examples) {
  const Polytope sq = convex_hull({vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1}), vec({0.5, 0.5})}, 2);
  EXPECT_EQ(sq.vertices().size(), 4u);
  const Polytope seg = convex_hull({vec({0, 0}), vec({1, 1}), vec({2, 2}), vec({0.5, 0.5})}, 2);
  EXPECT_EQ(seg.affine_dim(), 1);
  EXPECT_EQ(seg.vertices().size(), 2u);
  std::vector<Vector> pts;
  for (const auto& c : Box{Interval(0, 1), Interval(0, 1)}.corners()) pts.push_back(vec(c));
  for (const auto& c : Box{Interval(1, 2), Interval(1, 2)}.corners()) pts.push_back(vec(c));
  const Polytope hex = convex_hull(pts, 2);
  EXPECT_EQ(hex.vertices().size(), 6u);
  // Shoelace over (0,0) (1,0) (2,1) (2,2) (1,2) (0,1).
  EXPECT_NEAR(volume(hex), 3.0, 1e-12);
}

TEST(ConvexHull, ThreeDimensions) {
  const Polytope cube = Polytope::from_box(Box{Interval(0, 1), Interval(0, 2), Interval(0, 3)});
  EXPECT_EQ(cube.vertices().size(), 8u);
  EXPECT_NEAR(volume(cube), 6.0, 1e-12);
  const Polytope simplex = convex_hull({vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1}), vec({0.1, 0.1, 0.1})}, 3);
  EXPECT_EQ(simplex.vertices().size(), 4u);
  EXPECT_NEAR(volume(simplex), 1.0 / 6.0, 1e-12);
  const Polytope flat = convex_hull({vec({0, 0, 1}), vec({1, 0, 1}), vec({0, 1, 1})}, 3);
  EXPECT_EQ(flat.affine_dim(), 2);
  EXPECT_EQ(volume(flat), 0.0);
}

TEST(MinkowskiSum, Examples) {
  const Polytope t = minkowski_sum(square(0, 1), Polytope::from_points({vec({2, 3})}, 2));
  EXPECT_TRUE(same_vertices(t, Polytope::from_box(Box{Interval(2, 3), Interval(3, 4)}), 1e-12));
  EXPECT_TRUE(same_vertices(minkowski_sum(square(0, 1), square(0, 1)), square(0, 2), 1e-12));
  const Polytope r = minkowski_sum(square(0, 1), Polytope::from_points({vec({-1, 0}), vec({1, 0})}, 2));
  EXPECT_TRUE(same_vertices(r, Polytope::from_box(Box{Interval(-1, 2), Interval(0, 1)}), 1e-12));
  EXPECT_NEAR(volume(r), 3.0, 1e-12);
}

TEST(LinearImage, Examples) {
  const Polytope p = random_polygon(*std::make_unique<std::mt19937>(5), -1, 1, 6);
  EXPECT_TRUE(same_vertices(linear_image(Matrix::Identity(2, 2), p), p, 1e-12));
  const Polytope z = linear_image(Matrix::Zero(2, 2), p);
  EXPECT_EQ(z.affine_dim(), 0);
  EXPECT_NEAR(z.vertices().front().norm(), 0.0, 1e-15);
  const Polytope sh = linear_image(rows({{1, 0.01}, {0, 1}}), square(0, 1));
  EXPECT_EQ(sh.vertices().size(), 4u);
  EXPECT_NEAR(volume(sh), 1.0, 1e-12);
}

TEST(InsertionSet, Examples) {
  const Polytope fit = insertion_set(square(0, 1), square(0, 1));
  EXPECT_EQ(fit.affine_dim(), 0);
  EXPECT_NEAR(fit.vertices().front().norm(), 0.0, 1e-12);
  EXPECT_TRUE(same_vertices(insertion_set(square(0, 1), square(0, 3)), square(0, 2), 1e-12));
  EXPECT_TRUE(insertion_set(square(0, 2), square(0, 1)).is_empty());
}

TEST(InsertionSet, RandomOracle) {
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> mag(1e-6, 1e-3);
  int pairs = 0;
  while (pairs < 200) {
    const Polytope p = random_polygon(rng, -0.4, 0.4, 4);
    const Polytope q = random_polygon(rng, -2, 2, 7);
    const Polytope ins = insertion_set(p, q);
    if (ins.is_empty()) continue;
    ++pairs;
    for (int s = 0; s < 50; ++s) {
      const Vector r = inside(ins, rng);
      for (const auto& v : p.vertices()) ASSERT_LE(violation(q, v + r), 1e-9);
    }
    for (int s = 0; s < 50; ++s) {
      const Vector r = inside(ins, rng);
      const Eigen::Index i = std::uniform_int_distribution<Eigen::Index>(0, ins.H().rows() - 1)(rng);
      const Vector out = r + (ins.b()(i) - ins.H().row(i).dot(r) + mag(rng)) * ins.H().row(i).transpose();
      double worst = -1.0;
      for (const auto& v : p.vertices()) worst = std::max(worst, violation(q, v + out));
      ASSERT_GT(worst, 0.0);
    }
  }
}

TEST(OverlapSet, Examples) {
  EXPECT_TRUE(same_vertices(overlap_set(square(0, 1), square(2, 3)), square(1, 3), 1e-12));
  EXPECT_TRUE(same_vertices(overlap_set(square(0, 1), square(0, 1)), square(-1, 1), 1e-12));
  const Polytope q = Polytope::from_points({vec({0, 0}), vec({2, 0}), vec({0, 1})}, 2);
  EXPECT_TRUE(same_vertices(overlap_set(Polytope::from_points({vec({0, 0})}, 2), q), q, 1e-12));
}

TEST(OverlapSet, EqualsMinkowskiWithReflection) {
  std::mt19937 rng(23);
  for (int t = 0; t < 300; ++t) {
    const Polytope p = random_polygon(rng, -1, 1, 3 + t % 5);
    const Polytope q = random_polygon(rng, -1, 2, 3 + t % 4);
    const Polytope ref = minkowski_sum(q, linear_image(-Matrix::Identity(2, 2), p));
    ASSERT_TRUE(same_vertices(overlap_set(p, q), ref, 1e-9));
  }
  for (int t = 0; t < 50; ++t) {
    std::vector<Vector> a, b;
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 6; ++k) a.push_back(vec({u(rng), u(rng), u(rng)}));
    for (int k = 0; k < 6; ++k) b.push_back(vec({u(rng), u(rng), u(rng)}));
    const Polytope p = Polytope::from_points(a, 3), q = Polytope::from_points(b, 3);
    ASSERT_TRUE(same_vertices(overlap_set(p, q), minkowski_sum(q, linear_image(-Matrix::Identity(3, 3), p)), 1e-9));
  }
}

TEST(OverlapHalfspace, Examples) {
  const Halfspace a = overlap_halfspace(Polytope::from_points({vec({0, 0})}, 2), {vec({1, 0}), 1.0});
  EXPECT_NEAR(a.b, 1.0, 1e-15);
  const Halfspace b = overlap_halfspace(square(0, 1), {vec({1, 0}), 0.0});
  EXPECT_NEAR(b.b, 0.0, 1e-15);
  const Halfspace c = overlap_halfspace(square(-1, 1), {vec({1, 1}), 2.0});
  EXPECT_NEAR(c.b / c.h(0), 4.0, 1e-12);
  EXPECT_NEAR(c.h(0), c.h(1), 1e-15);
}

TEST(Intersects, Examples) {
  EXPECT_TRUE(intersects(square(0, 1), square(0.5, 2)));
  EXPECT_FALSE(intersects(square(0, 1), square(2, 3)));
  EXPECT_TRUE(intersects(square(0, 1), square(1, 2)));
  EXPECT_TRUE(intersects_by_halfspaces(square(0, 1), square(1, 2)));
  EXPECT_FALSE(intersects_by_halfspaces(square(0, 1), square(2, 3)));
}

TEST(Intersects, AgreesWithFourierMotzkin) {
  std::mt19937 rng(24);
  int hits = 0;
  for (int t = 0; t < 500; ++t) {
    const Polytope p = random_polygon(rng, -1, 1, 3 + t % 5);
    const Polytope q = random_polygon(rng, -0.5, 2, 3 + t % 4);
    Matrix H(p.H().rows() + q.H().rows(), 2);
    H << p.H(), q.H();
    Vector b(H.rows());
    b << p.b(), q.b();
    const bool fm = fm_feasible(H, b);
    hits += fm;
    ASSERT_EQ(intersects(p, q), fm) << t;
    ASSERT_EQ(intersects_by_halfspaces(p, q), intersects(p, q)) << t;
  }
  EXPECT_GT(hits, 50);
  EXPECT_LT(hits, 450);
}

TEST(SetDifference, Examples) {
  const PolyUnion ring = set_difference(square(0, 3), {square(1, 2)});
  EXPECT_EQ(ring.size(), 4u);
  EXPECT_NEAR(union_volume(ring), 8.0, 1e-12);
  EXPECT_TRUE(set_difference(square(0, 1), {square(0, 1)}).empty());
  const PolyUnion same = set_difference(square(0, 1), {square(2, 3)});
  ASSERT_EQ(same.size(), 1u);
  EXPECT_TRUE(same_vertices(same.parts().front(), square(0, 1), 0.0));
}

TEST(SetDifference, MonteCarloMembershipAndVolume) {
  std::mt19937 rng(25);
  for (int t = 0; t < 20; ++t) {
    const Polytope p = random_polygon(rng, -1, 1, 6);
    std::vector<Polytope> qs;
    for (int k = 0; k < 3; ++k) qs.push_back(random_polygon(rng, -1.2, 1.2, 4));
    const PolyUnion d = set_difference(p, qs);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        const Polytope both = intersection(d.parts()[i], d.parts()[j]);
        EXPECT_TRUE(both.is_empty() || both.affine_dim() < 2);
      }
    }
    const Box bb = p.bounding_box();
    int wrong = 0;
    for (int s = 0; s < 10000 / 20; ++s) {
      const Vector x = vec(cis::testing::sample_in(bb, rng));
      double margin = std::abs(violation(p, x));
      bool in_q = false;
      for (const auto& q : qs) {
        margin = std::min(margin, std::abs(violation(q, x)));
        in_q = in_q || violation(q, x) <= 0;
      }
      if (margin < 1e-9) continue;
      const bool expected = violation(p, x) <= 0 && !in_q;
      wrong += expected != d.contains(x, 1e-9);
    }
    EXPECT_EQ(wrong, 0);
    // vol(p \ U q) = vol(p) - vol(p cap U q)
    PolyUnion cut(2);
    for (const auto& q : qs) cut.add(intersection(p, q));
    const double expect = volume(p) - union_volume(cut);
    EXPECT_NEAR(union_volume(d), expect, 1e-6 * volume(p));
  }
}

TEST(Volume, Examples) {
  EXPECT_NEAR(volume(square(0, 1)), 1.0, 1e-15);
  EXPECT_NEAR(volume(Polytope::from_points({vec({0, 0}), vec({1, 0}), vec({0, 1})}, 2)), 0.5, 1e-15);
  EXPECT_NEAR(volume(Polytope::from_box(Box{Interval(-0.05, 0.05), Interval(-0.01, 0.01)})), 0.002, 1e-15);
  EXPECT_NEAR(union_volume(BoxUnion(std::vector<Box>{Box{Interval(0, 2), Interval(0, 1)}, Box{Interval(1, 3), Interval(0, 1)}})),
              3.0, 1e-12);
}

}  // namespace
}  // namespace cis::geometry

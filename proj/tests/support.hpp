#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cis/algorithms.hpp"
#include "cis/dynamics.hpp"
#include "cis/expr.hpp"
#include "cis/geometry.hpp"
#include "cis/interval.hpp"

namespace cis::testing {

using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;

inline SystemModel make_model(std::vector<std::string> f0, std::vector<std::string> g, Box U, BoxUnion omega) {
  SystemModel m;
  m.n = f0.size();
  m.m = U.dim();
  for (const auto& s : f0) m.f0.push_back(expr::parse(s, m.n));
  for (const auto& s : g) m.g.push_back(expr::parse(s, m.n));
  m.U = std::move(U);
  m.omega = std::move(omega);
  m.validate();
  return m;
}

inline BoxUnion boxes(std::vector<Box> bs) { return BoxUnion(std::move(bs)); }

/// Forward-Euler pendulum, dt = 0.01.
inline SystemModel pendulum() {
  return make_model({"x1 + 0.01*x2", "x2 + 0.01*(9.8*0.3*0.2/0.006*sin(x1) - 0.1/0.006*x2)"},
                    {"0", "0.01*0.3/0.006*cos(x1)"}, Box{Interval(-0.1, 0.1)},
                    boxes({Box{Interval(-0.05, 0.05), Interval(-0.01, 0.01)}}));
}

/// x+ = x + u, U = [-1, 1], omega = [-1, 1]: all of omega is invariant.
inline SystemModel integrator() {
  return make_model({"x1"}, {"1"}, Box{Interval(-1, 1)}, boxes({Box{Interval(-1, 1)}}));
}

/// x+ = 2x + u, U = [-1, 1], omega = [-2, 2]: the maximal invariant set is [-1, 1].
inline SystemModel doubling() {
  return make_model({"2*x1"}, {"1"}, Box{Interval(-1, 1)}, boxes({Box{Interval(-2, 2)}}));
}

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  return v < 0 ? "(" + s + ")" : s;
}

/// Pendulum-like discretized systems with random coefficients: n = 2, m = 1,
/// a polynomial or trigonometric drift and a state-dependent input gain.
inline SystemModel random_system(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  const double a = 20.0 + 80.0 * d(rng);
  const double b = 5.0 + 15.0 * d(rng);
  const double c = 0.2 + 0.6 * d(rng);
  const double k = 20.0 + 60.0 * d(rng);
  const double q = 0.5 + 2.0 * d(rng);
  std::string drift;
  switch (seed % 3) {
    case 0:
      drift = num(a) + "*sin(x1) - " + num(b) + "*x2";
      break;
    case 1:
      drift = num(a) + "*x1 - " + num(b) + "*x2 + " + num(10 * c) + "*x1^2";
      break;
    default:
      drift = num(a) + "*sin(x1) - " + num(b) + "*x2 + " + num(c) + "*x1*x2";
      break;
  }
  return make_model({"x1 + 0.01*x2", "x2 + 0.01*(" + drift + ")"},
                    {"0", "0.01*" + num(k) + "*(cos(x1) + " + num(q) + "*x1^2)"}, Box{Interval(-0.1, 0.1)},
                    boxes({Box{Interval(-0.05, 0.05), Interval(-0.01, 0.01)}}));
}

template <class Rng>
std::vector<double> sample_in(const Box& b, Rng& rng) {
  std::vector<double> p;
  for (const auto& I : b.axes()) p.push_back(std::uniform_real_distribution<double>(I.lo(), I.hi())(rng));
  return p;
}

template <class Rng>
Box random_sub_box(const Box& outer, Rng& rng) {
  std::vector<Interval> axes;
  for (const auto& I : outer.axes()) {
    std::uniform_real_distribution<double> u(I.lo(), I.hi());
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    axes.emplace_back(a, b);
  }
  return Box(std::move(axes));
}

inline Vector vec(std::vector<double> v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

/// Feasibility of {x : H x <= b} by Fourier-Motzkin elimination; shares no
/// code with the vertex enumeration it is used to check.
inline bool fm_feasible(const Matrix& H, const Vector& b, double tol = 1e-9) {
  struct Row {
    std::vector<double> a;
    double b;
  };
  std::vector<Row> rows;
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    Row r{std::vector<double>(H.row(i).data(), H.row(i).data() + H.cols()), b(i)};
    for (Eigen::Index j = 0; j < H.cols(); ++j) r.a[j] = H(i, j);
    rows.push_back(std::move(r));
  }
  for (Eigen::Index j = H.cols(); j-- > 0;) {
    std::vector<Row> pos, neg, next;
    for (auto& r : rows) {
      if (r.a[j] > 1e-12) {
        pos.push_back(r);
      } else if (r.a[j] < -1e-12) {
        neg.push_back(r);
      } else {
        r.a[j] = 0.0;
        next.push_back(r);
      }
    }
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        Row r{std::vector<double>(p.a.size()), 0.0};
        const double sp = 1.0 / p.a[j], sq = -1.0 / q.a[j];
        double norm = 0.0;
        for (std::size_t k = 0; k < r.a.size(); ++k) {
          r.a[k] = p.a[k] * sp + q.a[k] * sq;
          norm = std::max(norm, std::abs(r.a[k]));
        }
        r.a[j] = 0.0;
        r.b = p.b * sp + q.b * sq;
        if (norm > 1.0) {
          for (auto& v : r.a) v /= norm;
          r.b /= norm;
        }
        next.push_back(std::move(r));
      }
    }
    rows = std::move(next);
  }
  for (const auto& r : rows) {
    if (r.b < -tol) return false;
  }
  return true;
}

/// Convex polygon from k random points in the given frame.
template <class Rng>
Polytope random_polygon(Rng& rng, double lo, double hi, int k = 5) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vector> pts;
  for (int i = 0; i < k; ++i) pts.push_back(vec({u(rng), u(rng)}));
  return Polytope::from_points(pts, 2);
}

/// max_i (H_i p - b_i): positive outside, at most 0 inside.
inline double violation(const Polytope& q, const Vector& p) {
  return (q.H() * p - q.b()).maxCoeff();
}

/// Volume of (a \ b) U (b \ a), from pairwise intersections of disjoint pieces.
inline double symdiff_volume(const BoxUnion& a, const BoxUnion& b) {
  const BoxUnion da = a.disjoint(), db = b.disjoint();
  double common = 0.0;
  for (const auto& x : da.boxes()) {
    for (const auto& y : db.boxes()) {
      if (auto c = intersect(x, y)) common += c->volume();
    }
  }
  return da.volume() + db.volume() - 2 * common;
}

/// Random convex combination of the vertices of a nonempty polytope.
template <class Rng>
Vector sample_in(const Polytope& p, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector x = Vector::Zero(static_cast<Eigen::Index>(p.dim()));
  double total = 0.0;
  for (const auto& v : p.vertices()) {
    const double w = e(rng);
    x += w * v;
    total += w;
  }
  return x / total;
}

}  // namespace cis::testing

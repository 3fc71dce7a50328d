#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cis {

/// Relative outward inflation applied to every computed interval endpoint.
/// Stands in for directed rounding: results are widened by one ulp and then
/// by this factor, which also covers libm error in transcendental functions.
inline constexpr double kOutwardRel = 1e-12;

/// Closed real interval [lo, hi]; lo <= hi always holds.
class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double point) : lo_(point), hi_(point) {}  // NOLINT(google-explicit-constructor)
  Interval(double lo, double hi);

  constexpr double lo() const { return lo_; }
  constexpr double hi() const { return hi_; }
  constexpr double width() const { return hi_ - lo_; }
  constexpr double mid() const { return 0.5 * (lo_ + hi_); }
  constexpr double rad() const { return 0.5 * (hi_ - lo_); }
  /// Largest absolute value.
  double mag() const;
  constexpr bool contains(double x) const { return lo_ <= x && x <= hi_; }
  constexpr bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  constexpr bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  constexpr bool is_point() const { return lo_ == hi_; }

  /// Endpoint hull, no rounding.
  static Interval hull(double a, double b);
  /// Widens [lo, hi] outward to absorb floating-point error.
  static Interval outward(double lo, double hi);

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
/// Throws DomainError when the divisor contains zero.
Interval operator/(const Interval& a, const Interval& b);

Interval sin(const Interval& x);
Interval cos(const Interval& x);
Interval tan(const Interval& x);
Interval exp(const Interval& x);
Interval log(const Interval& x);
Interval sqrt(const Interval& x);
Interval abs(const Interval& x);
Interval pow(const Interval& x, int n);

std::optional<Interval> intersect(const Interval& a, const Interval& b);
std::ostream& operator<<(std::ostream& os, const Interval& x);

/// Axis-aligned box in R^n. A box may be degenerate (lo == hi) in any axis.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> axes);
  Box(std::initializer_list<Interval> axes);
  Box(std::span<const double> lo, std::span<const double> hi);
  static Box point(std::span<const double> p);

  std::size_t dim() const { return axes_.size(); }
  const Interval& operator[](std::size_t i) const { return axes_[i]; }
  Interval& operator[](std::size_t i) { return axes_[i]; }
  const std::vector<Interval>& axes() const { return axes_; }

  std::vector<double> lo() const;
  std::vector<double> hi() const;
  std::vector<double> midpoint() const;
  /// Infinity-norm width: max_i (hi_i - lo_i).
  double width() const;
  double volume() const;
  /// Lowest-index axis of maximal width.
  std::size_t widest_axis() const;
  /// Splits the widest axis at its midpoint. Throws on zero-width boxes.
  std::pair<Box, Box> bisect() const;

  bool contains(std::span<const double> p, double tol = 0.0) const;
  bool contains(const Box& other) const;
  /// Closed-set intersection test (touching boxes intersect).
  bool intersects(const Box& other) const;
  /// Box grown (r > 0) or shrunk (r < 0) by |r| on every face; nullopt if it vanishes.
  std::optional<Box> inflated(double r) const;
  /// Smallest box containing both.
  Box hull(const Box& other) const;
  /// All 2^n corners, axis 0 varying fastest.
  std::vector<std::vector<double>> corners() const;

  friend bool operator==(const Box&, const Box&) = default;
  friend bool operator<(const Box& a, const Box& b);

 private:
  std::vector<Interval> axes_;
};

std::optional<Box> intersect(const Box& a, const Box& b);
std::ostream& operator<<(std::ostream& os, const Box& b);

/// Closure of a \ b as interior-disjoint boxes. Contact of measure zero
/// (relative to a) leaves a unchanged.
std::vector<Box> difference(const Box& a, const Box& b);

/// Sound enclosure of {M w : M in mat, w in u}; mat is rows x cols, row-major.
Box interval_matrix_times_box(std::span<const Interval> mat, std::size_t rows, std::size_t cols,
                              const Box& u);

/// Finite union of same-dimension boxes. Boxes may overlap after `add`;
/// `subtract` keeps a disjoint union disjoint and `erode` always returns one.
/// `version` grows whenever the represented set changes.
class BoxUnion {
 public:
  BoxUnion() = default;
  explicit BoxUnion(std::size_t dim) : dim_(dim) {}
  explicit BoxUnion(std::vector<Box> boxes);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return boxes_.size(); }
  bool empty() const { return boxes_.empty(); }
  const std::vector<Box>& boxes() const { return boxes_; }
  std::uint64_t version() const { return version_; }

  void add(Box b);
  /// In-place set difference; bumps the version if anything was removed.
  void subtract(const Box& b);
  bool contains(std::span<const double> p, double tol = 0.0) const;
  /// True when b lies inside the union (closed sets).
  bool covers(const Box& b) const;
  bool intersects(const Box& b) const;
  std::optional<Box> bounding_box() const;
  /// Exact volume; overlapping boxes are counted once.
  double volume() const;
  /// Equivalent union with pairwise interior-disjoint boxes.
  BoxUnion disjoint() const;
  /// Merges pairs of boxes that share a full face until none remain.
  BoxUnion coalesced() const;

 private:
  friend BoxUnion erode(const BoxUnion& u, double r);

  std::size_t dim_ = 0;
  std::vector<Box> boxes_;
  std::uint64_t version_ = 0;
};

/// Set difference u \ b.
BoxUnion subtract(const BoxUnion& u, const Box& b);

/// Inner approximation of u eroded by the infinity ball of radius r: every
/// returned point x has [x - r, x + r] inside u. Exact for a single box and
/// for unions that coalesce into one box.
BoxUnion erode(const BoxUnion& u, double r);

}  // namespace cis

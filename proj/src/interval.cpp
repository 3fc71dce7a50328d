#include "cis/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "cis/error.hpp"

namespace cis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double down(double x) {
  if (!std::isfinite(x)) return x;
  return std::nextafter(x - std::abs(x) * kOutwardRel, -kInf);
}

double up(double x) {
  if (!std::isfinite(x)) return x;
  return std::nextafter(x + std::abs(x) * kOutwardRel, kInf);
}

// Smallest integer k with a <= offset + k * period.
double first_k(double a, double offset, double period) { return std::ceil((a - offset) / period); }

bool hits_lattice(const Interval& x, double offset, double period) {
  return first_k(x.lo(), offset, period) * period + offset <= x.hi();
}

Interval clamp_unit(const Interval& x) {
  return Interval(std::max(-1.0, x.lo()), std::min(1.0, x.hi()));
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo <= hi)) throw DomainError("interval with lo > hi");
}

double Interval::mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }

Interval Interval::hull(double a, double b) { return Interval(std::min(a, b), std::max(a, b)); }

Interval Interval::outward(double lo, double hi) { return Interval(down(lo), up(hi)); }

Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }
Interval& Interval::operator/=(const Interval& o) { return *this = *this / o; }

Interval operator+(const Interval& a, const Interval& b) {
  return Interval::outward(a.lo() + b.lo(), a.hi() + b.hi());
}

Interval operator-(const Interval& a, const Interval& b) {
  return Interval::outward(a.lo() - b.hi(), a.hi() - b.lo());
}

Interval operator-(const Interval& a) { return Interval(-a.hi(), -a.lo()); }

Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_point() && b.is_point()) {
    double p = a.lo() * b.lo();
    return Interval::outward(p, p);
  }
  const double c[] = {a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(), a.hi() * b.hi()};
  auto [mn, mx] = std::minmax_element(std::begin(c), std::end(c));
  return Interval::outward(*mn, *mx);
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DomainError("division by an interval containing zero");
  const double c[] = {a.lo() / b.lo(), a.lo() / b.hi(), a.hi() / b.lo(), a.hi() / b.hi()};
  auto [mn, mx] = std::minmax_element(std::begin(c), std::end(c));
  return Interval::outward(*mn, *mx);
}

Interval sin(const Interval& x) {
  constexpr double pi = std::numbers::pi;
  if (x.width() >= 2 * pi) return Interval(-1.0, 1.0);
  double lo = std::min(std::sin(x.lo()), std::sin(x.hi()));
  double hi = std::max(std::sin(x.lo()), std::sin(x.hi()));
  if (hits_lattice(x, pi / 2, 2 * pi)) hi = 1.0;
  if (hits_lattice(x, -pi / 2, 2 * pi)) lo = -1.0;
  return clamp_unit(Interval::outward(lo, hi));
}

Interval cos(const Interval& x) {
  constexpr double pi = std::numbers::pi;
  if (x.width() >= 2 * pi) return Interval(-1.0, 1.0);
  double lo = std::min(std::cos(x.lo()), std::cos(x.hi()));
  double hi = std::max(std::cos(x.lo()), std::cos(x.hi()));
  if (hits_lattice(x, 0.0, 2 * pi)) hi = 1.0;
  if (hits_lattice(x, pi, 2 * pi)) lo = -1.0;
  return clamp_unit(Interval::outward(lo, hi));
}

Interval tan(const Interval& x) {
  constexpr double pi = std::numbers::pi;
  if (x.width() >= pi || hits_lattice(x, pi / 2, pi)) {
    throw DomainError("tan over an interval containing a pole");
  }
  return Interval::outward(std::tan(x.lo()), std::tan(x.hi()));
}

Interval exp(const Interval& x) {
  return Interval(std::max(0.0, down(std::exp(x.lo()))), up(std::exp(x.hi())));
}

Interval log(const Interval& x) {
  if (x.lo() <= 0.0) throw DomainError("log of an interval reaching non-positive values");
  return Interval::outward(std::log(x.lo()), std::log(x.hi()));
}

Interval sqrt(const Interval& x) {
  if (x.lo() < 0.0) throw DomainError("sqrt of an interval reaching negative values");
  return Interval(std::max(0.0, down(std::sqrt(x.lo()))), up(std::sqrt(x.hi())));
}

Interval abs(const Interval& x) {
  if (x.lo() >= 0.0) return x;
  if (x.hi() <= 0.0) return -x;
  return Interval(0.0, x.mag());
}

Interval pow(const Interval& x, int n) {
  if (n == 0) return Interval(1.0);
  if (n < 0) return Interval(1.0) / pow(x, -n);
  const double a = std::pow(x.lo(), n);
  const double b = std::pow(x.hi(), n);
  if (n % 2 == 1) return Interval::outward(a, b);
  if (x.contains_zero()) return Interval(0.0, up(std::max(a, b)));
  return Interval(std::max(0.0, down(std::min(a, b))), up(std::max(a, b)));
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return std::nullopt;
  return Interval(lo, hi);
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << '[' << x.lo() << ", " << x.hi() << ']';
}

}  // namespace cis

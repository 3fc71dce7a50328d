#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "cis/error.hpp"
#include "cis/interval.hpp"

namespace cis {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

Box::Box(std::vector<Interval> axes) : axes_(std::move(axes)) {}

Box::Box(std::initializer_list<Interval> axes) : axes_(axes) {}

Box::Box(std::span<const double> lo, std::span<const double> hi) {
  require_same_dim(lo.size(), hi.size());
  axes_.reserve(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) axes_.emplace_back(lo[i], hi[i]);
}

Box Box::point(std::span<const double> p) { return Box(p, p); }

std::vector<double> Box::lo() const {
  std::vector<double> v(dim());
  for (std::size_t i = 0; i < dim(); ++i) v[i] = axes_[i].lo();
  return v;
}

std::vector<double> Box::hi() const {
  std::vector<double> v(dim());
  for (std::size_t i = 0; i < dim(); ++i) v[i] = axes_[i].hi();
  return v;
}

std::vector<double> Box::midpoint() const {
  std::vector<double> v(dim());
  for (std::size_t i = 0; i < dim(); ++i) v[i] = axes_[i].mid();
  return v;
}

double Box::width() const {
  double w = 0.0;
  for (const auto& a : axes_) w = std::max(w, a.width());
  return w;
}

double Box::volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.width();
  return v;
}

std::size_t Box::widest_axis() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < dim(); ++i) {
    if (axes_[i].width() > axes_[best].width()) best = i;
  }
  return best;
}

std::pair<Box, Box> Box::bisect() const {
  if (dim() == 0 || width() <= 0.0) throw DomainError("cannot bisect a zero-width box");
  const std::size_t k = widest_axis();
  const double m = axes_[k].mid();
  Box left = *this;
  Box right = *this;
  left.axes_[k] = Interval(axes_[k].lo(), m);
  right.axes_[k] = Interval(m, axes_[k].hi());
  return {left, right};
}

bool Box::contains(std::span<const double> p, double tol) const {
  require_same_dim(dim(), p.size());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (p[i] < axes_[i].lo() - tol || p[i] > axes_[i].hi() + tol) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const {
  require_same_dim(dim(), other.dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!axes_[i].contains(other.axes_[i])) return false;
  }
  return true;
}

bool Box::intersects(const Box& other) const {
  require_same_dim(dim(), other.dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (axes_[i].hi() < other.axes_[i].lo() || other.axes_[i].hi() < axes_[i].lo()) return false;
  }
  return true;
}

std::optional<Box> Box::inflated(double r) const {
  Box out = *this;
  for (auto& a : out.axes_) {
    const double lo = a.lo() - r;
    const double hi = a.hi() + r;
    if (lo > hi) return std::nullopt;
    a = Interval(lo, hi);
  }
  return out;
}

Box Box::hull(const Box& other) const {
  require_same_dim(dim(), other.dim());
  Box out = *this;
  for (std::size_t i = 0; i < dim(); ++i) {
    out.axes_[i] = Interval(std::min(axes_[i].lo(), other.axes_[i].lo()),
                            std::max(axes_[i].hi(), other.axes_[i].hi()));
  }
  return out;
}

std::vector<std::vector<double>> Box::corners() const {
  const std::size_t n = dim();
  std::vector<std::vector<double>> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = (mask >> i) & 1U ? axes_[i].hi() : axes_[i].lo();
    out.push_back(std::move(c));
  }
  return out;
}

bool operator<(const Box& a, const Box& b) {
  return std::lexicographical_compare(
      a.axes_.begin(), a.axes_.end(), b.axes_.begin(), b.axes_.end(),
      [](const Interval& x, const Interval& y) { return std::tuple(x.lo(), x.hi()) < std::tuple(y.lo(), y.hi()); });
}

std::optional<Box> intersect(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim());
  std::vector<Interval> axes;
  axes.reserve(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    auto c = intersect(a[i], b[i]);
    if (!c) return std::nullopt;
    axes.push_back(*c);
  }
  return Box(std::move(axes));
}

std::ostream& operator<<(std::ostream& os, const Box& b) {
  for (std::size_t i = 0; i < b.dim(); ++i) os << (i ? " x " : "") << b[i];
  return os;
}

std::vector<Box> difference(const Box& a, const Box& b) {
  auto c = intersect(a, b);
  if (!c) return {a};
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i].width() > 0.0 && (*c)[i].width() == 0.0) return {a};
  }
  std::vector<Box> out;
  Box cur = a;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const Interval& ck = (*c)[k];
    if (cur[k].lo() < ck.lo()) {
      Box piece = cur;
      piece[k] = Interval(cur[k].lo(), ck.lo());
      out.push_back(std::move(piece));
    }
    if (ck.hi() < cur[k].hi()) {
      Box piece = cur;
      piece[k] = Interval(ck.hi(), cur[k].hi());
      out.push_back(std::move(piece));
    }
    cur[k] = ck;
  }
  return out;
}

Box interval_matrix_times_box(std::span<const Interval> mat, std::size_t rows, std::size_t cols,
                              const Box& u) {
  require_same_dim(cols, u.dim());
  if (mat.size() != rows * cols) throw DimensionError("interval matrix storage does not match its shape");
  std::vector<Interval> out(rows, Interval(0.0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[i] += mat[i * cols + j] * u[j];
  }
  return Box(std::move(out));
}

// ---------------------------------------------------------------------------
// BoxUnion

BoxUnion::BoxUnion(std::vector<Box> boxes) {
  if (!boxes.empty()) dim_ = boxes.front().dim();
  for (auto& b : boxes) add(std::move(b));
  version_ = 0;
}

void BoxUnion::add(Box b) {
  if (boxes_.empty() && dim_ == 0) dim_ = b.dim();
  require_same_dim(dim_, b.dim());
  boxes_.push_back(std::move(b));
  ++version_;
}

void BoxUnion::subtract(const Box& b) {
  require_same_dim(dim_, b.dim());
  std::vector<Box> next;
  next.reserve(boxes_.size() + 2 * dim_);
  bool changed = false;
  for (const auto& box : boxes_) {
    auto pieces = difference(box, b);
    if (pieces.size() != 1 || !(pieces.front() == box)) changed = true;
    for (auto& p : pieces) next.push_back(std::move(p));
  }
  boxes_ = std::move(next);
  if (changed) ++version_;
}

bool BoxUnion::contains(std::span<const double> p, double tol) const {
  return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) { return b.contains(p, tol); });
}

bool BoxUnion::covers(const Box& b) const {
  require_same_dim(dim_, b.dim());
  std::vector<Box> remaining{b};
  for (const auto& box : boxes_) {
    if (!box.intersects(b)) continue;
    std::vector<Box> next;
    for (const auto& r : remaining) {
      for (auto& p : difference(r, box)) next.push_back(std::move(p));
    }
    remaining = std::move(next);
    if (remaining.empty()) return true;
  }
  return remaining.empty();
}

bool BoxUnion::intersects(const Box& b) const {
  return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& x) { return x.intersects(b); });
}

std::optional<Box> BoxUnion::bounding_box() const {
  if (boxes_.empty()) return std::nullopt;
  Box out = boxes_.front();
  for (const auto& b : boxes_) out = out.hull(b);
  return out;
}

BoxUnion BoxUnion::disjoint() const {
  BoxUnion out(dim_);
  for (const auto& box : boxes_) {
    std::vector<Box> pieces{box};
    for (const auto& placed : out.boxes_) {
      if (!placed.intersects(box)) continue;
      std::vector<Box> next;
      for (const auto& p : pieces) {
        for (auto& q : difference(p, placed)) next.push_back(std::move(q));
      }
      pieces = std::move(next);
      if (pieces.empty()) break;
    }
    for (auto& p : pieces) out.boxes_.push_back(std::move(p));
  }
  out.version_ = version_;
  return out;
}

double BoxUnion::volume() const {
  double v = 0.0;
  for (const auto& b : disjoint().boxes_) v += b.volume();
  return v;
}

BoxUnion BoxUnion::coalesced() const {
  std::vector<Box> boxes = disjoint().boxes_;
  bool changed = true;
  while (changed && boxes.size() > 1) {
    changed = false;
    for (std::size_t k = 0; k < dim_; ++k) {
      // Boxes that agree on every axis except k sort next to each other.
      auto key_less = [k](const Box& a, const Box& b) {
        for (std::size_t i = 0; i < a.dim(); ++i) {
          if (i == k) continue;
          if (a[i].lo() != b[i].lo()) return a[i].lo() < b[i].lo();
          if (a[i].hi() != b[i].hi()) return a[i].hi() < b[i].hi();
        }
        return a[k].lo() < b[k].lo();
      };
      std::sort(boxes.begin(), boxes.end(), key_less);
      std::vector<Box> merged;
      merged.reserve(boxes.size());
      for (auto& b : boxes) {
        if (!merged.empty()) {
          Box& last = merged.back();
          bool same = true;
          for (std::size_t i = 0; i < dim_ && same; ++i) {
            if (i != k && !(last[i] == b[i])) same = false;
          }
          if (same && last[k].hi() == b[k].lo()) {
            last[k] = Interval(last[k].lo(), b[k].hi());
            changed = true;
            continue;
          }
        }
        merged.push_back(std::move(b));
      }
      boxes = std::move(merged);
    }
  }
  BoxUnion out(dim_);
  out.boxes_ = std::move(boxes);
  out.version_ = version_;
  return out;
}

BoxUnion subtract(const BoxUnion& u, const Box& b) {
  BoxUnion out = u;
  out.subtract(b);
  return out;
}

BoxUnion erode(const BoxUnion& u, double r) {
  if (r < 0.0) throw DomainError("erosion radius must be non-negative");
  BoxUnion out(u.dim());
  const BoxUnion merged = u.coalesced();
  for (const auto& b : merged.boxes()) {
    if (auto s = b.inflated(-r)) out.add(*s);
  }
  out.version_ = u.version() + 1;
  return out;
}

}  // namespace cis

#include "cis/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cis/error.hpp"

namespace cis::geometry {

namespace {

struct Facet {
  Vector normal;
  double offset;
};

// Hull of points given in local coordinates of their affine hull.
struct LocalHull {
  std::vector<std::size_t> vertex_ids;
  std::vector<Facet> facets;
};

std::vector<Vector> dedupe(const std::vector<Vector>& pts) {
  std::vector<Vector> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    bool seen = false;
    for (const auto& q : out) {
      if ((p - q).lpNorm<Eigen::Infinity>() <= kTol) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(p);
  }
  return out;
}

LocalHull hull_1d(const std::vector<Vector>& y) {
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i](0) < y[lo](0)) lo = i;
    if (y[i](0) > y[hi](0)) hi = i;
  }
  LocalHull h;
  h.vertex_ids = {lo, hi};
  h.facets.push_back({Vector::Constant(1, 1.0), y[hi](0)});
  h.facets.push_back({Vector::Constant(1, -1.0), -y[lo](0)});
  return h;
}

double cross(const Vector& o, const Vector& a, const Vector& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

// Andrew's monotone chain; vertices counter-clockwise, near-collinear points dropped.
LocalHull hull_2d(const std::vector<Vector>& y) {
  std::vector<std::size_t> idx(y.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return y[a](0) < y[b](0) || (y[a](0) == y[b](0) && y[a](1) < y[b](1));
  });
  std::vector<std::size_t> chain(2 * idx.size());
  std::size_t k = 0;
  auto keep_turning = [&](std::size_t i) {
    while (k >= 2) {
      const Vector& o = y[chain[k - 2]];
      const Vector& a = y[chain[k - 1]];
      const Vector& b = y[i];
      if (cross(o, a, b) > kTol * (b - o).norm()) break;
      --k;
    }
    chain[k++] = i;
  };
  for (std::size_t i : idx) keep_turning(i);
  const std::size_t lower = k + 1;
  for (std::size_t j = idx.size() - 1; j-- > 0;) {
    const std::size_t i = idx[j];
    while (k >= lower) {
      const Vector& o = y[chain[k - 2]];
      const Vector& a = y[chain[k - 1]];
      if (cross(o, a, y[i]) > kTol * (y[i] - o).norm()) break;
      --k;
    }
    chain[k++] = i;
  }
  chain.resize(k - 1);

  LocalHull h;
  h.vertex_ids = chain;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Vector& a = y[chain[i]];
    const Vector& b = y[chain[(i + 1) % chain.size()]];
    Vector nrm(2);
    nrm << b(1) - a(1), a(0) - b(0);
    const double len = nrm.norm();
    if (len <= 0.0) continue;
    nrm /= len;
    h.facets.push_back({nrm, nrm.dot(a)});
  }
  return h;
}

// Brute-force facet search over point triples; fine for the few dozen points
// produced at desk scale.
LocalHull hull_3d(const std::vector<Vector>& y) {
  LocalHull h;
  const std::size_t k = y.size();
  auto known = [&](const Vector& nrm, double off) {
    return std::any_of(h.facets.begin(), h.facets.end(), [&](const Facet& f) {
      return (f.normal - nrm).norm() <= 1e-7 && std::abs(f.offset - off) <= kTol;
    });
  };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      for (std::size_t l = j + 1; l < k; ++l) {
        Eigen::Vector3d a = y[i];
        Eigen::Vector3d nrm = (Eigen::Vector3d(y[j]) - a).cross(Eigen::Vector3d(y[l]) - a);
        const double len = nrm.norm();
        if (len <= 1e-14) continue;
        nrm /= len;
        const double off = nrm.dot(a);
        double mx = -1e300;
        double mn = 1e300;
        for (const auto& p : y) {
          const double s = nrm.dot(Eigen::Vector3d(p)) - off;
          mx = std::max(mx, s);
          mn = std::min(mn, s);
        }
        if (mx <= kTol && !known(nrm, off)) h.facets.push_back({nrm, off});
        if (mn >= -kTol && !known(-nrm, -off)) h.facets.push_back({Vector(-nrm), -off});
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    Matrix normals(0, 3);
    for (const auto& f : h.facets) {
      if (std::abs(f.normal.dot(y[i]) - f.offset) <= kTol) {
        normals.conservativeResize(normals.rows() + 1, 3);
        normals.row(normals.rows() - 1) = f.normal.transpose();
      }
    }
    if (normals.rows() >= 3 && Eigen::FullPivLU<Matrix>(normals).rank() == 3) h.vertex_ids.push_back(i);
  }
  return h;
}

void normalize_rows(Matrix& H, Vector& b) {
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    const double n = H.row(i).norm();
    if (n > 0.0) {
      H.row(i) /= n;
      b(i) /= n;
    }
  }
}

// Points satisfying n linearly independent rows with equality and all rows
// within tolerance.
std::vector<Vector> enumerate_vertices(const Matrix& H, const Vector& b) {
  const auto n = H.cols();
  const auto m = H.rows();
  std::vector<Vector> out;
  auto feasible = [&](const Vector& x) { return ((H * x - b).array() <= kTol).all(); };
  if (n == 1) {
    for (Eigen::Index i = 0; i < m; ++i) {
      Vector x = Vector::Constant(1, b(i) / H(i, 0));
      if (feasible(x)) out.push_back(x);
    }
  } else if (n == 2) {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        const double det = H(i, 0) * H(j, 1) - H(i, 1) * H(j, 0);
        if (std::abs(det) <= 1e-12) continue;
        Vector x(2);
        x << (b(i) * H(j, 1) - H(i, 1) * b(j)) / det, (H(i, 0) * b(j) - b(i) * H(j, 0)) / det;
        if (feasible(x)) out.push_back(x);
      }
    }
  } else if (n == 3) {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        for (Eigen::Index l = j + 1; l < m; ++l) {
          Eigen::Matrix3d A;
          A << H.row(i), H.row(j), H.row(l);
          if (std::abs(A.determinant()) <= 1e-12) continue;
          Vector x = A.inverse() * Eigen::Vector3d(b(i), b(j), b(l));
          if (feasible(x)) out.push_back(x);
        }
      }
    }
  } else {
    throw GeometryError("vertex enumeration supports dimension <= 3, got " + std::to_string(n));
  }
  return dedupe(out);
}

bool is_bounded(const Matrix& H) {
  const auto n = H.cols();
  Matrix C(H.rows() + 2 * n, n);
  C << H, Matrix::Identity(n, n), -Matrix::Identity(n, n);
  Vector d(C.rows());
  d << Vector::Zero(H.rows()), Vector::Ones(2 * n);
  for (const auto& v : enumerate_vertices(C, d)) {
    if (v.lpNorm<Eigen::Infinity>() > 1e-6) return false;
  }
  return true;
}

Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Vector stack(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

void require_dim(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("polytope dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

// ---------------------------------------------------------------------------
// Polytope

Polytope Polytope::empty(std::size_t dim) {
  Polytope p;
  p.dim_ = dim;
  p.H_ = Matrix(0, static_cast<Eigen::Index>(dim));
  p.b_ = Vector(0);
  return p;
}

Polytope Polytope::from_box(const Box& box) {
  const std::size_t n = box.dim();
  bool flat = false;
  for (std::size_t i = 0; i < n; ++i) flat = flat || box[i].width() <= kTol;
  std::vector<Vector> corners;
  for (const auto& c : box.corners()) corners.push_back(Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(n)));
  if (flat || n > 2) return from_points(corners, n);

  Polytope p;
  p.dim_ = n;
  p.affine_dim_ = static_cast<int>(n);
  const auto N = static_cast<Eigen::Index>(n);
  p.H_ = stack(Matrix(Matrix::Identity(N, N)), Matrix(-Matrix::Identity(N, N)));
  p.b_ = Vector(2 * N);
  for (std::size_t i = 0; i < n; ++i) {
    p.b_(static_cast<Eigen::Index>(i)) = box[i].hi();
    p.b_(static_cast<Eigen::Index>(n + i)) = -box[i].lo();
  }
  if (n == 2) {
    // counter-clockwise
    p.vertices_ = {corners[0], corners[1], corners[3], corners[2]};
  } else {
    p.vertices_ = corners;
  }
  return p;
}

Polytope Polytope::from_hrep(const Matrix& H_in, const Vector& b_in) {
  if (H_in.rows() != b_in.size()) throw DimensionError("H and b row counts differ");
  const auto n = H_in.cols();
  Matrix H = H_in;
  Vector b = b_in;
  normalize_rows(H, b);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    if (H.row(i).norm() > 0.0) {
      keep.push_back(i);
    } else if (b(i) < -kTol) {
      return empty(static_cast<std::size_t>(n));
    }
  }
  Matrix Hk(static_cast<Eigen::Index>(keep.size()), n);
  Vector bk(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    Hk.row(static_cast<Eigen::Index>(i)) = H.row(keep[i]);
    bk(static_cast<Eigen::Index>(i)) = b(keep[i]);
  }
  if (!is_bounded(Hk)) throw GeometryError("halfspace representation is unbounded");
  auto verts = enumerate_vertices(Hk, bk);
  if (verts.empty()) return empty(static_cast<std::size_t>(n));
  return from_points(verts, static_cast<std::size_t>(n));
}

Polytope Polytope::from_points(const std::vector<Vector>& points_in, std::size_t dim) {
  for (const auto& p : points_in) require_dim(static_cast<std::size_t>(p.size()), dim);
  const auto pts = dedupe(points_in);
  if (pts.empty()) return empty(dim);
  const auto n = static_cast<Eigen::Index>(dim);
  const auto k = static_cast<Eigen::Index>(pts.size());

  Vector c = Vector::Zero(n);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(k);
  Matrix M(n, k);
  for (Eigen::Index i = 0; i < k; ++i) M.col(i) = pts[static_cast<std::size_t>(i)] - c;

  Matrix U = Matrix::Identity(n, n);
  if (k > 1) U = Eigen::JacobiSVD<Matrix>(M, Eigen::ComputeFullU).matrixU();
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> normal_dirs;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector proj = U.col(j).transpose() * M;
    const double spread = k > 1 ? proj.maxCoeff() - proj.minCoeff() : 0.0;
    (spread > kTol ? kept : normal_dirs).push_back(j);
  }

  auto build = [&](const std::vector<Eigen::Index>& basis_cols, const std::vector<Eigen::Index>& null_cols) {
    const auto r = static_cast<Eigen::Index>(basis_cols.size());
    Matrix B(n, r);
    for (Eigen::Index j = 0; j < r; ++j) B.col(j) = U.col(basis_cols[static_cast<std::size_t>(j)]);
    std::vector<Vector> y;
    y.reserve(pts.size());
    for (const auto& p : pts) y.push_back(B.transpose() * (p - c));

    LocalHull local;
    if (r == 0) {
      local.vertex_ids = {0};
    } else if (r == 1) {
      local = hull_1d(y);
    } else if (r == 2) {
      local = hull_2d(y);
    } else if (r == 3) {
      local = hull_3d(y);
    } else {
      throw GeometryError("convex hull supports dimension <= 3");
    }

    Polytope out;
    out.dim_ = dim;
    out.affine_dim_ = static_cast<int>(r);
    const auto rows = static_cast<Eigen::Index>(local.facets.size() + 2 * null_cols.size());
    out.H_ = Matrix(rows, n);
    out.b_ = Vector(rows);
    Eigen::Index row = 0;
    for (const auto& f : local.facets) {
      const Vector h = B * f.normal;
      out.H_.row(row) = h.transpose();
      out.b_(row++) = f.offset + h.dot(c);
    }
    for (Eigen::Index j : null_cols) {
      const Vector z = U.col(j);
      out.H_.row(row) = z.transpose();
      out.b_(row++) = z.dot(c);
      out.H_.row(row) = -z.transpose();
      out.b_(row++) = -z.dot(c);
    }
    normalize_rows(out.H_, out.b_);
    for (auto id : local.vertex_ids) out.vertices_.push_back(pts[id]);
    return out;
  };

  Polytope p = build(kept, normal_dirs);
  // A nearly flat cloud can pass the spread test yet collapse in the hull;
  // retry in one dimension less.
  const auto needed = static_cast<std::size_t>(p.affine_dim_) + 1;
  if (p.affine_dim_ >= 2 && (p.vertices_.size() < needed || p.H_.rows() < static_cast<Eigen::Index>(needed))) {
    auto fewer = kept;
    normal_dirs.push_back(fewer.back());
    fewer.pop_back();
    return build(fewer, normal_dirs);
  }
  return p;
}

Vector Polytope::centroid() const {
  if (is_empty()) throw GeometryError("centroid of an empty polytope");
  Vector c = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

bool Polytope::contains(const Vector& p, double tol) const {
  if (is_empty()) return false;
  return ((H_ * p - b_).array() <= tol).all();
}

Polytope Polytope::translated(const Vector& t) const {
  Polytope out = *this;
  if (is_empty()) return out;
  out.b_ += H_ * t;
  for (auto& v : out.vertices_) v += t;
  return out;
}

Box Polytope::bounding_box() const {
  if (is_empty()) throw GeometryError("bounding box of an empty polytope");
  std::vector<Interval> axes;
  for (std::size_t i = 0; i < dim_; ++i) {
    double lo = vertices_.front()(static_cast<Eigen::Index>(i));
    double hi = lo;
    for (const auto& v : vertices_) {
      lo = std::min(lo, v(static_cast<Eigen::Index>(i)));
      hi = std::max(hi, v(static_cast<Eigen::Index>(i)));
    }
    axes.emplace_back(lo, hi);
  }
  return Box(std::move(axes));
}

// ---------------------------------------------------------------------------
// PolyUnion

PolyUnion::PolyUnion(std::size_t dim, std::vector<Polytope> parts) : dim_(dim) {
  for (auto& p : parts) add(std::move(p));
}

void PolyUnion::add(Polytope p) {
  require_dim(p.dim(), dim_);
  if (!p.is_empty()) parts_.push_back(std::move(p));
}

bool PolyUnion::contains(const Vector& p, double tol) const {
  return std::any_of(parts_.begin(), parts_.end(), [&](const Polytope& q) { return q.contains(p, tol); });
}

// ---------------------------------------------------------------------------
// Operations

Polytope convex_hull(const std::vector<Vector>& points, std::size_t dim) { return Polytope::from_points(points, dim); }

Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  require_dim(p.dim(), q.dim());
  if (p.is_empty() || q.is_empty()) return Polytope::empty(p.dim());
  std::vector<Vector> sums;
  sums.reserve(p.vertices().size() * q.vertices().size());
  for (const auto& a : p.vertices()) {
    for (const auto& b : q.vertices()) sums.push_back(a + b);
  }
  return Polytope::from_points(sums, p.dim());
}

Polytope linear_image(const Matrix& A, const Polytope& p) {
  require_dim(static_cast<std::size_t>(A.cols()), p.dim());
  const auto out_dim = static_cast<std::size_t>(A.rows());
  if (p.is_empty()) return Polytope::empty(out_dim);
  std::vector<Vector> img;
  img.reserve(p.vertices().size());
  for (const auto& v : p.vertices()) img.push_back(A * v);
  return Polytope::from_points(img, out_dim);
}

Polytope intersection(const Polytope& p, const Polytope& q) {
  require_dim(p.dim(), q.dim());
  if (p.is_empty() || q.is_empty()) return Polytope::empty(p.dim());
  return Polytope::from_hrep(stack(p.H(), q.H()), stack(p.b(), q.b()));
}

Polytope insertion_set(const Polytope& p, const Polytope& q) {
  require_dim(p.dim(), q.dim());
  if (p.is_empty() || q.is_empty()) return Polytope::empty(q.dim());
  Vector beta(q.H().rows());
  for (Eigen::Index i = 0; i < q.H().rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& v : p.vertices()) mx = std::max(mx, q.H().row(i).dot(v));
    beta(i) = mx;
  }
  return Polytope::from_hrep(q.H(), q.b() - beta);
}

namespace {

Vector min_over_vertices(const Matrix& H, const std::vector<Vector>& verts) {
  Vector out(H.rows());
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& v : verts) mn = std::min(mn, H.row(i).dot(v));
    out(i) = mn;
  }
  return out;
}

}  // namespace

Polytope overlap_set(const Polytope& p, const Polytope& q) {
  require_dim(p.dim(), q.dim());
  if (p.is_empty() || q.is_empty()) return Polytope::empty(q.dim());
  if (p.dim() > 2) {
    // The two-sided halfspace description misses edge-edge separations in 3-D.
    return minkowski_sum(q, linear_image(-Matrix::Identity(static_cast<Eigen::Index>(p.dim()), static_cast<Eigen::Index>(p.dim())), p));
  }
  const Vector alpha = min_over_vertices(q.H(), p.vertices());
  const Vector gamma = min_over_vertices(p.H(), q.vertices());
  return Polytope::from_hrep(stack(q.H(), Matrix(-p.H())), stack(Vector(q.b() - alpha), Vector(p.b() - gamma)));
}

Halfspace overlap_halfspace(const Polytope& p, const Halfspace& h) {
  if (p.is_empty()) throw GeometryError("overlap of an empty polytope");
  require_dim(p.dim(), static_cast<std::size_t>(h.h.size()));
  double alpha = std::numeric_limits<double>::infinity();
  for (const auto& v : p.vertices()) alpha = std::min(alpha, h.h.dot(v));
  return {h.h, h.b - alpha};
}

bool intersects(const Polytope& p, const Polytope& q) { return !intersection(p, q).is_empty(); }

bool intersects_by_halfspaces(const Polytope& p, const Polytope& q) {
  require_dim(p.dim(), q.dim());
  if (p.is_empty() || q.is_empty()) return false;
  const Vector a = min_over_vertices(q.H(), p.vertices());
  const Vector g = min_over_vertices(p.H(), q.vertices());
  return ((a - q.b()).array() <= kTol).all() && ((g - p.b()).array() <= kTol).all();
}

PolyUnion set_difference(const Polytope& p, const std::vector<Polytope>& qs) {
  PolyUnion out(p.dim());
  if (p.is_empty()) return out;
  std::vector<Polytope> pieces{p};
  for (const auto& q : qs) {
    require_dim(q.dim(), p.dim());
    if (q.is_empty()) continue;
    std::vector<Polytope> next;
    for (auto& piece : pieces) {
      const Polytope common = intersection(piece, q);
      if (common.is_empty() || common.affine_dim() < piece.affine_dim()) {
        next.push_back(std::move(piece));
        continue;
      }
      // Walk q's facets: the part of piece beyond facet i and inside facets < i.
      Matrix H = piece.H();
      Vector b = piece.b();
      for (Eigen::Index i = 0; i < q.H().rows(); ++i) {
        Matrix Hi = stack(H, Matrix(-q.H().row(i)));
        Vector bi = stack(b, Vector::Constant(1, -q.b()(i)));
        Polytope region = Polytope::from_hrep(Hi, bi);
        if (!region.is_empty() && region.affine_dim() == piece.affine_dim()) next.push_back(std::move(region));
        H = stack(H, Matrix(q.H().row(i)));
        b = stack(b, Vector::Constant(1, q.b()(i)));
      }
    }
    pieces = std::move(next);
    if (pieces.empty()) break;
  }
  for (auto& piece : pieces) out.add(std::move(piece));
  return out;
}

namespace {

double polygon_area(const std::vector<Eigen::Vector2d>& pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % pts.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(a);
}

double volume_3d(const Polytope& p) {
  const Vector c = p.centroid();
  double vol = 0.0;
  for (Eigen::Index i = 0; i < p.H().rows(); ++i) {
    const Eigen::Vector3d h = p.H().row(i).transpose();
    std::vector<Eigen::Vector3d> on;
    for (const auto& v : p.vertices()) {
      if (std::abs(h.dot(Eigen::Vector3d(v)) - p.b()(i)) <= 1e-7) on.emplace_back(v);
    }
    if (on.size() < 3) continue;
    Eigen::Vector3d fc = Eigen::Vector3d::Zero();
    for (const auto& v : on) fc += v;
    fc /= static_cast<double>(on.size());
    Eigen::Vector3d e1 = (on.front() - fc).normalized();
    Eigen::Vector3d e2 = h.cross(e1);
    std::vector<Eigen::Vector2d> flat;
    for (const auto& v : on) flat.emplace_back((v - fc).dot(e1), (v - fc).dot(e2));
    std::sort(flat.begin(), flat.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
      return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
    });
    vol += polygon_area(flat) * (p.b()(i) - h.dot(Eigen::Vector3d(c))) / 3.0;
  }
  return vol;
}

}  // namespace

double volume(const Polytope& p) {
  if (!p.is_full_dimensional()) return 0.0;
  switch (p.dim()) {
    case 1: {
      const Box bb = p.bounding_box();
      return bb[0].width();
    }
    case 2: {
      std::vector<Eigen::Vector2d> pts;
      for (const auto& v : p.vertices()) pts.emplace_back(v(0), v(1));
      return polygon_area(pts);
    }
    case 3: return volume_3d(p);
    default: throw GeometryError("volume supports dimension <= 3");
  }
}

double union_volume(const PolyUnion& u) {
  double total = 0.0;
  std::vector<Polytope> placed;
  for (const auto& part : u.parts()) {
    const PolyUnion fresh = set_difference(part, placed);
    for (const auto& piece : fresh.parts()) total += volume(piece);
    placed.push_back(part);
  }
  return total;
}

double union_volume(const BoxUnion& u) { return u.volume(); }

}  // namespace cis::geometry

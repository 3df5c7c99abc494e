#pragma once

// Small dense helpers shared by the classifiers: rank decisions, orthogonal
// completions, skew normal forms and the elementary Lorentz frames (boosts,
// null rotations) the constructive reductions are built from.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "kvf/errors.hpp"
#include "kvf/minkowski.hpp"

namespace kvf::linalg {

struct NullSpace {
  Matrix basis;         // orthonormal columns spanning the numerical kernel
  Matrix range;         // orthonormal columns spanning the row space
  int rank = 0;
  double sigma_max = 0.0;
  // Distance of the singular values from the rank threshold, relative to
  // sigma_max: min over i of |log10(sigma_i / threshold)|. Small values mean
  // the rank decision is fragile.
  double margin = 0.0;
};

/// Kernel of m with singular values <= tol * scale counted as zero; scale
/// defaults to the largest singular value of m itself.
inline NullSpace null_space(const Matrix& m, double tol, double scale = -1.0) {
  NullSpace out;
  const int cols = static_cast<int>(m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  out.sigma_max = s.size() > 0 ? s(0) : 0.0;
  if (scale < 0.0) scale = out.sigma_max;
  if (scale == 0.0) {
    out.basis = Matrix::Identity(cols, cols);
    out.range = Matrix(cols, 0);
    out.margin = std::numeric_limits<double>::infinity();
    return out;
  }
  const double threshold = tol * scale;
  out.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) ++out.rank;
    const double ratio = std::max(s(i), 1e-300) / threshold;
    out.margin = std::min(out.margin, std::abs(std::log10(ratio)));
  }
  out.range = svd.matrixV().leftCols(out.rank);
  out.basis = svd.matrixV().rightCols(cols - out.rank);
  return out;
}

/// Orthonormal basis of the orthogonal complement of span(columns of a).
inline Matrix orthogonal_complement(const Matrix& a, int dim) {
  if (a.cols() == 0) return Matrix::Identity(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  return q.rightCols(dim - a.cols());
}

/// Orthogonal reflection of R^m mapping unit vector `from` onto unit vector `to`.
inline Matrix reflection_between(const Vector& from, const Vector& to) {
  const int m = static_cast<int>(from.size());
  Vector w = from - to;
  const double nw = w.norm();
  if (nw < 1e-14) return Matrix::Identity(m, m);
  w /= nw;
  return Matrix::Identity(m, m) - 2.0 * w * w.transpose();
}

/// Euclidean rotation-or-reflection of R^m whose column `axis` equals the
/// unit vector u; the other columns complete an orthonormal basis.
inline Matrix frame_with_column(const Vector& u, int axis) {
  const int m = static_cast<int>(u.size());
  return reflection_between(Vector::Unit(m, axis), u);
}

/// Pure boost taking e_0 to the future unit timelike vector t.
inline Matrix boost_to(const Vector& t) {
  const int size = static_cast<int>(t.size());
  const Vector u = t.tail(size - 1);
  const double gamma = std::sqrt(1.0 + u.squaredNorm());
  Matrix b = Matrix::Identity(size, size);
  b(0, 0) = gamma;
  b.block(1, 0, size - 1, 1) = u;
  b.block(0, 1, 1, size - 1) = u.transpose();
  b.block(1, 1, size - 1, size - 1) += u * u.transpose() / (1.0 + gamma);
  return b;
}

struct SkewNormalForm {
  Matrix q;               // orthogonal; columns (2i, 2i+1) span the i-th plane
  std::vector<double> b;  // descending, positive; q^T h q has (2i,2i+1) entry b_i
  double margin = 0.0;    // rank margin of the underlying SVD
};

/// Real orthogonal reduction of a skew-symmetric h to block form
/// q^T h q = diag([[0,b1],[-b1,0]], ..., 0, ..., 0), b descending.
/// Singular values below tol * scale count as zero (scale defaults to the
/// largest singular value of h).
inline SkewNormalForm skew_normal_form(const Matrix& h, double tol, double scale = -1.0) {
  const int m = static_cast<int>(h.rows());
  SkewNormalForm out;
  if (m == 0) {
    out.q = Matrix(0, 0);
    out.margin = std::numeric_limits<double>::infinity();
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  if (scale < 0.0) scale = s(0);
  int rank = 0;
  out.margin = std::numeric_limits<double>::infinity();
  if (scale > 0.0) {
    const double threshold = tol * scale;
    for (int i = 0; i < m; ++i) {
      if (s(i) > threshold) ++rank;
      out.margin = std::min(out.margin, std::abs(std::log10(std::max(s(i), 1e-300) / threshold)));
    }
  }
  if (rank % 2 != 0)
    throw ClassificationUnstable("skew normal form: odd numerical rank", out.margin);

  // Planes are peeled off in descending singular-value order. Each plane is
  // (u, w) with u = h w / |h w|, so u^T h w = |h w| > 0.
  std::vector<Vector> chosen;
  struct Plane {
    Vector u, w;
    double b;
  };
  std::vector<Plane> planes;
  const Matrix& v = svd.matrixV();
  for (int i = 0; i < m && static_cast<int>(planes.size()) * 2 < rank; ++i) {
    Vector w = v.col(i);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& c : chosen) w -= c.dot(w) * c;
    if (w.norm() < 0.5) continue;
    w.normalize();
    Vector hw = h * w;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& c : chosen) hw -= c.dot(hw) * c;
    hw -= w.dot(hw) * w;
    const double nb = hw.norm();
    if (nb == 0.0) continue;
    Vector u = hw / nb;
    // Deterministic orientation: largest-magnitude entry of w positive.
    Eigen::Index at = 0;
    w.cwiseAbs().maxCoeff(&at);
    if (w(at) < 0) {
      w = -w;
      u = -u;
    }
    chosen.push_back(u);
    chosen.push_back(w);
    planes.push_back({u, w, u.dot(h * w)});
  }
  if (static_cast<int>(planes.size()) * 2 != rank)
    throw ClassificationUnstable("skew normal form: could not pair singular vectors", out.margin);

  std::stable_sort(planes.begin(), planes.end(),
                   [](const Plane& a, const Plane& b) { return a.b > b.b; });
  out.q = Matrix::Zero(m, m);
  for (int i = 0; i < static_cast<int>(planes.size()); ++i) {
    // Rotate within the plane (h is a multiple of J there) so that u points
    // along the projection of e_{2i}; canonical inputs then give q = I.
    Vector u = planes[i].u, w = planes[i].w;
    const double cu = u(2 * i), cw = w(2 * i);
    const double len = std::hypot(cu, cw);
    if (len > 1e-8) {
      const Vector u2 = (cu * u + cw * w) / len;
      w = (-cw * u + cu * w) / len;
      u = u2;
    }
    out.q.col(2 * i) = u;
    out.q.col(2 * i + 1) = w;
    out.b.push_back(planes[i].b);
  }
  // Kernel: greedy Gram-Schmidt on coordinate vectors, largest remainder first.
  std::vector<Vector> basis;
  for (int j = 0; j < rank; ++j) basis.push_back(out.q.col(j));
  for (int col = rank; col < m; ++col) {
    Vector best;
    double best_norm = -1.0;
    for (int j = 0; j < m; ++j) {
      Vector v = Vector::Unit(m, j);
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& c : basis) v -= c.dot(v) * c;
      const double nv = v.norm();
      if (nv > best_norm + 1e-12) {
        best_norm = nv;
        best = v;
      }
    }
    best /= best_norm;
    basis.push_back(best);
    out.q.col(col) = best;
  }
  return out;
}

/// Completes pseudo-orthonormal vectors into a frame of the coordinate
/// subspace spanned by e_i, i in `indices`. `given` columns must already be
/// eta-orthonormal and supported on `indices`. Returns the extra vectors,
/// the timelike one (if any) first.
inline Matrix eta_completion(const Matrix& given, const std::vector<int>& indices, int size) {
  const int want = static_cast<int>(indices.size()) - static_cast<int>(given.cols());
  std::vector<Vector> basis;
  std::vector<double> norms;
  for (int j = 0; j < given.cols(); ++j) {
    basis.push_back(given.col(j));
    norms.push_back(minkowski_inner(Vector(given.col(j)), Vector(given.col(j))));
  }
  std::vector<Vector> extra;
  for (int idx : indices) {
    if (static_cast<int>(extra.size()) == want) break;
    Vector v = Vector::Unit(size, idx);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < basis.size(); ++k)
        v -= (minkowski_inner(basis[k], v) / norms[k]) * basis[k];
    const double nn = minkowski_inner(v, v);
    // Candidates are unit vectors; a tiny remainder means e_idx is already spanned.
    if (v.norm() < 1e-6 || std::abs(nn) < 1e-3 * v.squaredNorm()) continue;
    v /= std::sqrt(std::abs(nn));
    basis.push_back(v);
    norms.push_back(nn > 0 ? 1.0 : -1.0);
    extra.push_back(v);
  }
  if (static_cast<int>(extra.size()) != want)
    throw ClassificationUnstable("eta_completion: could not complete frame", 0.0);
  std::stable_partition(extra.begin(), extra.end(),
                        [](const Vector& v) { return minkowski_inner(v, v) < 0; });
  Matrix out(size, want);
  for (int j = 0; j < want; ++j) out.col(j) = extra[j];
  return out;
}

/// Null rotation about l = E_i0 + sign E_i1 with parameters beta on the
/// frame columns `transverse`:
///   e_j -> e_j + beta_j l,  k -> k + 2 sum beta_j e_j + |beta|^2 l,
/// where k = E_i0 - sign E_i1. Returns the rotated frame.
inline Matrix null_rotation(const Matrix& frame, int i0, int i1, double sign,
                            const std::vector<int>& transverse, const Vector& beta) {
  Matrix out = frame;
  const Vector l = frame.col(i0) + sign * frame.col(i1);
  Vector k = frame.col(i0) - sign * frame.col(i1);
  for (std::size_t j = 0; j < transverse.size(); ++j) {
    k += 2.0 * beta(j) * frame.col(transverse[j]);
    out.col(transverse[j]) += beta(j) * l;
  }
  k += beta.squaredNorm() * l;
  out.col(i0) = 0.5 * (l + k);
  out.col(i1) = sign * 0.5 * (l - k);
  return out;
}

/// Null boost l -> s l, k -> k / s for l = E_i0 + sign E_i1.
inline Matrix null_boost(const Matrix& frame, int i0, int i1, double sign, double s) {
  Matrix out = frame;
  const Vector l = s * (frame.col(i0) + sign * frame.col(i1));
  const Vector k = (frame.col(i0) - sign * frame.col(i1)) / s;
  out.col(i0) = 0.5 * (l + k);
  out.col(i1) = sign * 0.5 * (l - k);
  return out;
}

/// Frame pair (E_a, E_b) with E_a + sign E_b = l for a null vector l with
/// l^0 != 0: E_a = (l + k)/2, E_b = sign (l - k)/2, where k is the spatial
/// mirror of l scaled so that eta(l, k) = -2.
inline std::pair<Vector, Vector> null_pair_frame(const Vector& l, double sign) {
  Vector k = -l;
  k(0) = l(0);
  k /= l(0) * l(0);
  return {0.5 * (l + k), sign * 0.5 * (l - k)};
}

} // namespace kvf::linalg

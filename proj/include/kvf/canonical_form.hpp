#pragma once

// Canonical forms of a constant 2-form under O(n,1).
//
//   a: F = 0
//   b: b1 dx1dx2 + b2 dx3dx4 + ...
//   c: a dx0dx1
//   d: a dx0dx1 + b1 dx2dx3 + ...
//   e: dx0dx1 + dx1dx2
//   f: dx0dx1 + dx1dx2 + b1 dx3dx4 + ...
//
// canonicalize_2form builds the reducing frame explicitly (boosts, null
// rotations, spatial rotations) and returns it as a LorentzMap witness.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kvf/errors.hpp"
#include "kvf/linalg.hpp"
#include "kvf/minkowski.hpp"
#include "kvf/spectral.hpp"

namespace kvf {

enum class TwoFormTag { A, B, C, D, E, F };

inline char letter(TwoFormTag t) { return static_cast<char>('a' + static_cast<int>(t)); }

inline TwoFormTag two_form_tag_from(char c) {
  if (c < 'a' || c > 'f') throw ParamViolation(std::string("unknown 2-form class '") + c + "'");
  return static_cast<TwoFormTag>(c - 'a');
}

struct TwoFormClass {
  TwoFormTag tag = TwoFormTag::A;
  double a = 0.0;          // tags c, d
  std::vector<double> b;   // tags b, d, f
};

/// F = sum_k u_k dx^k dx^{k+1}
struct SuperdiagonalArray {
  std::vector<double> u;
};

inline SuperdiagonalArray superdiagonal_of(const TwoForm& F) {
  SuperdiagonalArray out;
  for (int k = 0; k + 1 < F.size(); ++k) out.u.push_back(F(k, k + 1));
  return out;
}

namespace detail {

inline void check_b_list(const std::vector<double>& b) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(b[i] > 0.0)) throw ParamViolation("rotation strengths must be positive");
    if (i > 0 && b[i] > b[i - 1]) throw ParamViolation("rotation strengths must be descending");
  }
}

// Descending order; runs equal within 1e-9 relative are replaced by their mean.
inline std::vector<double> merge_strengths(std::vector<double> b) {
  std::sort(b.begin(), b.end(), std::greater<>());
  for (std::size_t i = 0; i < b.size();) {
    std::size_t j = i + 1;
    double sum = b[i];
    while (j < b.size() && b[i] - b[j] <= 1e-9 * b[i]) sum += b[j++];
    for (std::size_t k = i; k < j; ++k) b[k] = sum / static_cast<double>(j - i);
    i = j;
  }
  return b;
}

// First index of the rotation planes for each tag.
inline int plane_offset(TwoFormTag t) {
  switch (t) {
    case TwoFormTag::B: return 1;
    case TwoFormTag::D: return 2;
    case TwoFormTag::F: return 3;
    default: return 0;
  }
}

} // namespace detail

/// Minimal n for a class with r rotation planes.
inline int minimal_dimension(TwoFormTag tag, int r) {
  switch (tag) {
    case TwoFormTag::A: return 1;
    case TwoFormTag::B: return std::max(1, 2 * r);
    case TwoFormTag::C: return 1;
    case TwoFormTag::D: return 2 * r + 1;
    case TwoFormTag::E: return 2;
    case TwoFormTag::F: return 2 * r + 2;
  }
  return 1;
}

inline TwoForm canonical_2form_matrix(const TwoFormClass& cls, Dim d) {
  const int r = static_cast<int>(cls.b.size());
  const bool wants_b = cls.tag == TwoFormTag::B || cls.tag == TwoFormTag::D || cls.tag == TwoFormTag::F;
  if (wants_b && r == 0) throw ParamViolation("class needs at least one rotation plane");
  if (!wants_b && r != 0) throw ParamViolation("class carries no rotation planes");
  const bool wants_a = cls.tag == TwoFormTag::C || cls.tag == TwoFormTag::D;
  if (wants_a && !(cls.a > 0.0)) throw ParamViolation("boost strength a must be positive");
  detail::check_b_list(cls.b);
  if (d.n() < minimal_dimension(cls.tag, r))
    throw DimensionTooSmall(std::string("class ") + letter(cls.tag) + " with r=" + std::to_string(r) +
                            " needs n >= " + std::to_string(minimal_dimension(cls.tag, r)));

  Matrix m = Matrix::Zero(d.size(), d.size());
  auto put = [&](int i, int j, double v) {
    m(i, j) = v;
    m(j, i) = -v;
  };
  if (wants_a) put(0, 1, cls.a);
  if (cls.tag == TwoFormTag::E || cls.tag == TwoFormTag::F) {
    put(0, 1, 1.0);
    put(1, 2, 1.0);
  }
  const int offset = detail::plane_offset(cls.tag);
  for (int i = 0; i < r; ++i) put(offset + 2 * i, offset + 2 * i + 1, cls.b[i]);
  return TwoForm(m);
}

struct SuperdiagonalReduction {
  SuperdiagonalArray array;
  LorentzMap rotation;  // diag(1, SO(n))
};

/// Spatial rotation bringing F to superdiagonal form, one row at a time.
inline SuperdiagonalReduction superdiagonal_reduce(const TwoForm& F) {
  const int size = F.size();
  Matrix frame = Matrix::Identity(size, size);
  const double scale = F.norm();
  for (int k = 0; k + 2 < size; ++k) {
    const Matrix current = frame.transpose() * F.matrix() * frame;
    const int tail = size - k - 1;
    Vector v = current.row(k).tail(tail).transpose();
    const double nv = v.norm();
    if (nv <= 1e-14 * scale) continue;
    // Orthogonal g on span(e_{k+1}..e_n) with first column v/|v| and det +1.
    Matrix g = linalg::reflection_between(Vector::Unit(tail, 0), v / nv);
    if (g.determinant() < 0) g.col(tail - 1) *= -1.0;
    frame.rightCols(tail) = frame.rightCols(tail) * g;
  }
  SuperdiagonalReduction out;
  out.rotation = frame_map(frame);
  out.array = superdiagonal_of(conjugate(out.rotation, F));
  return out;
}

struct TwoFormReport {
  TwoFormClass cls;
  LorentzMap lambda;       // conjugate(lambda, F) is canonical
  double residual = 0.0;   // max-abs witness error
  double margin = std::numeric_limits<double>::infinity();
  Invariants invariants;
};

namespace detail {

// Unit-time null vector in span(k) (columns), from the Gram eigenvector
// closest to zero.
inline Vector null_direction(const Matrix& k) {
  const Matrix gram = k.transpose() * metric(static_cast<int>(k.rows())) * k;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  Eigen::Index at = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&at);
  Vector l = k * es.eigenvectors().col(at);
  return l / l(0);
}

inline Vector timelike_direction(const Matrix& k) {
  const Matrix gram = k.transpose() * metric(static_cast<int>(k.rows())) * k;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  Vector t = k * es.eigenvectors().col(0);
  t /= std::sqrt(-minkowski_inner(t, t));
  if (t(0) < 0) t = -t;
  return t;
}

// Spatial frame diag(1, P) with P e_axis = s (s a unit spatial vector).
inline Matrix spatial_frame(const Vector& s, int axis) {
  const int size = static_cast<int>(s.size()) + 1;
  Matrix b = Matrix::Identity(size, size);
  b.bottomRightCorner(size - 1, size - 1) = linalg::frame_with_column(s, axis - 1);
  return b;
}

// Skew normal form of F on frame columns `cols`. Rotated column i is
// written to slot targets(r)[i], where r is the number of planes found.
template <class Targets>
std::vector<double> rotate_planes(Matrix& frame, const TwoForm& F, const std::vector<int>& cols,
                                  Targets targets, double tol, double& margin) {
  const int m = static_cast<int>(cols.size());
  Matrix sub(frame.rows(), m);
  for (int j = 0; j < m; ++j) sub.col(j) = frame.col(cols[j]);
  const linalg::SkewNormalForm snf = linalg::skew_normal_form(sub.transpose() * F.matrix() * sub, tol, F.norm());
  margin = std::min(margin, snf.margin);
  const Matrix rotated = sub * snf.q;
  const std::vector<int> slots = targets(static_cast<int>(snf.b.size()));
  if (static_cast<int>(slots.size()) != m)
    throw ClassificationUnstable("rotation planes do not fit the canonical layout", margin);
  for (int i = 0; i < m; ++i) frame.col(slots[i]) = rotated.col(i);
  return snf.b;
}

} // namespace detail

/// Reduces F to one of the classes a-f. Throws ClassificationUnstable if the
/// constructed witness does not reproduce the canonical form.
inline TwoFormReport canonicalize_2form(const TwoForm& F, double tol = kDefaultTol) {
  const int size = F.size();
  const int n = size - 1;
  TwoFormReport out;
  out.invariants = invariants(F, tol);
  const SpectrumSummary& spec = out.invariants.spectrum;
  const KernelCausalType& ker = out.invariants.kernel;
  out.margin = std::min(spec.margin, spec.rank_margin);
  Matrix frame = Matrix::Identity(size, size);
  std::vector<double> b;

  if (F.norm() == 0.0 || ker.tag == KernelTag::Full) {
    out.cls.tag = TwoFormTag::A;
  } else if (ker.tag == KernelTag::Timelike) {
    const Matrix k = linalg::null_space(sharp(F), tol).basis;
    frame = linalg::boost_to(detail::timelike_direction(k));
    std::vector<int> cols;
    for (int j = 1; j <= n; ++j) cols.push_back(j);
    b = detail::rotate_planes(frame, F, cols, [&](int) { return cols; }, tol, out.margin);
    out.cls.tag = b.empty() ? TwoFormTag::A : TwoFormTag::B;
  } else if (ker.tag == KernelTag::Spacelike || ker.tag == KernelTag::Trivial) {
    if (!spec.real_pair)
      throw ClassificationUnstable("spacelike kernel without a real eigenvalue pair", out.margin);
    const double a = *spec.real_pair;
    const Matrix m = sharp(F);
    Eigen::JacobiSVD<Matrix> svd(m - a * Matrix::Identity(size, size), Eigen::ComputeFullV);
    Vector l = svd.matrixV().col(size - 1);
    l /= l(0);
    Vector s = l.tail(n);
    s.normalize();
    // E0 - E1 = e0 + s.
    frame = detail::spatial_frame(-s, 1);
    std::vector<int> transverse;
    for (int j = 2; j <= n; ++j) transverse.push_back(j);
    if (!transverse.empty()) {
      const Vector kvec = frame.col(0) + frame.col(1);
      const int t = static_cast<int>(transverse.size());
      Matrix h(t, t);
      Vector g(t);
      for (int i = 0; i < t; ++i) {
        g(i) = F.evaluate(kvec, frame.col(transverse[i]));
        for (int j = 0; j < t; ++j) h(i, j) = F.evaluate(frame.col(transverse[i]), frame.col(transverse[j]));
      }
      const Matrix system = a * Matrix::Identity(t, t) + h;
      Eigen::PartialPivLU<Matrix> lu(system);
      if (lu.rcond() < 1e-14)
        throw ClassificationUnstable("singular shear system", out.margin);
      const Vector beta = lu.solve(0.5 * g);
      frame = linalg::null_rotation(frame, 0, 1, -1.0, transverse, beta);
      b = detail::rotate_planes(frame, F, transverse, [&](int) { return transverse; }, tol,
                                out.margin);
    }
    out.cls.a = a;
    out.cls.tag = b.empty() ? TwoFormTag::C : TwoFormTag::D;
  } else {  // Null kernel
    const Matrix k = linalg::null_space(sharp(F), tol).basis;
    const Vector l = detail::null_direction(k);
    Vector s = l.tail(n);
    s.normalize();
    if (n < 2) throw ClassificationUnstable("null kernel needs n >= 2", out.margin);
    // E0 + E2 = l.
    frame = detail::spatial_frame(s, 2);
    std::vector<int> transverse;
    for (int j = 3; j <= n; ++j) transverse.push_back(j);
    transverse.push_back(1);
    // Planes go to 3, 4, ...; kernel directions after the planes, then 1.
    b = detail::rotate_planes(
        frame, F, transverse,
        [&](int r) {
          std::vector<int> slots;
          if (2 * r + 2 > n) return slots;
          for (int j = 3; j <= n; ++j) slots.push_back(j);
          slots.push_back(1);
          return slots;
        },
        tol, out.margin);
    const int r = static_cast<int>(b.size());
    // Shear along l to clear g = F(k, .) on the planes.
    {
      const Vector kvec = frame.col(0) - frame.col(2);
      std::vector<int> plane_cols;
      Vector beta(2 * r);
      for (int i = 0; i < r; ++i) {
        const int p = 3 + 2 * i, q = p + 1;
        const double gp = F.evaluate(kvec, frame.col(p));
        const double gq = F.evaluate(kvec, frame.col(q));
        plane_cols.push_back(p);
        plane_cols.push_back(q);
        beta(2 * i) = -gq / (2.0 * b[i]);
        beta(2 * i + 1) = gp / (2.0 * b[i]);
      }
      if (r > 0) frame = linalg::null_rotation(frame, 0, 2, 1.0, plane_cols, beta);
    }
    // Align the remaining g (on kernel directions) with E1.
    std::vector<int> kernel_cols{1};
    for (int j = 3 + 2 * r; j <= n; ++j) kernel_cols.push_back(j);
    const int kc = static_cast<int>(kernel_cols.size());
    const Vector kvec = frame.col(0) - frame.col(2);
    Vector g(kc);
    Matrix sub(size, kc);
    for (int i = 0; i < kc; ++i) {
      sub.col(i) = frame.col(kernel_cols[i]);
      g(i) = F.evaluate(kvec, sub.col(i));
    }
    const double gnorm = g.norm();
    if (gnorm <= tol * F.norm()) throw ClassificationUnstable("null rotation part vanished", out.margin);
    const Matrix rot = sub * linalg::frame_with_column(g / gnorm, 0);
    for (int i = 0; i < kc; ++i) frame.col(kernel_cols[i]) = rot.col(i);
    frame = linalg::null_boost(frame, 0, 2, 1.0, gnorm / 2.0);
    out.cls.tag = b.empty() ? TwoFormTag::E : TwoFormTag::F;
  }

  if (b.size() != spec.imag_moduli.size())
    throw ClassificationUnstable("rotation plane count disagrees with the spectrum", out.margin);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (std::abs(b[i] - spec.imag_moduli[i]) > 1e-8 * (1.0 + F.norm()))
      throw ClassificationUnstable("rotation strengths disagree with the spectrum", out.margin);

  // Parameters are read off the reduced matrix, so they match the witness.
  out.lambda = frame_map(frame);
  const TwoForm reduced = conjugate(out.lambda, F);
  if (out.cls.tag == TwoFormTag::C || out.cls.tag == TwoFormTag::D) out.cls.a = reduced(0, 1);
  const int offset = detail::plane_offset(out.cls.tag);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = reduced(offset + 2 * i, offset + 2 * i + 1);
  out.cls.b = detail::merge_strengths(b);
  const TwoForm canonical = canonical_2form_matrix(out.cls, Dim(n));
  out.residual = max_abs(Matrix(reduced.matrix() - canonical.matrix()));
  if (out.residual > 1e-8 * (1.0 + F.norm()))
    throw ClassificationUnstable("witness residual " + std::to_string(out.residual) + " too large",
                                 out.margin);
  return out;
}

} // namespace kvf

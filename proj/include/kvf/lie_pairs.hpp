#pragma once

// Killing pairs with [xi#, eta#] = xi#: bracket checks, the structural tests
// (isolated superdiagonal entries, nilpotency) and the reduction of a pair to
// one of the two canonical families.
//
// family 1: xi = (x0 - x2) dx1 - x1 (dx0 - dx2),
//           eta = x0 dx2 - x2 dx0 + sum b_i (planes from index 3) + q dx^n
// family 2: xi = -dx0 + dx1,
//           eta = x0 dx1 - x1 dx0 + sum b_i (planes from index 2) + q dx^n

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kvf/canonical_form.hpp"
#include "kvf/errors.hpp"
#include "kvf/linalg.hpp"
#include "kvf/minkowski.hpp"
#include "kvf/spectral.hpp"

namespace kvf {

struct BracketReport {
  double commutator_residual = 0.0;   // |[#F, #G] - #F|
  double translation_residual = 0.0;  // |(#G + I) f# - #F g#|
  double scale = 1.0;                 // residuals are compared against tol * scale
  bool ok = false;
};

/// Both matrix conditions of [xi#, eta#] = xi#, with max-abs residuals
/// measured against tol * (1 + |xi| (1 + |eta|)).
inline BracketReport bracket_report(const KillingField& xi, const KillingField& eta, double tol = kDefaultTol) {
  if (xi.F.size() != eta.F.size()) throw DimensionMismatch("bracket: dimensions differ");
  const int size = xi.F.size();
  const Matrix sf = sharp(xi.F);
  const Matrix sg = sharp(eta.F);
  const Vector fs = sharp_covector(xi.f).components;
  const Vector gs = sharp_covector(eta.f).components;
  BracketReport out;
  out.commutator_residual = max_abs(Matrix(sf * sg - sg * sf - sf));
  out.translation_residual = max_abs(Vector((sg + Matrix::Identity(size, size)) * fs - sf * gs));
  out.scale = 1.0 + xi.norm() * (1.0 + eta.norm());
  out.ok = out.commutator_residual <= tol * out.scale && out.translation_residual <= tol * out.scale;
  return out;
}

inline bool verify_bracket(const KillingField& xi, const KillingField& eta, double tol = kDefaultTol) {
  return bracket_report(xi, eta, tol).ok;
}

/// True iff some |u_i| > tol has every existing neighbour <= tol.
inline bool has_isolated_nonzero(const SuperdiagonalArray& a, double tol = kDefaultTol) {
  const auto& u = a.u;
  const int m = static_cast<int>(u.size());
  for (int i = 0; i < m; ++i) {
    if (std::abs(u[i]) <= tol) continue;
    const bool left = i > 0 && std::abs(u[i - 1]) > tol;
    const bool right = i + 1 < m && std::abs(u[i + 1]) > tol;
    if (!left && !right) return true;
  }
  return false;
}

/// Smallest k <= n+1 with |(#F)^k| <= tol |F|^k (max-abs norms), if any.
inline std::optional<int> nilpotency_index(const TwoForm& F, double tol = kDefaultTol) {
  const double norm = F.norm();
  if (norm == 0.0) return 1;
  const Matrix m = sharp(F);
  Matrix power = m;
  double bound = norm;
  for (int k = 1; k <= F.size(); ++k) {
    if (max_abs(power) <= tol * bound) return k;
    power = power * m;
    bound *= norm;
  }
  return std::nullopt;
}

struct LiePairClass {
  int family = 1;
  std::vector<double> b;
  double q = 0.0;
};

namespace detail {

inline int pair_plane_offset(int family) { return family == 1 ? 3 : 2; }

inline void check_pair_class(const LiePairClass& cls, int n) {
  if (cls.family != 1 && cls.family != 2) throw ParamViolation("pair family must be 1 or 2");
  if (!(cls.q >= 0.0)) throw ParamViolation("q must be nonnegative");
  check_b_list(cls.b);
  const int r = static_cast<int>(cls.b.size());
  const int planes_end = pair_plane_offset(cls.family) + 2 * r - 1;  // last plane index
  const int need = std::max(cls.family == 1 ? 2 : 1, planes_end) + (cls.q > 0.0 ? 1 : 0);
  if (n < need)
    throw DimensionTooSmall("pair family " + std::to_string(cls.family) + " with r=" + std::to_string(r) +
                            (cls.q > 0.0 ? " and q > 0" : "") + " needs n >= " + std::to_string(need));
}

} // namespace detail

/// The displayed canonical pair (xi, eta) for a class.
inline std::pair<KillingField, KillingField> canonical_pair(const LiePairClass& cls, Dim d) {
  detail::check_pair_class(cls, d.n());
  KillingField xi = KillingField::zero(d);
  KillingField eta = KillingField::zero(d);
  if (cls.family == 1) {
    xi.F = TwoForm::elementary(d, 0, 1) + TwoForm::elementary(d, 1, 2);
    eta.F = TwoForm::elementary(d, 0, 2);
  } else {
    xi.f = MinkCovector::basis(d, 0, -1.0);
    xi.f.components(1) = 1.0;
    eta.F = TwoForm::elementary(d, 0, 1);
  }
  const int offset = detail::pair_plane_offset(cls.family);
  for (std::size_t i = 0; i < cls.b.size(); ++i) {
    const int p = offset + 2 * static_cast<int>(i);
    eta.F = eta.F + TwoForm::elementary(d, p, p + 1, cls.b[i]);
  }
  if (cls.q > 0.0) eta.f.components(d.n()) = cls.q;
  return {xi, eta};
}

struct LiePairReport {
  LiePairClass cls;
  PoincareMap g;          // act_poincare(g, xi), act_poincare(g, eta) are canonical
  double residual = 0.0;  // max-abs witness error over both fields
  double margin = std::numeric_limits<double>::infinity();
};

namespace detail {

// Null rotations about l = E0 + E_i1 clearing G(E0 - E_i1, E_j) on the
// transverse columns: (I - H) beta = -g/2 with H_ij = G(E_i, E_j).
inline Matrix clear_null_shear(const Matrix& frame, const TwoForm& G, int i1, const std::vector<int>& transverse) {
  const int t = static_cast<int>(transverse.size());
  if (t == 0) return frame;
  const Vector k = frame.col(0) - frame.col(i1);
  Matrix h(t, t);
  Vector g(t);
  for (int i = 0; i < t; ++i) {
    g(i) = G.evaluate(k, frame.col(transverse[i]));
    for (int j = 0; j < t; ++j) h(i, j) = G.evaluate(frame.col(transverse[i]), frame.col(transverse[j]));
  }
  Eigen::PartialPivLU<Matrix> lu(Matrix(Matrix::Identity(t, t) - h));
  if (lu.rcond() < 1e-14) throw ClassificationUnstable("singular shear system (I - H)", lu.rcond());
  const Vector beta = lu.solve(Vector(-0.5 * g));
  return linalg::null_rotation(frame, 0, i1, 1.0, transverse, beta);
}

} // namespace detail

/// Reduces a bracket pair to its canonical family. Throws ZeroField for
/// xi = 0, ImpossibleTranslation when xi is a non-null translation and
/// NotABracketPair when the bracket relation fails.
inline LiePairReport classify_pair(const KillingField& xi, const KillingField& eta, double tol = kDefaultTol) {
  if (xi.F.size() != eta.F.size()) throw DimensionMismatch("classify_pair: dimensions differ");
  if (xi.is_zero()) throw ZeroField("xi is zero");
  const Dim d = xi.dim();
  const int size = d.size();
  const int n = d.n();
  const double scale = xi.norm();
  const bool translation = xi.F.norm() <= tol * scale;
  if (translation) {
    const Vector fs = sharp_covector(xi.f).components;
    const double nn = minkowski_inner(fs, fs);
    if (std::abs(nn) > tol * fs.squaredNorm())
      throw ImpossibleTranslation(std::string("xi is a ") + (nn < 0 ? "timelike" : "spacelike") +
                                  " translation; no Killing field eta satisfies [xi, eta] = xi");
  }
  const BracketReport br = bracket_report(xi, eta, tol);
  if (!br.ok)
    throw NotABracketPair("[xi#, eta#] != xi#", br.commutator_residual, br.translation_residual);

  LiePairReport out;
  out.cls.family = translation ? 2 : 1;
  const int i1 = translation ? 1 : 2;          // l = E0 + E_i1 spans the invariant null line
  const int offset = detail::pair_plane_offset(out.cls.family);

  // Step 1: put xi into its canonical shape with a linear map.
  PoincareMap g1 = PoincareMap::identity(d);
  if (!translation) {
    const TwoFormReport two = canonicalize_2form(xi.F, tol);
    out.margin = two.margin;
    if (two.cls.tag != TwoFormTag::E)
      throw NotABracketPair(std::string("F is of class ") + letter(two.cls.tag) + ", not a null rotation",
                            br.commutator_residual, br.translation_residual);
    g1 = PoincareMap::linear(two.lambda);
  } else {
    Vector l = sharp_covector(xi.f).components;
    Vector s = l.tail(n);
    const double l0 = l(0);
    s.normalize();
    Matrix frame = detail::spatial_frame(s, 1);
    if (l0 < 0) frame.col(0) = -frame.col(0);  // E0 + E1 = l / |l0|
    frame = linalg::null_boost(frame, 0, 1, 1.0, std::abs(l0));
    g1 = PoincareMap::linear(frame_map(frame));
  }
  const KillingField eta1 = act_poincare(g1, eta);

  // Step 2: null rotations fixing xi, then rotations of the transverse block.
  Matrix frame = Matrix::Identity(size, size);
  std::vector<int> transverse;
  for (int j = offset; j <= n; ++j) transverse.push_back(j);
  if (!translation) frame = detail::clear_null_shear(frame, eta1.F, 2, {1});  // alpha shear first
  frame = detail::clear_null_shear(frame, eta1.F, i1, transverse);
  std::vector<int> planes(transverse.begin(), transverse.end());
  out.cls.b = detail::merge_strengths(
      detail::rotate_planes(frame, eta1.F, planes, [&](int) { return planes; }, tol, out.margin));
  const int r = static_cast<int>(out.cls.b.size());
  const PoincareMap g2 = PoincareMap::linear(frame_map(frame));
  const PoincareMap g12 = compose(g2, g1);
  const KillingField xi2 = act_poincare(g12, xi);
  const KillingField eta2 = act_poincare(g12, eta);

  // Step 3: one translation clearing f and every g component outside the
  // zero block of G. The system is consistent for bracket pairs.
  const int first_free = offset + 2 * r;
  const KillingField xi_target = canonical_pair({out.cls.family, {}, 0.0}, d).first;
  Matrix a(size + first_free, size);
  Vector rhs(size + first_free);
  a.topRows(size) = xi2.F.matrix().transpose();
  rhs.head(size) = xi2.f.components - xi_target.f.components;
  a.bottomRows(first_free) = eta2.F.matrix().transpose().topRows(first_free);
  rhs.tail(first_free) = eta2.f.components.head(first_free);
  const Vector c = a.completeOrthogonalDecomposition().solve(rhs);
  PoincareMap g3 = compose(PoincareMap::translation(MinkVector(c)), g12);

  // Step 4: rotate the leftover g on the zero block onto q dx^n.
  const KillingField eta3 = act_poincare(g3, eta);
  const int free_count = n + 1 - first_free;
  if (free_count > 0) {
    const Vector rest = eta3.f.components.tail(free_count);
    const double q = rest.norm();
    if (q > 1e-10 * (1.0 + eta.norm())) {
      Matrix rot = Matrix::Identity(size, size);
      rot.bottomRightCorner(free_count, free_count) = linalg::frame_with_column(rest / q, free_count - 1);
      g3 = compose(PoincareMap::linear(frame_map(rot)), g3);
      out.cls.q = q;
    }
  }
  out.g = g3;

  const auto [xi_can, eta_can] = canonical_pair(out.cls, d);
  out.residual = std::max(field_distance(act_poincare(out.g, xi), xi_can),
                          field_distance(act_poincare(out.g, eta), eta_can));
  if (out.residual > 1e-8 * (1.0 + scale + eta.norm()))
    throw ClassificationUnstable("pair witness residual " + std::to_string(out.residual) + " too large",
                                 out.margin);
  return out;
}

} // namespace kvf

#pragma once

// Minkowski-space primitives on R^{n,1}.
//
// Conventions used throughout kvf:
//   * metric eta = diag(-1, +1, ..., +1), index 0 is time;
//   * a LorentzMap stores Lambda^mu_nu, acting on coordinates as
//     x' = Lambda x + c; the index-lowered matrix Lambda_mu^nu used on
//     covariant quantities is eta * Lambda * eta (= Lambda^{-T});
//   * a TwoForm stores F_{mu nu}; "F = a dx^i dx^j" means F_ij = a = -F_ji;
//   * the Killing covector is xi_nu(x) = F_{mu nu} x^mu + f_nu.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

#include "kvf/errors.hpp"

namespace kvf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Spatial dimension n of R^{n,1}; the spacetime has n+1 coordinates.
class Dim {
public:
  explicit Dim(int n) : n_(n) {
    if (n < 1) throw DimensionMismatch("spatial dimension must be >= 1, got " + std::to_string(n));
  }
  int n() const { return n_; }
  int size() const { return n_ + 1; }
  friend bool operator==(Dim, Dim) = default;

private:
  int n_;
};

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// eta as a dense matrix of size n+1.
inline Matrix metric(int size) {
  Matrix eta = Matrix::Identity(size, size);
  eta(0, 0) = -1.0;
  return eta;
}

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(std::string(what) + " has non-finite entries");
}

// Multiplies row 0 by -1, i.e. computes eta * m without forming eta.
inline Matrix flip_time_row(Matrix m) {
  m.row(0) *= -1.0;
  return m;
}

inline Matrix flip_time_col(Matrix m) {
  m.col(0) *= -1.0;
  return m;
}

} // namespace detail

/// Contravariant vector v^mu.
struct MinkVector {
  Vector components;

  MinkVector() = default;
  explicit MinkVector(Vector v) : components(std::move(v)) {
    detail::require_finite(components, "MinkVector");
  }
  static MinkVector zero(Dim d) { return MinkVector(Vector::Zero(d.size())); }
  static MinkVector basis(Dim d, int mu) {
    Vector v = Vector::Zero(d.size());
    v(mu) = 1.0;
    return MinkVector(std::move(v));
  }

  int size() const { return static_cast<int>(components.size()); }
  Dim dim() const { return Dim(size() - 1); }
  double operator[](int mu) const { return components(mu); }
};

/// Covariant vector f_mu (a constant 1-form).
struct MinkCovector {
  Vector components;

  MinkCovector() = default;
  explicit MinkCovector(Vector v) : components(std::move(v)) {
    detail::require_finite(components, "MinkCovector");
  }
  static MinkCovector zero(Dim d) { return MinkCovector(Vector::Zero(d.size())); }
  static MinkCovector basis(Dim d, int mu, double value = 1.0) {
    Vector v = Vector::Zero(d.size());
    v(mu) = value;
    return MinkCovector(std::move(v));
  }

  int size() const { return static_cast<int>(components.size()); }
  Dim dim() const { return Dim(size() - 1); }
  double operator[](int mu) const { return components(mu); }
};

/// Constant 2-form F_{mu nu}. Storage is exactly antisymmetric.
class TwoForm {
public:
  static constexpr double kSymmetricPartTolerance = 1e-12;

  TwoForm() = default;

  /// Antisymmetrizes m; rejects inputs whose symmetric part exceeds
  /// kSymmetricPartTolerance relative to the matrix norm.
  explicit TwoForm(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 2)
      throw DimensionMismatch("TwoForm needs a square matrix of size >= 2");
    detail::require_finite(m, "TwoForm");
    const Matrix sym = 0.5 * (m + m.transpose());
    const double scale = max_abs(m);
    if (max_abs(sym) > kSymmetricPartTolerance * scale)
      throw NotAntisymmetric("TwoForm input is not antisymmetric (symmetric part " +
                             std::to_string(max_abs(sym)) + ")");
    matrix_ = 0.5 * (m - m.transpose());
  }

  static TwoForm zero(Dim d) {
    TwoForm out;
    out.matrix_ = Matrix::Zero(d.size(), d.size());
    return out;
  }

  /// value * dx^i dx^j
  static TwoForm elementary(Dim d, int i, int j, double value = 1.0) {
    TwoForm out = zero(d);
    out.matrix_(i, j) += value;
    out.matrix_(j, i) -= value;
    return out;
  }

  const Matrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }
  Dim dim() const { return Dim(size() - 1); }
  double operator()(int mu, int nu) const { return matrix_(mu, nu); }
  double norm() const { return max_abs(matrix_); }
  bool is_zero() const { return matrix_.isZero(0.0); }

  /// F(u, v) = F_{mu nu} u^mu v^nu
  double evaluate(const Vector& u, const Vector& v) const { return u.dot(matrix_ * v); }

  friend TwoForm operator+(const TwoForm& a, const TwoForm& b) {
    TwoForm out;
    out.matrix_ = a.matrix_ + b.matrix_;
    return out;
  }
  friend TwoForm operator*(double s, const TwoForm& a) {
    TwoForm out;
    out.matrix_ = s * a.matrix_;
    return out;
  }

private:
  Matrix matrix_;
};

/// Lorentz transformation Lambda^mu_nu, validated on construction.
class LorentzMap {
public:
  LorentzMap() = default;

  explicit LorentzMap(Matrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2)
      throw DimensionMismatch("LorentzMap needs a square matrix of size >= 2");
    detail::require_finite(matrix_, "LorentzMap");
    const double defect = defect_of(matrix_);
    if (defect > tolerance_for(matrix_))
      throw InvalidLorentz("matrix is not in O(n,1): |L^T eta L - eta| = " + std::to_string(defect));
  }

  static LorentzMap identity(Dim d) { return LorentzMap(Matrix::Identity(d.size(), d.size())); }

  /// tau_lorentz = 1e-9 (1 + |L|_inf^2); boost entries grow with rapidity.
  static double tolerance_for(const Matrix& m) {
    const double inf_norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    return 1e-9 * (1.0 + inf_norm * inf_norm);
  }

  static double defect_of(const Matrix& m) {
    const Matrix eta = metric(static_cast<int>(m.rows()));
    return max_abs(Matrix(m.transpose() * eta * m - eta));
  }

  const Matrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }
  Dim dim() const { return Dim(size() - 1); }

  /// Lambda_mu^nu = eta Lambda eta, the matrix acting on covectors.
  Matrix lowered() const { return detail::flip_time_col(detail::flip_time_row(matrix_)); }

  /// eta Lambda^T eta, exact inverse for elements of O(n,1).
  LorentzMap inverse() const {
    LorentzMap out;
    out.matrix_ = detail::flip_time_col(detail::flip_time_row(matrix_.transpose()));
    return out;
  }

  bool orthochronous() const { return matrix_(0, 0) > 0.0; }
  double determinant() const { return matrix_.determinant(); }

private:
  Matrix matrix_;
};

/// Poincare transformation x' = Lambda x + c.
struct PoincareMap {
  LorentzMap lambda;
  MinkVector c;

  static PoincareMap identity(Dim d) { return {LorentzMap::identity(d), MinkVector::zero(d)}; }
  static PoincareMap translation(MinkVector c) {
    const Dim d = c.dim();
    return {LorentzMap::identity(d), std::move(c)};
  }
  static PoincareMap linear(LorentzMap l) {
    const Dim d = l.dim();
    return {std::move(l), MinkVector::zero(d)};
  }
  Dim dim() const { return lambda.dim(); }
};

/// xi = F_{mu nu} x^mu dx^nu + f_nu dx^nu
struct KillingField {
  TwoForm F;
  MinkCovector f;

  KillingField() = default;
  KillingField(TwoForm F_, MinkCovector f_) : F(std::move(F_)), f(std::move(f_)) {
    if (F.size() != f.size()) throw DimensionMismatch("KillingField: F and f dimensions differ");
  }
  static KillingField zero(Dim d) { return {TwoForm::zero(d), MinkCovector::zero(d)}; }

  Dim dim() const { return F.dim(); }
  double norm() const { return std::max(F.norm(), max_abs(f.components)); }
  bool is_zero() const { return F.is_zero() && f.components.isZero(0.0); }

  /// Lower-index field value xi_nu(x) = F_{mu nu} x^mu + f_nu.
  Vector covector_at(const Vector& x) const { return F.matrix().transpose() * x + f.components; }
  /// Vector field xi^mu(x) = eta^{mu nu} xi_nu(x).
  Vector vector_at(const Vector& x) const {
    Vector v = covector_at(x);
    v(0) = -v(0);
    return v;
  }
};

inline double minkowski_inner(const MinkVector& u, const MinkVector& v) {
  if (u.size() != v.size()) throw DimensionMismatch("minkowski_inner: dimensions differ");
  return -u[0] * v[0] + u.components.tail(u.size() - 1).dot(v.components.tail(v.size() - 1));
}

inline double minkowski_inner(const Vector& u, const Vector& v) {
  return -u(0) * v(0) + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

/// Mixed operator (#F)^mu_nu = eta^{mu lambda} F_{lambda nu}.
inline Matrix sharp(const TwoForm& F) { return detail::flip_time_row(F.matrix()); }

inline MinkVector sharp_covector(const MinkCovector& f) {
  Vector v = f.components;
  v(0) = -v(0);
  return MinkVector(std::move(v));
}

inline MinkCovector flat_vector(const MinkVector& v) {
  Vector f = v.components;
  f(0) = -f(0);
  return MinkCovector(std::move(f));
}

/// F'_{mu nu} = Lambda_mu^lambda Lambda_nu^rho F_{lambda rho}
inline TwoForm conjugate(const LorentzMap& lambda, const TwoForm& F) {
  if (lambda.size() != F.size()) throw DimensionMismatch("conjugate: dimensions differ");
  const Matrix low = lambda.lowered();
  const Matrix out = low * F.matrix() * low.transpose();
  return TwoForm(Matrix(0.5 * (out - out.transpose())));
}

/// (F, f) -> (Lambda Lambda F, Lambda f - F'_{mu nu} c^mu)
inline KillingField act_poincare(const PoincareMap& g, const KillingField& xi) {
  if (g.lambda.size() != xi.F.size()) throw DimensionMismatch("act_poincare: dimensions differ");
  TwoForm Fp = conjugate(g.lambda, xi.F);
  Vector fp = g.lambda.lowered() * xi.f.components - Fp.matrix().transpose() * g.c.components;
  return {std::move(Fp), MinkCovector(std::move(fp))};
}

/// g2 after g1: x'' = L2 (L1 x + c1) + c2.
inline PoincareMap compose(const PoincareMap& g2, const PoincareMap& g1) {
  if (g2.lambda.size() != g1.lambda.size()) throw DimensionMismatch("compose: dimensions differ");
  Matrix l = g2.lambda.matrix() * g1.lambda.matrix();
  Vector c = g2.lambda.matrix() * g1.c.components + g2.c.components;
  return {LorentzMap(std::move(l)), MinkVector(std::move(c))};
}

inline PoincareMap invert(const PoincareMap& g) {
  LorentzMap inv = g.lambda.inverse();
  Vector c = -(inv.matrix() * g.c.components);
  return {std::move(inv), MinkVector(std::move(c))};
}

/// Pushes a point forward: x' = Lambda x + c.
inline MinkVector apply(const PoincareMap& g, const MinkVector& x) {
  return MinkVector(Vector(g.lambda.matrix() * x.components + g.c.components));
}

/// Max-abs distance between two Killing fields.
inline double field_distance(const KillingField& a, const KillingField& b) {
  return std::max(max_abs(Matrix(a.F.matrix() - b.F.matrix())),
                  max_abs(Vector(a.f.components - b.f.components)));
}

/// Lorentz map whose columns are the pseudo-orthonormal frame B
/// (B^T eta B = eta). The frame vectors become the new coordinate axes, so
/// conjugate(frame_map(B), F) = B^T F B.
inline LorentzMap frame_map(const Matrix& frame) {
  return LorentzMap(detail::flip_time_col(detail::flip_time_row(frame.transpose())));
}

} // namespace kvf

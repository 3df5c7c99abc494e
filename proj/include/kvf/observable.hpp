#pragma once

// Quadratic phase-space observables Q(z) = 1/2 z^T A z + b^T z + c on
// z = (x^0..x^n, P_0..P_n), and their exact Poisson algebra.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "kvf/errors.hpp"
#include "kvf/minkowski.hpp"

namespace kvf {

struct PhaseState {
  MinkVector x;
  MinkCovector P;

  PhaseState() = default;
  PhaseState(MinkVector x_, MinkCovector P_) : x(std::move(x_)), P(std::move(P_)) {
    if (x.size() != P.size()) throw DimensionMismatch("PhaseState: x and P sizes differ");
  }
  static PhaseState from_z(const Vector& z) {
    const int size = static_cast<int>(z.size()) / 2;
    return {MinkVector(Vector(z.head(size))), MinkCovector(Vector(z.tail(size)))};
  }
  Vector z() const {
    Vector out(2 * x.size());
    out << x.components, P.components;
    return out;
  }
  int size() const { return x.size(); }
};

/// Canonical symplectic matrix [[0, I], [-I, 0]] for spacetime size `size`.
inline Matrix symplectic_j(int size) {
  Matrix j = Matrix::Zero(2 * size, 2 * size);
  j.topRightCorner(size, size).setIdentity();
  j.bottomLeftCorner(size, size) = -Matrix::Identity(size, size);
  return j;
}

class QuadraticObservable {
public:
  QuadraticObservable() = default;
  QuadraticObservable(Matrix A, Vector b, double c) : A_(std::move(A)), b_(std::move(b)), c_(c) {
    if (A_.rows() != A_.cols() || A_.rows() != b_.size() || A_.rows() % 2 != 0)
      throw DimensionMismatch("QuadraticObservable: inconsistent shapes");
    A_ = (0.5 * (A_ + A_.transpose())).eval();
  }
  static QuadraticObservable zero(int size) {
    return {Matrix::Zero(2 * size, 2 * size), Vector::Zero(2 * size), 0.0};
  }
  static QuadraticObservable constant(int size, double c) {
    return {Matrix::Zero(2 * size, 2 * size), Vector::Zero(2 * size), c};
  }
  /// The coordinate x^mu (as a linear observable).
  static QuadraticObservable position(int size, int mu) {
    QuadraticObservable q = zero(size);
    q.b_(mu) = 1.0;
    return q;
  }
  /// The momentum P_mu.
  static QuadraticObservable momentum(int size, int mu) {
    QuadraticObservable q = zero(size);
    q.b_(size + mu) = 1.0;
    return q;
  }

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  double c() const { return c_; }
  int size() const { return static_cast<int>(b_.size()) / 2; }

  double operator()(const Vector& z) const { return 0.5 * z.dot(A_ * z) + b_.dot(z) + c_; }
  double operator()(const PhaseState& s) const { return (*this)(s.z()); }
  Vector gradient(const Vector& z) const { return A_ * z + b_; }

  /// max-abs over all coefficients
  double coefficient_norm() const {
    return std::max({max_abs(A_), max_abs(b_), std::abs(c_)});
  }

  /// Magnitude of the terms of Q at z, used to make drifts relative.
  double evaluation_scale(const Vector& z) const {
    const Vector az = z.cwiseAbs();
    return 0.5 * az.dot(A_.cwiseAbs() * az) + b_.cwiseAbs().dot(az) + std::abs(c_);
  }

  friend QuadraticObservable operator+(const QuadraticObservable& p, const QuadraticObservable& q) {
    return {p.A_ + q.A_, p.b_ + q.b_, p.c_ + q.c_};
  }
  friend QuadraticObservable operator-(const QuadraticObservable& p, const QuadraticObservable& q) {
    return {p.A_ - q.A_, p.b_ - q.b_, p.c_ - q.c_};
  }
  friend QuadraticObservable operator*(double s, const QuadraticObservable& q) {
    return {s * q.A_, s * q.b_, s * q.c_};
  }

private:
  Matrix A_;
  Vector b_;
  double c_ = 0.0;
};

/// Product of two linear observables, itself quadratic.
inline QuadraticObservable product_of_linear(const QuadraticObservable& p, const QuadraticObservable& q) {
  if (max_abs(p.A()) != 0.0 || max_abs(q.A()) != 0.0)
    throw DimensionMismatch("product_of_linear: arguments must be affine");
  // (b.z + c)(d.z + e) = 1/2 z^T (b d^T + d b^T) z + (c d + e b).z + c e
  Matrix a = p.b() * q.b().transpose();
  return {a + a.transpose(), p.c() * q.b() + q.c() * p.b(), p.c() * q.c()};
}

/// {Q1, Q2} = grad Q1^T J grad Q2, exactly, as a quadratic observable.
inline QuadraticObservable poisson_bracket(const QuadraticObservable& q1, const QuadraticObservable& q2) {
  if (q1.size() != q2.size()) throw DimensionMismatch("poisson_bracket: sizes differ");
  const Matrix j = symplectic_j(q1.size());
  const Matrix a1j = q1.A() * j;
  const Matrix a2j = q2.A() * j;
  Matrix a = a1j * q2.A() - a2j * q1.A();
  Vector b = a1j * q2.b() - a2j * q1.b();
  const double c = q1.b().dot(j * q2.b());
  return {std::move(a), std::move(b), c};
}

} // namespace kvf

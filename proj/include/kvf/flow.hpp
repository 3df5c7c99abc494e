#pragma once

// Flows of quadratic Hamiltonians and of Killing fields. Both are affine
// linear ODEs, solved exactly with the augmented exponential
//   exp(t [[M, v], [0, 0]]) = [[e^{tM}, int_0^t e^{sM} ds v], [0, 1]],
// which needs no inverse of M (M is singular for every Killing field with a
// kernel).

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <vector>

#include "kvf/errors.hpp"
#include "kvf/minkowski.hpp"
#include "kvf/observable.hpp"

namespace kvf {

/// Solution at time t of dy/dt = M y + v, y(0) = y0.
inline Vector affine_flow(const Matrix& m, const Vector& v, const Vector& y0, double t) {
  const int k = static_cast<int>(m.rows());
  Matrix aug = Matrix::Zero(k + 1, k + 1);
  aug.topLeftCorner(k, k) = t * m;
  aug.topRightCorner(k, 1) = t * v;
  const Matrix e = aug.exp();
  return e.topLeftCorner(k, k) * y0 + e.topRightCorner(k, 1);
}

/// z(sigma) for dz/dsigma = J (A z + b).
inline PhaseState flow_exact(const QuadraticObservable& H, const PhaseState& z0, double sigma) {
  if (H.size() != z0.size()) throw DimensionMismatch("flow_exact: sizes differ");
  const Matrix j = symplectic_j(H.size());
  return PhaseState::from_z(affine_flow(j * H.A(), j * H.b(), z0.z(), sigma));
}

/// Samples of the exact flow at sigma = k * h, k = 0..steps.
inline std::vector<PhaseState> flow_exact_samples(const QuadraticObservable& H, const PhaseState& z0, double h,
                                                  int steps) {
  std::vector<PhaseState> out{z0};
  const Matrix j = symplectic_j(H.size());
  const int k = 2 * H.size();
  Matrix aug = Matrix::Zero(k + 1, k + 1);
  aug.topLeftCorner(k, k) = h * (j * H.A());
  aug.topRightCorner(k, 1) = h * (j * H.b());
  const Matrix step = aug.exp();
  Vector y(k + 1);
  y << z0.z(), 1.0;
  for (int s = 0; s < steps; ++s) {
    y = step * y;
    out.push_back(PhaseState::from_z(y.head(k)));
  }
  return out;
}

/// Kick-drift-kick leapfrog for H = T(P) + V(x). Returns steps+1 states.
inline std::vector<PhaseState> flow_symplectic(const QuadraticObservable& H, const PhaseState& z0, double h,
                                               int steps) {
  if (!(h > 0.0)) throw Error("flow_symplectic: step must be positive");
  if (steps < 0) throw Error("flow_symplectic: negative step count");
  const int size = H.size();
  const Matrix cross = H.A().topRightCorner(size, size);
  if (max_abs(cross) > 1e-14) throw NonSeparable("flow_symplectic: Hamiltonian couples x and P");
  const Matrix axx = H.A().topLeftCorner(size, size);
  const Matrix app = H.A().bottomRightCorner(size, size);
  const Vector bx = H.b().head(size);
  const Vector bp = H.b().tail(size);
  Vector x = z0.x.components;
  Vector p = z0.P.components;
  std::vector<PhaseState> out{z0};
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int s = 0; s < steps; ++s) {
    p -= 0.5 * h * (axx * x + bx);
    x += h * (app * p + bp);
    p -= 0.5 * h * (axx * x + bx);
    out.emplace_back(MinkVector(x), MinkCovector(p));
  }
  return out;
}

/// Flow of the vector field xi^mu(x) = eta^{mu nu}(F_{lambda nu} x^lambda + f_nu).
inline MinkVector killing_flow(const KillingField& xi, const MinkVector& x0, double tau) {
  const Matrix m = detail::flip_time_row(Matrix(xi.F.matrix().transpose()));
  const Vector v = sharp_covector(xi.f).components;
  return MinkVector(affine_flow(m, v, x0.components, tau));
}

} // namespace kvf

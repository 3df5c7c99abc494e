#pragma once

// Independent reference computations used only by the tests. None of them
// reuses the library's decompositions: the Gram signature comes from cyclic
// Jacobi rotations, matrix exponentials from a scaled Taylor series and Lie
// brackets from finite differences of the vector fields.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kvf/minkowski.hpp"

namespace kvf_test {

using kvf::Matrix;
using kvf::Vector;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const int m = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (int p = 0; p < m; ++p) {
      for (int q = p + 1; q < m; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = a(i, i);
  return out;
}

struct Signature {
  int negative = 0, zero = 0, positive = 0;
};

/// Signature of the Minkowski Gram matrix of `basis` (columns). Eigenvalues
/// with |lambda| <= tol * max(|Gram|, max |v|^2) count as zero.
inline Signature gram_signature(const std::vector<Vector>& basis, double tol) {
  const int k = static_cast<int>(basis.size());
  Matrix gram(k, k);
  double vmax = 0.0;
  for (int i = 0; i < k; ++i) {
    vmax = std::max(vmax, basis[i].squaredNorm());
    for (int j = 0; j < k; ++j) gram(i, j) = -basis[i](0) * basis[j](0) + basis[i].tail(basis[i].size() - 1).dot(basis[j].tail(basis[j].size() - 1));
  }
  const double scale = std::max(k > 0 ? gram.cwiseAbs().maxCoeff() : 0.0, vmax);
  Signature s;
  for (double l : jacobi_eigenvalues(gram)) {
    if (std::abs(l) <= tol * scale) ++s.zero;
    else if (l < 0) ++s.negative;
    else ++s.positive;
  }
  return s;
}

inline Matrix matrix_power(const Matrix& m, int k) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

/// exp(m) by scaling and squaring with a 30-term Taylor series.
inline Matrix expm_taylor(const Matrix& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.5) ++squarings;
  const Matrix a = m / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  Matrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Value at x of the vector field xi^mu = eta^{mu nu} xi_nu.
inline Vector field_value(const kvf::KillingField& xi, const Vector& x) { return xi.vector_at(x); }

/// [X, Y](x) = DY(x) X(x) - DX(x) Y(x), with central differences of step h.
inline Vector lie_bracket_fd(const kvf::KillingField& X, const kvf::KillingField& Y, const Vector& x,
                             double h = 1e-4) {
  const int size = static_cast<int>(x.size());
  auto jac = [&](const kvf::KillingField& V) {
    Matrix j(size, size);
    for (int k = 0; k < size; ++k) {
      Vector up = x, dn = x;
      up(k) += h;
      dn(k) -= h;
      j.col(k) = (field_value(V, up) - field_value(V, dn)) / (2.0 * h);
    }
    return j;
  };
  return jac(Y) * field_value(X, x) - jac(X) * field_value(Y, x);
}

/// Classical RK4 for dz/ds = m z + v, used to cross-check exact flows.
inline Vector rk4_affine(const Matrix& m, const Vector& v, Vector z, double t, int steps) {
  const double h = t / steps;
  auto f = [&](const Vector& y) -> Vector { return m * y + v; };
  for (int s = 0; s < steps; ++s) {
    const Vector k1 = f(z), k2 = f(z + 0.5 * h * k1), k3 = f(z + 0.5 * h * k2), k4 = f(z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return z;
}

} // namespace kvf_test

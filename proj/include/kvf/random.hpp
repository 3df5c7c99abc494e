#pragma once

// Seeded sampling of Lorentz and Poincare maps. Distributions are written out
// by hand on top of mt19937_64 so that a seed gives identical streams on every
// standard library.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "kvf/linalg.hpp"
#include "kvf/minkowski.hpp"

namespace kvf {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller (the sine branch is discarded).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector normal_vector(int size) {
    Vector v(size);
    for (int i = 0; i < size; ++i) v(i) = normal();
    return v;
  }

  Vector uniform_vector(int size, double lo, double hi) {
    Vector v(size);
    for (int i = 0; i < size; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

/// Haar-distributed element of SO(m).
inline Matrix random_rotation(int m, Rng& rng) {
  Matrix g(m, m);
  for (int j = 0; j < m; ++j) g.col(j) = rng.normal_vector(m);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(m, m);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

/// Rotation * boost * rotation with boost rapidity uniform in [0, max_rapidity].
inline LorentzMap random_lorentz(Dim d, Rng& rng, double max_rapidity = 2.0) {
  const int n = d.n();
  Matrix r1 = Matrix::Identity(d.size(), d.size());
  Matrix r2 = Matrix::Identity(d.size(), d.size());
  r1.bottomRightCorner(n, n) = random_rotation(n, rng);
  r2.bottomRightCorner(n, n) = random_rotation(n, rng);
  const double rapidity = rng.uniform(0.0, max_rapidity);
  Vector t = Vector::Zero(d.size());
  t(0) = std::cosh(rapidity);
  t(1) = std::sinh(rapidity);
  return LorentzMap(Matrix(r1 * linalg::boost_to(t) * r2));
}

inline PoincareMap random_poincare(Dim d, Rng& rng, double max_rapidity = 2.0,
                                   double max_translation = 10.0) {
  LorentzMap l = random_lorentz(d, rng, max_rapidity);
  return {std::move(l), MinkVector(rng.uniform_vector(d.size(), -max_translation, max_translation))};
}

} // namespace kvf

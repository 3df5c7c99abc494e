#pragma once

// Cohomogeneity-one worldsheets x(tau, sigma) = Phi_tau(x_geo(sigma)), where
// Phi is the Killing flow and x_geo a solution of the reduced system with
// p_s = xi.P = 0 and H = 0, and a finite-difference check of the Nambu-Goto
// equation d_A(sqrt(-G) G^{AB} d_B x^mu) = 0 on the sampled sheet.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "kvf/errors.hpp"
#include "kvf/flow.hpp"
#include "kvf/hamiltonian.hpp"
#include "kvf/minkowski.hpp"

namespace kvf {

struct Worldsheet {
  std::vector<double> tau, sigma;               // uniform grids
  std::vector<std::vector<MinkVector>> points;  // points[i][j] = x(tau_i, sigma_j)
  double tau_step() const { return tau.size() > 1 ? tau[1] - tau[0] : 0.0; }
  double sigma_step() const { return sigma.size() > 1 ? sigma[1] - sigma[0] : 0.0; }
};

/// m equally spaced values from a to b inclusive.
inline std::vector<double> uniform_grid(double a, double b, int m) {
  if (m < 2 || !(b > a)) throw Error("uniform_grid: need m >= 2 and b > a");
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = a + (b - a) * static_cast<double>(i) / (m - 1);
  return out;
}

/// Momentum at x with xi.P = 0 and H = 0, obtained by projecting `guess`
/// off xi and rescaling. Throws ConstraintViolated if no such rescaling exists.
inline MinkCovector constrained_momentum(const KillingField& xi, const MinkVector& x, const MinkCovector& guess) {
  const Vector low = xi.covector_at(x.components);
  const Vector up = xi.vector_at(x.components);
  const double X = low.dot(up);
  if (std::abs(X) < 1e-14) throw ConstraintViolated("constrained_momentum: xi is null at x");
  Vector p = guess.components - (up.dot(guess.components) / X) * low;
  Vector psharp = p;
  psharp(0) = -psharp(0);
  const double pp = p.dot(psharp);
  if (pp * X >= 0.0 || std::abs(pp) < 1e-300)
    throw ConstraintViolated("constrained_momentum: P cannot be scaled to H = 0 at this point");
  p *= std::sqrt(-X / pp);
  return MinkCovector(std::move(p));
}

/// x(tau_i, sigma_j) = Phi_{tau_i}(x_geo(sigma_j)) with x_geo the exact flow of
/// the reduced Hamiltonian of xi from z0.
inline Worldsheet build_worldsheet(const KillingField& xi, const PhaseState& z0, const std::vector<double>& tau,
                                   const std::vector<double>& sigma, double constraint_tol = 1e-8) {
  const HamiltonianParts parts = build_hamiltonian(xi);
  const QuadraticObservable ps = killing_momentum(xi);
  const double scale = 1.0 + parts.H.evaluation_scale(z0.z());
  if (std::abs(ps(z0)) > constraint_tol * scale)
    throw ConstraintViolated("worldsheet: xi.P = " + std::to_string(ps(z0)) + " is not zero");
  if (std::abs(parts.H(z0)) > constraint_tol * scale)
    throw ConstraintViolated("worldsheet: H = " + std::to_string(parts.H(z0)) + " is not zero");
  Worldsheet ws;
  ws.tau = tau;
  ws.sigma = sigma;
  std::vector<MinkVector> geodesic;
  for (double s : sigma) {
    const PhaseState z = flow_exact(parts.H, z0, s);
    const double drift = std::abs(ps(z));
    if (drift > constraint_tol * (1.0 + parts.H.evaluation_scale(z.z())))
      throw ConstraintViolated("worldsheet: xi.P drifted along the geodesic");
    geodesic.push_back(z.x);
  }
  const int size = xi.F.size();
  const Matrix m = detail::flip_time_row(Matrix(xi.F.matrix().transpose()));
  const Vector v = sharp_covector(xi.f).components;
  ws.points.resize(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    Matrix aug = Matrix::Zero(size + 1, size + 1);
    aug.topLeftCorner(size, size) = tau[i] * m;
    aug.topRightCorner(size, 1) = tau[i] * v;
    const Matrix e = aug.exp();
    for (const MinkVector& g : geodesic)
      ws.points[i].emplace_back(Vector(e.topLeftCorner(size, size) * g.components + e.topRightCorner(size, 1)));
  }
  return ws;
}

/// max |x(tau_i + delta, sigma_j) - Phi_delta(x(tau_i, sigma_j))| over grid shifts delta.
inline double invariance_defect(const Worldsheet& ws, const KillingField& xi) {
  double worst = 0.0;
  for (std::size_t k = 1; k < ws.tau.size(); ++k) {
    const double delta = ws.tau[k] - ws.tau[0];
    for (std::size_t i = 0; i + k < ws.tau.size(); ++i)
      for (std::size_t j = 0; j < ws.sigma.size(); ++j) {
        const Vector moved = killing_flow(xi, ws.points[i][j], delta).components;
        const Vector& target = ws.points[i + k][j].components;
        worst = std::max(worst, (moved - target).cwiseAbs().maxCoeff() / (1.0 + target.cwiseAbs().maxCoeff()));
      }
  }
  return worst;
}

struct ResidualReport {
  double max_residual = 0.0;
  double det_min = std::numeric_limits<double>::infinity();
  double det_max = -std::numeric_limits<double>::infinity();
  int interior_points = 0;
};

struct GridWindow {
  double tau_lo, tau_hi, sigma_lo, sigma_hi;
};

/// Left side of the Nambu-Goto equation on interior grid points, discretized
/// in flux form: V^A = sqrt(-G) G^{AB} d_B x is evaluated at half points and
/// differenced, so the stencil is second order and compact (3x3). Only points
/// inside `window` (if given) are reported.
inline ResidualReport ng_residual(const Worldsheet& ws, std::optional<GridWindow> window = std::nullopt) {
  const int mt = static_cast<int>(ws.tau.size());
  const int ms = static_cast<int>(ws.sigma.size());
  if (mt < 3 || ms < 3) throw Error("ng_residual: grid must be at least 3x3");
  const double ht = ws.tau_step();
  const double hs = ws.sigma_step();
  auto x = [&](int i, int j) -> const Vector& { return ws.points[i][j].components; };
  auto dot = [](const Vector& a, const Vector& b) { return minkowski_inner(a, b); };

  // Flux through a half point given the two tangent vectors there.
  struct Flux {
    Vector tau_part, sigma_part;
    double det;
  };
  auto flux = [&](const Vector& dt, const Vector& ds) {
    const double gtt = dot(dt, dt), gts = dot(dt, ds), gss = dot(ds, ds);
    const double det = gtt * gss - gts * gts;
    Flux f;
    f.det = det;
    if (det >= 0.0) return f;
    const double root = std::sqrt(-det);
    // G^{-1} = [[gss, -gts], [-gts, gtt]] / det
    f.tau_part = root * (gss * dt - gts * ds) / det;
    f.sigma_part = root * (-gts * dt + gtt * ds) / det;
    return f;
  };

  ResidualReport out;
  for (int i = 1; i + 1 < mt; ++i) {
    for (int j = 1; j + 1 < ms; ++j) {
      if (window && (ws.tau[i] < window->tau_lo || ws.tau[i] > window->tau_hi ||
                     ws.sigma[j] < window->sigma_lo || ws.sigma[j] > window->sigma_hi))
        continue;
      const Vector dt = (x(i + 1, j) - x(i - 1, j)) / (2.0 * ht);
      const Vector ds = (x(i, j + 1) - x(i, j - 1)) / (2.0 * hs);
      const double det = dot(dt, dt) * dot(ds, ds) - dot(dt, ds) * dot(dt, ds);
      out.det_min = std::min(out.det_min, det);
      out.det_max = std::max(out.det_max, det);
      ++out.interior_points;

      const Vector ds_c = ds;
      const Vector ds_up = (x(i + 1, j + 1) - x(i + 1, j - 1)) / (2.0 * hs);
      const Vector ds_dn = (x(i - 1, j + 1) - x(i - 1, j - 1)) / (2.0 * hs);
      const Vector dt_r = (x(i + 1, j + 1) - x(i - 1, j + 1)) / (2.0 * ht);
      const Vector dt_l = (x(i + 1, j - 1) - x(i - 1, j - 1)) / (2.0 * ht);
      const Flux t_hi = flux((x(i + 1, j) - x(i, j)) / ht, 0.5 * (ds_c + ds_up));
      const Flux t_lo = flux((x(i, j) - x(i - 1, j)) / ht, 0.5 * (ds_c + ds_dn));
      const Flux s_hi = flux(0.5 * (dt + dt_r), (x(i, j + 1) - x(i, j)) / hs);
      const Flux s_lo = flux(0.5 * (dt + dt_l), (x(i, j) - x(i, j - 1)) / hs);
      if (t_hi.det >= 0 || t_lo.det >= 0 || s_hi.det >= 0 || s_lo.det >= 0 || det >= 0)
        throw DegenerateSheet("ng_residual: induced metric is not Lorentzian at grid point (" +
                              std::to_string(i) + ", " + std::to_string(j) + ")");
      const Vector r = (t_hi.tau_part - t_lo.tau_part) / ht + (s_hi.sigma_part - s_lo.sigma_part) / hs;
      out.max_residual = std::max(out.max_residual, r.cwiseAbs().maxCoeff());
    }
  }
  return out;
}

} // namespace kvf

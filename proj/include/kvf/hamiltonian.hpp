#pragma once

// Reduced string dynamics for a canonical Killing field xi:
//   H(x, P) = 1/2 (eta^{mu nu} P_mu P_nu + X(x)),  X = eta^{mu nu} xi_mu xi_nu,
// its block decomposition H = H_N + H_S + H_O and the commuting set of n+1
// conserved quantities built block by block.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "kvf/errors.hpp"
#include "kvf/killing_classify.hpp"
#include "kvf/minkowski.hpp"
#include "kvf/observable.hpp"

namespace kvf {

namespace detail {

// xi_mu(x) = F_{lambda mu} x^lambda + f_mu, as an affine observable.
inline QuadraticObservable xi_component(const KillingField& xi, int mu) {
  const int size = xi.F.size();
  QuadraticObservable q = QuadraticObservable::constant(size, xi.f[mu]);
  Vector b = q.b();
  b.head(size) = xi.F.matrix().col(mu);
  return {q.A(), b, q.c()};
}

inline double eta_diag(int mu) { return mu == 0 ? -1.0 : 1.0; }

// 1/2 sum_{mu in idx} eta^{mu mu} (P_mu^2 + xi_mu^2)
inline QuadraticObservable block_hamiltonian(const KillingField& xi, const std::vector<int>& idx) {
  const int size = xi.F.size();
  QuadraticObservable h = QuadraticObservable::zero(size);
  for (int mu : idx) {
    const QuadraticObservable p = QuadraticObservable::momentum(size, mu);
    const QuadraticObservable x = xi_component(xi, mu);
    h = h + (0.5 * eta_diag(mu)) * (product_of_linear(p, p) + product_of_linear(x, x));
  }
  return h;
}

} // namespace detail

/// X(x) = |xi|^2 as an observable depending on x only.
inline QuadraticObservable potential_X(const KillingField& xi) {
  const int size = xi.F.size();
  QuadraticObservable out = QuadraticObservable::zero(size);
  for (int mu = 0; mu < size; ++mu) {
    const QuadraticObservable x = detail::xi_component(xi, mu);
    out = out + detail::eta_diag(mu) * product_of_linear(x, x);
  }
  return out;
}

/// p_s = xi^mu P_mu
inline QuadraticObservable killing_momentum(const KillingField& xi) {
  const int size = xi.F.size();
  QuadraticObservable out = QuadraticObservable::zero(size);
  for (int mu = 0; mu < size; ++mu) {
    const QuadraticObservable x = detail::xi_component(xi, mu);
    out = out + detail::eta_diag(mu) * product_of_linear(x, QuadraticObservable::momentum(size, mu));
  }
  return out;
}

struct HamiltonianParts {
  QuadraticObservable H;
  QuadraticObservable H_N, H_S, H_O;
};

inline HamiltonianParts build_hamiltonian(const KillingField& xi) {
  const BlockDecomposition blocks = decompose_blocks(xi.F);
  const int size = xi.F.size();
  HamiltonianParts out;
  const QuadraticObservable kinetic = [&] {
    QuadraticObservable k = QuadraticObservable::zero(size);
    for (int mu = 0; mu < size; ++mu) {
      const QuadraticObservable p = QuadraticObservable::momentum(size, mu);
      k = k + (0.5 * detail::eta_diag(mu)) * product_of_linear(p, p);
    }
    return k;
  }();
  out.H = kinetic + 0.5 * potential_X(xi);
  std::vector<int> n_idx, s_idx;
  if (blocks.n_block) n_idx.assign(blocks.n_block->begin(), blocks.n_block->end());
  for (const SBlock& s : blocks.s_blocks) {
    s_idx.push_back(s.p);
    s_idx.push_back(s.q);
  }
  out.H_N = detail::block_hamiltonian(xi, n_idx);
  out.H_S = detail::block_hamiltonian(xi, s_idx);
  out.H_O = detail::block_hamiltonian(xi, blocks.o_indices);
  return out;
}

struct LabeledObservable {
  std::string label;
  QuadraticObservable q;
};

struct ConservedSet {
  std::vector<LabeledObservable> observables;  // n+1 commuting quantities
  std::vector<LabeledObservable> aliases;      // H and p_s
};

inline ConservedSet conserved_set(const KillingField& xi) {
  const BlockDecomposition blocks = decompose_blocks(xi.F);
  const int size = xi.F.size();
  auto x = [&](int mu) { return QuadraticObservable::position(size, mu); };
  auto p = [&](int mu) { return QuadraticObservable::momentum(size, mu); };
  auto mul = [](const QuadraticObservable& a, const QuadraticObservable& b) { return product_of_linear(a, b); };
  ConservedSet out;

  if (blocks.n_block) {
    const double f0 = xi.f[0];
    const QuadraticObservable one = QuadraticObservable::constant(size, 1.0);
    out.observables.push_back({"C_N", detail::block_hamiltonian(xi, {0, 1, 2})});
    out.observables.push_back(
        {"D_N", mul(x(1) - f0 * one, p(0)) + mul(x(0) - x(2), p(1)) + mul(x(1), p(2))});
    out.observables.push_back({"E_N", p(0) + p(2)});
  }
  int plane = 0;
  for (const SBlock& s : blocks.s_blocks) {
    const std::string tag = std::to_string(plane++);
    if (s.p == 0) {
      const double a2 = s.strength * s.strength;
      const QuadraticObservable c = 0.5 * (-1.0 * mul(p(0), p(0)) + mul(p(1), p(1)) + a2 * mul(x(0), x(0)) -
                                           a2 * mul(x(1), x(1)));
      out.observables.push_back({"C_S" + tag, c});
      out.observables.push_back({"D_S" + tag, mul(x(0), p(1)) + mul(x(1), p(0))});
    } else {
      const double b2 = s.strength * s.strength;
      const QuadraticObservable c =
          0.5 * (mul(p(s.p), p(s.p)) + mul(p(s.q), p(s.q)) + b2 * (mul(x(s.p), x(s.p)) + mul(x(s.q), x(s.q))));
      out.observables.push_back({"C_S" + tag, c});
      out.observables.push_back({"D_S" + tag, mul(x(s.p), p(s.q)) - mul(x(s.q), p(s.p))});
    }
  }
  for (int i : blocks.o_indices) out.observables.push_back({"F_O" + std::to_string(i), p(i)});

  out.aliases.push_back({"H", build_hamiltonian(xi).H});
  out.aliases.push_back({"p_s", killing_momentum(xi)});
  return out;
}

/// Rank of the gradients of the set at z (threshold 1e-9 sigma_max).
inline int independence_rank(const ConservedSet& set, const PhaseState& z) {
  const Vector zz = z.z();
  const int m = static_cast<int>(set.observables.size());
  Matrix g(m, zz.size());
  for (int i = 0; i < m; ++i) g.row(i) = set.observables[i].q.gradient(zz).transpose();
  Eigen::JacobiSVD<Matrix> svd(g);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-9 * s(0)) ++rank;
  return rank;
}

/// Relative change of q between two states, measured against the size of the
/// terms of q at both states.
inline double relative_drift(const QuadraticObservable& q, const Vector& z0, const Vector& z) {
  const double scale = 1.0 + std::abs(q(z0)) + std::max(q.evaluation_scale(z0), q.evaluation_scale(z));
  return std::abs(q(z) - q(z0)) / scale;
}

} // namespace kvf

#pragma once

// Randomized property suites behind `kvf verify`. Each suite draws its own
// stream from the seed so suites can be run alone or together with the same
// results.

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "kvf/canonical_form.hpp"
#include "kvf/flow.hpp"
#include "kvf/hamiltonian.hpp"
#include "kvf/killing_classify.hpp"
#include "kvf/lie_pairs.hpp"
#include "kvf/random.hpp"
#include "kvf/sampling.hpp"
#include "kvf/spectral.hpp"

namespace kvf::suites {

struct SuiteResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst = 0.0;       // largest residual seen
  std::string first_error;  // first failure message, if any
};

namespace detail {

inline void record(SuiteResult& out, bool ok, double value, const std::string& why) {
  out.worst = std::max(out.worst, value);
  if (!ok) {
    ++out.failures;
    if (out.first_error.empty()) out.first_error = why;
  }
}

// Runs one trial, counting exceptions as failures.
inline void trial(SuiteResult& out, const std::function<void()>& body) {
  ++out.trials;
  try {
    body();
  } catch (const std::exception& e) {
    ++out.failures;
    if (out.first_error.empty()) out.first_error = e.what();
  }
}

inline int pick(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)); }

inline KillingClass random_admissible_killing(Rng& rng) {
  for (;;) {
    const auto tag = static_cast<KillingTag>(pick(rng, 0, kKillingTagCount - 1));
    const int n = pick(rng, 1, 7);
    const int rmax = max_planes(tag, n);
    if (rmax < 0) continue;
    const int r = shape_of(tag).has_rotations ? pick(rng, 1, rmax) : 0;
    return random_killing_class(tag, Dim(n), r, rng);
  }
}

} // namespace detail

inline SuiteResult spectral_suite(int trials, Rng& rng, double tol) {
  SuiteResult out;
  out.name = "spectral";
  for (int t = 0; t < trials; ++t) {
    detail::trial(out, [&] {
      const int n = detail::pick(rng, 1, 7);
      const Dim d(n);
      Matrix m(d.size(), d.size());
      for (int i = 0; i < d.size(); ++i)
        for (int j = 0; j < d.size(); ++j) m(i, j) = rng.normal();
      const TwoForm F(Matrix(m - m.transpose()));
      const Invariants inv = invariants(F, tol);
      const double snap = inv.spectrum.max_snap_distance;
      detail::record(out, snap <= tol, snap, "eigenvalue off both axes");
      const TwoForm G = conjugate(random_lorentz(d, rng), F);
      const Invariants inv2 = invariants(G, tol);
      bool same = inv.kernel.tag == inv2.kernel.tag && inv.kernel.dimension == inv2.kernel.dimension &&
                  inv.spectrum.real_pair.has_value() == inv2.spectrum.real_pair.has_value() &&
                  inv.spectrum.imag_moduli.size() == inv2.spectrum.imag_moduli.size();
      double diff = 0.0;
      if (same) {
        if (inv.spectrum.real_pair) diff = std::abs(*inv.spectrum.real_pair - *inv2.spectrum.real_pair);
        for (std::size_t i = 0; i < inv.spectrum.imag_moduli.size(); ++i)
          diff = std::max(diff, std::abs(inv.spectrum.imag_moduli[i] - inv2.spectrum.imag_moduli[i]));
        diff /= 1.0 + F.norm();
      }
      detail::record(out, same && diff <= 1e-8, diff, "invariants changed under a Lorentz map");
    });
  }
  return out;
}

inline SuiteResult classify_suite(int trials, Rng& rng, double tol) {
  SuiteResult out;
  out.name = "classify";
  for (int t = 0; t < trials; ++t) {
    detail::trial(out, [&] {
      const KillingClass cls = detail::random_admissible_killing(rng);
      const KillingField xi = act_poincare(random_poincare(cls.dim, rng), canonical_killing(cls));
      const KillingReport rep = classify_killing(xi, tol);
      double err = 0.0;
      bool ok = rep.cls.tag == cls.tag && rep.cls.b.size() == cls.b.size();
      if (ok) {
        err = std::max({std::abs(rep.cls.a - cls.a), std::abs(rep.cls.f0 - cls.f0), std::abs(rep.cls.fn - cls.fn)});
        for (std::size_t i = 0; i < cls.b.size(); ++i) err = std::max(err, std::abs(rep.cls.b[i] - cls.b[i]));
      }
      detail::record(out, ok && err <= 1e-8, std::max(err, rep.residual),
                     std::string("class ") + letter(cls.tag) + " did not round-trip");
    });
  }
  return out;
}

inline SuiteResult dynamics_suite(int trials, Rng& rng, double) {
  SuiteResult out;
  out.name = "dynamics";
  for (int t = 0; t < trials; ++t) {
    detail::trial(out, [&] {
      const KillingClass cls = detail::random_admissible_killing(rng);
      const KillingField xi = canonical_killing(cls);
      const ConservedSet set = conserved_set(xi);
      double bracket = 0.0;
      for (std::size_t i = 0; i < set.observables.size(); ++i)
        for (std::size_t j = i + 1; j < set.observables.size(); ++j)
          bracket = std::max(bracket, poisson_bracket(set.observables[i].q, set.observables[j].q).coefficient_norm());
      detail::record(out, bracket <= 1e-12, bracket, std::string("class ") + letter(cls.tag) + ": brackets");
      const PhaseState z0 = PhaseState::from_z(rng.uniform_vector(2 * cls.dim.size(), -1.0, 1.0));
      const HamiltonianParts parts = build_hamiltonian(xi);
      const PhaseState z = flow_exact(parts.H, z0, 10.0 * rng.uniform());
      double drift = 0.0;
      for (const auto& o : set.observables) drift = std::max(drift, relative_drift(o.q, z0.z(), z.z()));
      detail::record(out, drift <= 1e-10, drift, std::string("class ") + letter(cls.tag) + ": drift");
      const int rank = independence_rank(set, z0);
      detail::record(out, rank == cls.dim.size(), 0.0, std::string("class ") + letter(cls.tag) + ": rank");
    });
  }
  return out;
}

inline SuiteResult pairs_suite(int trials, Rng& rng, double tol) {
  SuiteResult out;
  out.name = "pairs";
  for (int t = 0; t < trials; ++t) {
    detail::trial(out, [&] {
      const int family = detail::pick(rng, 1, 2);
      const int n = detail::pick(rng, family == 1 ? 2 : 1, 7);
      const int r = detail::pick(rng, 0, max_pair_planes(family, n));
      const int need_q = family == 1 ? 2 * r + 3 : 2 * r + 2;
      const LiePairClass cls = random_pair_class(family, n, r, n >= need_q && rng.uniform() < 0.7, rng);
      const auto [xi0, eta0] = canonical_pair(cls, Dim(n));
      const PoincareMap g = random_poincare(Dim(n), rng);
      const KillingField xi = act_poincare(g, xi0);
      const KillingField eta = act_poincare(g, eta0);
      const LiePairReport rep = classify_pair(xi, eta, tol);
      bool ok = rep.cls.family == cls.family && rep.cls.b.size() == cls.b.size();
      double err = 0.0;
      if (ok) {
        err = std::abs(rep.cls.q - cls.q);
        for (std::size_t i = 0; i < cls.b.size(); ++i) err = std::max(err, std::abs(rep.cls.b[i] - cls.b[i]));
      }
      const auto nil = nilpotency_index(xi.F, tol);
      ok = ok && nil && (*nil == 1 || *nil == 3);
      detail::record(out, ok && err <= 1e-8, std::max(err, rep.residual),
                     "family " + std::to_string(family) + " did not round-trip");
      // A non-null translation never has a partner.
      KillingField bad = KillingField::zero(Dim(n));
      bad.f.components = rng.normal_vector(n + 1);
      bad.f.components(0) *= rng.uniform() < 0.5 ? 0.2 : 3.0;
      bool rejected = false;
      try {
        classify_pair(bad, eta, tol);
      } catch (const ImpossibleTranslation&) {
        rejected = true;
      }
      detail::record(out, rejected, 0.0, "non-null translation accepted");
    });
  }
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"spectral", "classify", "dynamics", "pairs"};
  return names;
}

/// Runs one named suite; each suite's stream depends only on seed and name.
inline SuiteResult run_suite(const std::string& name, int trials, std::uint64_t seed, double tol) {
  const auto& names = suite_names();
  const auto at = std::find(names.begin(), names.end(), name) - names.begin();
  Rng rng(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(at) + 1);
  if (name == "spectral") return spectral_suite(trials, rng, tol);
  if (name == "classify") return classify_suite(trials, rng, tol);
  if (name == "dynamics") return dynamics_suite(trials, rng, tol);
  return pairs_suite(trials, rng, tol);
}

} // namespace kvf::suites

#pragma once

// Random canonical classes for round-trip testing: parameters are drawn
// inside the admissible ranges of each class, so conjugating the canonical
// field by a random Poincare map gives an input with a known answer.

#include <algorithm>
#include <functional>
#include <vector>

#include "kvf/canonical_form.hpp"
#include "kvf/killing_classify.hpp"
#include "kvf/lie_pairs.hpp"
#include "kvf/random.hpp"

namespace kvf {

/// r descending rotation strengths in [0.3, 3].
inline std::vector<double> random_strengths(int r, Rng& rng) {
  std::vector<double> b(r);
  for (double& v : b) v = rng.uniform(0.3, 3.0);
  std::sort(b.begin(), b.end(), std::greater<>());
  return b;
}

/// Largest number of rotation planes class `t` admits in dimension n (-1 if none).
inline int max_planes(KillingTag t, int n) {
  const bool rot = shape_of(t).has_rotations;
  int best = -1;
  for (int r = rot ? 1 : 0; r <= (rot ? n : 0); ++r)
    if (admissible(t, r, n)) best = r;
  return best;
}

inline int max_planes(TwoFormTag t, int n) {
  const bool rot = t == TwoFormTag::B || t == TwoFormTag::D || t == TwoFormTag::F;
  int best = -1;
  for (int r = rot ? 1 : 0; r <= (rot ? n : 0); ++r)
    if (n >= minimal_dimension(t, r)) best = r;
  return best;
}

inline TwoFormClass random_two_form_class(TwoFormTag t, int r, Rng& rng) {
  TwoFormClass cls{t, 0.0, random_strengths(r, rng)};
  if (t == TwoFormTag::C || t == TwoFormTag::D) cls.a = rng.uniform(0.3, 3.0);
  return cls;
}

/// A class with r planes; f0 of the "<= 0" classes is exactly zero a quarter of the time.
inline KillingClass random_killing_class(KillingTag t, Dim d, int r, Rng& rng) {
  const KillingShape shape = shape_of(t);
  KillingClass cls;
  cls.tag = t;
  cls.dim = d;
  cls.b = random_strengths(r, rng);
  if (shape.two_form == TwoFormTag::C || shape.two_form == TwoFormTag::D) cls.a = rng.uniform(0.3, 3.0);
  switch (shape.translation) {
    case KillingShape::TimeNegative: cls.f0 = -rng.uniform(0.3, 3.0); break;
    case KillingShape::TimeNonPositive: cls.f0 = rng.uniform() < 0.25 ? 0.0 : -rng.uniform(0.3, 3.0); break;
    case KillingShape::Space: cls.fn = rng.uniform(0.3, 3.0); break;
    default: break;
  }
  validate(cls);
  return cls;
}

/// Largest r for a pair family in dimension n (-1 if the family does not fit).
inline int max_pair_planes(int family, int n) {
  const int r = family == 1 ? (n - 2) / 2 : (n - 1) / 2;
  return (family == 1 ? n >= 2 : n >= 1) ? r : -1;
}

inline LiePairClass random_pair_class(int family, int n, int r, bool with_q, Rng& rng) {
  LiePairClass cls{family, random_strengths(r, rng), with_q ? rng.uniform(0.3, 3.0) : 0.0};
  detail::check_pair_class(cls, n);
  return cls;
}

} // namespace kvf

#pragma once

// Poincare classification of Killing fields xi = F_{mu nu} x^mu dx^nu + f_nu dx^nu.
//
// F is first brought to its canonical form; the translation part f is then
// reduced by the subgroup G_F of Poincare maps fixing that F. Tags follow the
// fourteen types a-n:
//
//   a  f0 dx0                          h  rotations + fn dxn
//   b  fn dxn                          i  rotations - dx0 + dxn
//   c  -dx0 + dxn                      j  boost + rotations
//   d  boost                           k  null rotation + fn dxn
//   e  rotations + f0 dx0              l  boost + rotations + fn dxn
//   f  boost + fn dxn                  m  null rotation + rotations + f0 dx0
//   g  null rotation + f0 dx0          n  null rotation + rotations + fn dxn

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kvf/canonical_form.hpp"
#include "kvf/errors.hpp"
#include "kvf/linalg.hpp"
#include "kvf/minkowski.hpp"

namespace kvf {

enum class KillingTag { A, B, C, D, E, F, G, H, I, J, K, L, M, N };

inline constexpr int kKillingTagCount = 14;

inline char letter(KillingTag t) { return static_cast<char>('a' + static_cast<int>(t)); }

inline KillingTag killing_tag_from(char c) {
  if (c < 'a' || c > 'n') throw ParamViolation(std::string("unknown Killing class '") + c + "'");
  return static_cast<KillingTag>(c - 'a');
}

struct KillingClass {
  KillingTag tag = KillingTag::A;
  double a = 0.0;         // boost strength (d, f, j, l)
  std::vector<double> b;  // rotation strengths
  double f0 = 0.0;        // a, e, g, m
  double fn = 0.0;        // b, f, h, k, l, n
  Dim dim{1};
};

/// Which parameters a tag carries and the 2-form class it sits over.
struct KillingShape {
  TwoFormTag two_form;
  bool has_rotations;
  enum Translation { None, TimeNonPositive, TimeNegative, Space, NullT } translation;
};

inline KillingShape shape_of(KillingTag t) {
  using T = TwoFormTag;
  using S = KillingShape;
  switch (t) {
    case KillingTag::A: return {T::A, false, S::TimeNegative};
    case KillingTag::B: return {T::A, false, S::Space};
    case KillingTag::C: return {T::A, false, S::NullT};
    case KillingTag::D: return {T::C, false, S::None};
    case KillingTag::E: return {T::B, true, S::TimeNonPositive};
    case KillingTag::F: return {T::C, false, S::Space};
    case KillingTag::G: return {T::E, false, S::TimeNonPositive};
    case KillingTag::H: return {T::B, true, S::Space};
    case KillingTag::I: return {T::B, true, S::NullT};
    case KillingTag::J: return {T::D, true, S::None};
    case KillingTag::K: return {T::E, false, S::Space};
    case KillingTag::L: return {T::D, true, S::Space};
    case KillingTag::M: return {T::F, true, S::TimeNonPositive};
    case KillingTag::N: return {T::F, true, S::Space};
  }
  return {T::A, false, S::None};
}

/// True iff the tag with r rotation planes exists in spatial dimension n.
inline bool admissible(KillingTag t, int r, int n) {
  if (n < 1) return false;
  switch (t) {
    case KillingTag::A:
    case KillingTag::B:
    case KillingTag::C:
    case KillingTag::D: return true;
    case KillingTag::E: return 2 * r <= n;
    case KillingTag::F:
    case KillingTag::G: return n >= 2;
    case KillingTag::H:
    case KillingTag::I: return 2 * r < n;
    case KillingTag::J: return 2 * r <= n - 1;
    case KillingTag::K: return n >= 3;
    case KillingTag::L: return 2 * r < n - 1;
    case KillingTag::M: return 2 * r <= n - 2;
    case KillingTag::N: return 2 * r < n - 2;
  }
  return false;
}

inline void validate(const KillingClass& cls) {
  const KillingShape shape = shape_of(cls.tag);
  const int r = static_cast<int>(cls.b.size());
  const std::string name = std::string("class ") + letter(cls.tag);
  if (shape.has_rotations && r == 0) throw ParamViolation(name + " needs at least one rotation strength");
  if (!shape.has_rotations && r != 0) throw ParamViolation(name + " carries no rotation strengths");
  detail::check_b_list(cls.b);
  const bool boost = shape.two_form == TwoFormTag::C || shape.two_form == TwoFormTag::D;
  if (boost && !(cls.a > 0.0)) throw ParamViolation(name + ": a must be positive");
  switch (shape.translation) {
    case KillingShape::TimeNegative:
      if (!(cls.f0 < 0.0)) throw ParamViolation(name + ": f0 must be negative");
      break;
    case KillingShape::TimeNonPositive:
      if (!(cls.f0 <= 0.0)) throw ParamViolation(name + ": f0 must be <= 0");
      break;
    case KillingShape::Space:
      if (!(cls.fn > 0.0)) throw ParamViolation(name + ": fn must be positive");
      break;
    default: break;
  }
  if (!admissible(cls.tag, r, cls.dim.n()))
    throw DimensionTooSmall(name + " with r=" + std::to_string(r) + " is not admissible for n=" +
                            std::to_string(cls.dim.n()));
}

inline KillingField canonical_killing(const KillingClass& cls) {
  validate(cls);
  const KillingShape shape = shape_of(cls.tag);
  const int n = cls.dim.n();
  TwoFormClass fc{shape.two_form, 0.0, cls.b};
  if (shape.two_form == TwoFormTag::C || shape.two_form == TwoFormTag::D) fc.a = cls.a;
  TwoForm F = canonical_2form_matrix(fc, cls.dim);
  Vector f = Vector::Zero(n + 1);
  switch (shape.translation) {
    case KillingShape::TimeNegative:
    case KillingShape::TimeNonPositive: f(0) = cls.f0; break;
    case KillingShape::Space: f(n) = cls.fn; break;
    case KillingShape::NullT:
      f(0) = -1.0;
      f(n) = 1.0;
      break;
    case KillingShape::None: break;
  }
  return {std::move(F), MinkCovector(std::move(f))};
}

struct SBlock {
  int p, q;
  double strength;
};

struct BlockDecomposition {
  TwoFormClass cls;
  std::vector<SBlock> s_blocks;      // boost pair (0,1) first when present
  std::optional<std::array<int, 3>> n_block;
  std::vector<int> o_indices;
  bool lorentzian_s() const { return !s_blocks.empty() && s_blocks.front().p == 0; }
};

/// Reads the S/N/O block structure off a canonical F.
inline BlockDecomposition decompose_blocks(const TwoForm& F) {
  const int size = F.size();
  const int n = size - 1;
  const double scale = 1.0 + F.norm();
  const double zero = 1e-12 * scale;
  const SuperdiagonalArray sd = superdiagonal_of(F);
  const auto& u = sd.u;
  BlockDecomposition out;
  auto is_nonzero = [&](int k) { return k < n && std::abs(u[k]) > zero; };

  int first_plane = 1;
  if (is_nonzero(0) && is_nonzero(1)) {
    out.cls.tag = TwoFormTag::E;
    out.n_block = std::array<int, 3>{0, 1, 2};
    first_plane = 3;
  } else if (is_nonzero(0)) {
    out.cls.tag = TwoFormTag::C;
    out.cls.a = u[0];
    out.s_blocks.push_back({0, 1, u[0]});
    first_plane = 2;
  } else {
    out.cls.tag = TwoFormTag::A;
  }
  for (int p = first_plane; p + 1 <= n && is_nonzero(p); p += 2) {
    out.cls.b.push_back(u[p]);
    out.s_blocks.push_back({p, p + 1, u[p]});
  }
  const int r = static_cast<int>(out.cls.b.size());
  if (r > 0) {
    if (out.cls.tag == TwoFormTag::A) out.cls.tag = TwoFormTag::B;
    else if (out.cls.tag == TwoFormTag::C) out.cls.tag = TwoFormTag::D;
    else out.cls.tag = TwoFormTag::F;
  }
  TwoForm expected;
  try {
    expected = canonical_2form_matrix(out.cls, Dim(n));
  } catch (const Error& e) {
    throw NotCanonical(std::string("F is not canonical: ") + e.what());
  }
  if (max_abs(Matrix(F.matrix() - expected.matrix())) > zero)
    throw NotCanonical("F does not match any canonical 2-form pattern");

  std::vector<bool> used(size, false);
  for (const SBlock& s : out.s_blocks) used[s.p] = used[s.q] = true;
  if (out.n_block)
    for (int i : *out.n_block) used[i] = true;
  for (int i = 0; i < size; ++i)
    if (!used[i]) out.o_indices.push_back(i);
  return out;
}

struct TranslationReduction {
  MinkCovector f;     // canonical translation part
  PoincareMap g;      // element of G_F
  KillingClass cls;   // resolved tag and parameters
};

namespace detail {

// Running reduction of f under maps that fix a canonical F.
class GfReducer {
public:
  GfReducer(const TwoForm& F, Vector f, double scale)
      : F_(F), f_(std::move(f)), g_(PoincareMap::identity(F.dim())), scale_(scale) {}

  void translate(const Vector& c) {
    f_ += F_.matrix() * c;
    g_ = compose(PoincareMap::translation(MinkVector(c)), g_);
  }

  // New coordinate axes given by the pseudo-orthonormal columns of frame.
  void reframe(const Matrix& frame) {
    const LorentzMap l = frame_map(frame);
    const double drift = max_abs(Matrix(conjugate(l, F_).matrix() - F_.matrix()));
    if (drift > 1e-10 * (1.0 + F_.norm()))
      throw ClassificationUnstable("translation reduction left G_F (drift " + std::to_string(drift) + ")",
                                   0.0);
    f_ = frame.transpose() * f_;
    g_ = compose(PoincareMap::linear(l), g_);
  }

  // Orthogonal rotation of the spatial indices `idx` taking the f-components
  // there onto e_{idx.back()} with a nonnegative coefficient.
  void align_spatial(const std::vector<int>& idx) {
    if (idx.empty()) return;
    const int m = static_cast<int>(idx.size());
    Vector part(m);
    for (int i = 0; i < m; ++i) part(i) = f_(idx[i]);
    const double norm = part.norm();
    if (norm <= zero()) return;
    const Matrix rot = linalg::frame_with_column(part / norm, m - 1);
    Matrix frame = Matrix::Identity(f_.size(), f_.size());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) frame(idx[i], idx[j]) = rot(i, j);
    reframe(frame);
  }

  double zero() const { return 1e-10 * (1.0 + scale_); }
  Vector& f() { return f_; }
  const PoincareMap& g() const { return g_; }
  const TwoForm& F() const { return F_; }

private:
  TwoForm F_;
  Vector f_;
  PoincareMap g_;
  double scale_;
};

} // namespace detail

/// Reduces the translation part f over a canonical F by elements of G_F.
/// `scale` sets the zero threshold 1e-10 (1 + scale); it defaults to |(F, f)|.
inline TranslationReduction reduce_translation(const TwoForm& F_canonical, const MinkCovector& f,
                                               double scale = -1.0) {
  if (F_canonical.size() != f.size()) throw DimensionMismatch("reduce_translation: dimensions differ");
  const BlockDecomposition blocks = decompose_blocks(F_canonical);
  const int size = F_canonical.size();
  const int n = size - 1;
  if (scale < 0.0) scale = std::max(F_canonical.norm(), max_abs(f.components));
  detail::GfReducer red(F_canonical, f.components, scale);

  // Translations clear f on every S plane and leave f0 + f2 on the N block.
  {
    Vector c = Vector::Zero(size);
    for (const SBlock& s : blocks.s_blocks) {
      c(s.q) = -red.f()(s.p) / s.strength;
      c(s.p) = red.f()(s.q) / s.strength;
    }
    if (blocks.n_block) {
      c(1) = red.f()(2);
      c(0) = red.f()(1);
    }
    red.translate(c);
  }

  KillingClass cls;
  cls.dim = Dim(n);
  cls.b = blocks.cls.b;
  cls.a = blocks.cls.a;
  const double zero = red.zero();

  std::vector<int> spatial_o;
  for (int i : blocks.o_indices)
    if (i > 0) spatial_o.push_back(i);

  if (blocks.lorentzian_s()) {
    red.align_spatial(spatial_o);
    const bool has_fn = !spatial_o.empty() && red.f()(n) > zero;
    cls.fn = has_fn ? red.f()(n) : 0.0;
    cls.tag = blocks.cls.b.empty() ? (has_fn ? KillingTag::F : KillingTag::D)
                                   : (has_fn ? KillingTag::L : KillingTag::J);
  } else if (blocks.n_block) {
    red.align_spatial(spatial_o);
    if (red.f()(0) > 0.0) {
      Matrix flip = Matrix::Identity(size, size);
      flip(0, 0) = flip(1, 1) = flip(2, 2) = -1.0;
      red.reframe(flip);
    }
    double f0 = red.f()(0);
    const double fn = spatial_o.empty() ? 0.0 : red.f()(n);
    if (std::abs(f0) > zero && fn > zero) {
      // Null rotation about l = e0 + e2 towards e_n: fixes F and f(l) = f0,
      // moves fn to zero; the N translation then restores f2 = 0.
      const Vector beta = Vector::Constant(1, -fn / f0);
      red.reframe(linalg::null_rotation(Matrix::Identity(size, size), 0, 2, 1.0, {n}, beta));
      Vector c = Vector::Zero(size);
      c(1) = red.f()(2);
      c(0) = red.f()(1);
      red.translate(c);
    }
    f0 = red.f()(0);
    const double fn_final = spatial_o.empty() ? 0.0 : red.f()(n);
    const bool has_fn = std::abs(f0) <= zero && fn_final > zero;
    cls.f0 = has_fn ? 0.0 : (std::abs(f0) <= zero ? 0.0 : f0);
    cls.fn = has_fn ? fn_final : 0.0;
    cls.tag = blocks.cls.b.empty() ? (has_fn ? KillingTag::K : KillingTag::G)
                                   : (has_fn ? KillingTag::N : KillingTag::M);
  } else {
    // Riemannian S part (or F = 0): reduce f on the Lorentzian factor spanned
    // by e0 and the spatial O directions.
    std::vector<int> o = blocks.o_indices;
    const double f0 = red.f()(0);
    double spatial2 = 0.0;
    for (int i : spatial_o) spatial2 += red.f()(i) * red.f()(i);
    const double s2 = f0 * f0 + spatial2;
    const double nu = -f0 * f0 + spatial2;
    enum { Zero, Timelike, Spacelike, Null } kind;
    if (std::sqrt(s2) <= zero) kind = Zero;
    else if (std::abs(nu) <= 1e-9 * s2) kind = Null;
    else if (nu < 0) kind = Timelike;
    else kind = Spacelike;
    if ((kind == Spacelike || kind == Null) && (spatial_o.empty() || spatial_o.back() != n))
      throw ClassificationUnstable("spatial translation without a free direction", 0.0);

    Vector fsharp = Vector::Zero(size);
    for (int i : o) fsharp(i) = red.f()(i);
    fsharp(0) = -fsharp(0);
    Matrix frame = Matrix::Identity(size, size);
    auto place = [&](const Matrix& given, const std::vector<int>& slots_given) {
      for (int j = 0; j < given.cols(); ++j) frame.col(slots_given[j]) = given.col(j);
      const Matrix extra = linalg::eta_completion(given, o, size);
      std::vector<int> rest;
      for (int i : o)
        if (std::find(slots_given.begin(), slots_given.end(), i) == slots_given.end()) rest.push_back(i);
      for (int j = 0; j < extra.cols(); ++j) frame.col(rest[j]) = extra.col(j);
    };
    if (kind == Timelike) {
      Matrix given(size, 1);
      given.col(0) = fsharp / std::sqrt(-nu);
      place(given, {0});
    } else if (kind == Spacelike) {
      Matrix given(size, 1);
      given.col(0) = fsharp / std::sqrt(nu);
      place(given, {n});
    } else if (kind == Null) {
      const auto [e0, en] = linalg::null_pair_frame(fsharp, 1.0);
      Matrix given(size, 2);
      given.col(0) = e0;
      given.col(1) = en;
      place(given, {0, n});
    }
    if (kind != Zero) red.reframe(frame);

    const bool rotations = !blocks.cls.b.empty();
    switch (kind) {
      case Zero:
        if (!rotations) throw ZeroField("Killing field is zero");
        cls.tag = KillingTag::E;
        break;
      case Timelike:
        cls.f0 = red.f()(0);
        cls.tag = rotations ? KillingTag::E : KillingTag::A;
        break;
      case Spacelike:
        cls.fn = red.f()(n);
        cls.tag = rotations ? KillingTag::H : KillingTag::B;
        break;
      case Null:
        cls.tag = rotations ? KillingTag::I : KillingTag::C;
        break;
    }
  }

  TranslationReduction out;
  out.cls = cls;
  out.f = MinkCovector(red.f());
  out.g = red.g();
  return out;
}

struct KillingReport {
  KillingClass cls;
  PoincareMap g;          // act_poincare(g, xi) is canonical
  double residual = 0.0;  // max-abs witness error
  double margin = std::numeric_limits<double>::infinity();
};

inline KillingReport classify_killing(const KillingField& xi, double tol = kDefaultTol) {
  if (xi.is_zero()) throw ZeroField("Killing field is zero");
  const double scale = xi.norm();
  const TwoFormReport two = canonicalize_2form(xi.F, tol);
  const PoincareMap g1 = PoincareMap::linear(two.lambda);
  const KillingField xi1 = act_poincare(g1, xi);
  const TwoForm F_can = canonical_2form_matrix(two.cls, xi.dim());
  const TranslationReduction tr = reduce_translation(F_can, xi1.f, scale);

  KillingReport out;
  out.cls = tr.cls;
  out.g = compose(tr.g, g1);
  out.margin = two.margin;
  const KillingField reduced = act_poincare(out.g, xi);
  out.residual = field_distance(reduced, canonical_killing(out.cls));
  if (out.residual > 1e-8 * (1.0 + scale))
    throw ClassificationUnstable("Killing witness residual " + std::to_string(out.residual) + " too large",
                                 out.margin);
  return out;
}

} // namespace kvf

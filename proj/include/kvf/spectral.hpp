#pragma once

// Eigenstructure of #F and the causal type of its kernel.
//
// #F is eta-skew, so its spectrum is symmetric under negation and complex
// conjugation, nonzero eigenvalues are real or purely imaginary, and there is
// at most one real pair. The zero eigenvalue may be defective (a 3x3 Jordan
// block for null rotations), which would smear it over an eps^(1/3) disc in a
// plain eigensolver. The generalized kernel is therefore split off first via
// SVD, and the eigensolver only sees the restriction of #F to its
// eta-orthogonal complement, where #F is diagonalizable.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "kvf/errors.hpp"
#include "kvf/linalg.hpp"
#include "kvf/minkowski.hpp"

namespace kvf {

inline constexpr double kDefaultTol = 1e-9;

struct SpectrumSummary {
  std::optional<double> real_pair;  // a > 0, eigenvalues +-a
  std::vector<double> imag_moduli;  // b_1 >= ... >= b_r > 0, repeated by multiplicity
  int zero_multiplicity = 0;        // algebraic multiplicity of 0
  int kernel_dimension = 0;         // geometric multiplicity of 0
  int nilpotent_index = 1;          // size of the largest Jordan block at 0
  double max_snap_distance = 0.0;   // largest distance moved onto an axis, relative to |F|
  double margin = std::numeric_limits<double>::infinity();  // smallest |lambda| / |F|
  double rank_margin = std::numeric_limits<double>::infinity();
};

enum class KernelTag { Trivial, Timelike, Spacelike, Null, Full };

inline const char* to_string(KernelTag t) {
  switch (t) {
    case KernelTag::Trivial: return "trivial";
    case KernelTag::Timelike: return "timelike";
    case KernelTag::Spacelike: return "spacelike";
    case KernelTag::Null: return "null";
    case KernelTag::Full: return "full";
  }
  return "?";
}

struct KernelCausalType {
  KernelTag tag = KernelTag::Trivial;
  int dimension = 0;
  int negative = 0, zero = 0, positive = 0;  // Gram signature
};

namespace detail {

struct KernelChain {
  Matrix kernel;       // ker #F
  Matrix generalized;  // generalized kernel, orthonormal columns
  int index = 1;
  double margin = std::numeric_limits<double>::infinity();
};

inline KernelChain kernel_chain(const Matrix& m, double tol) {
  const int size = static_cast<int>(m.rows());
  KernelChain out;
  const linalg::NullSpace first = linalg::null_space(m, tol);
  const double scale = first.sigma_max;
  out.kernel = first.basis;
  out.generalized = first.basis;
  out.margin = first.margin;
  if (scale == 0.0 || first.basis.cols() == 0) return out;
  // K_{j+1} = { v : #F v in K_j }, i.e. the kernel of (I - K_j K_j^T) #F.
  while (out.generalized.cols() < size) {
    const Matrix proj =
        Matrix::Identity(size, size) - out.generalized * out.generalized.transpose();
    const linalg::NullSpace next = linalg::null_space(proj * m, tol, scale);
    out.margin = std::min(out.margin, next.margin);
    if (next.basis.cols() <= out.generalized.cols()) break;
    out.generalized = next.basis;
    ++out.index;
  }
  return out;
}

} // namespace detail

/// Spectrum of #F with eigenvalues snapped onto the real or imaginary axis.
inline SpectrumSummary eigen_structure(const TwoForm& F, double tol = kDefaultTol) {
  SpectrumSummary out;
  const int size = F.size();
  const double norm = F.norm();
  if (norm == 0.0) {
    out.zero_multiplicity = size;
    out.kernel_dimension = size;
    return out;
  }
  const Matrix m = sharp(F);
  const detail::KernelChain chain = detail::kernel_chain(m, tol);
  out.kernel_dimension = static_cast<int>(chain.kernel.cols());
  out.zero_multiplicity = static_cast<int>(chain.generalized.cols());
  out.nilpotent_index = chain.index;
  out.rank_margin = chain.margin;

  const int rest = size - out.zero_multiplicity;
  if (rest == 0) return out;
  // W = eta-orthogonal complement of the generalized kernel; #F-invariant.
  Matrix w;
  if (out.zero_multiplicity == 0) {
    w = Matrix::Identity(size, size);
  } else {
    const Matrix constraints = detail::flip_time_row(chain.generalized).transpose();
    w = linalg::null_space(constraints, 1e-12).basis;
    if (w.cols() != rest) throw SnapFailure("eigen_structure: degenerate kernel complement", 0.0);
  }
  const Matrix restricted = w.transpose() * m * w;
  Eigen::EigenSolver<Matrix> es(restricted, false);
  if (es.info() != Eigen::Success) throw SnapFailure("eigen_structure: eigensolver failed", 0.0);

  std::vector<double> reals, imags;
  int imag_negative = 0;
  for (int i = 0; i < rest; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    const double to_real = std::abs(lambda.imag());
    const double to_imag = std::abs(lambda.real());
    const double moved = std::min(to_real, to_imag) / norm;
    out.max_snap_distance = std::max(out.max_snap_distance, moved);
    if (moved > tol)
      throw SnapFailure("eigen_structure: eigenvalue off both axes", moved);
    out.margin = std::min(out.margin, std::abs(lambda) / norm);
    if (to_real <= to_imag) {
      reals.push_back(lambda.real());
    } else if (lambda.imag() > 0) {
      imags.push_back(lambda.imag());
    } else {
      ++imag_negative;
    }
  }

  if (!reals.empty()) {
    if (reals.size() != 2)
      throw SnapFailure("eigen_structure: more than one real eigenvalue pair", 0.0);
    std::sort(reals.begin(), reals.end());
    if (reals[0] >= 0 || reals[1] <= 0)
      throw SnapFailure("eigen_structure: real eigenvalues are not a +-a pair", 0.0);
    out.real_pair = 0.5 * (reals[1] - reals[0]);
  }
  if (static_cast<int>(imags.size()) != imag_negative)
    throw SnapFailure("eigen_structure: unpaired imaginary eigenvalues", 0.0);

  // Merge numerically equal moduli so repeated b's come out identical.
  std::sort(imags.begin(), imags.end(), std::greater<>());
  std::size_t start = 0;
  while (start < imags.size()) {
    std::size_t end = start + 1;
    while (end < imags.size() && imags[start] - imags[end] <= 1e-9 * imags[start]) ++end;
    double mean = 0.0;
    for (std::size_t i = start; i < end; ++i) mean += imags[i];
    mean /= static_cast<double>(end - start);
    for (std::size_t i = start; i < end; ++i) out.imag_moduli.push_back(mean);
    start = end;
  }
  return out;
}

/// Euclidean-orthonormal basis of ker #F, ranks decided as in eigen_structure.
inline std::vector<MinkVector> kernel_basis(const TwoForm& F, double tol = kDefaultTol) {
  std::vector<MinkVector> out;
  const Matrix k = linalg::null_space(sharp(F), tol).basis;
  for (int j = 0; j < k.cols(); ++j) out.emplace_back(Vector(k.col(j)));
  return out;
}

/// Causal character of span(basis) from the signature of its Gram matrix.
inline KernelCausalType kernel_causal_type(const std::vector<MinkVector>& basis,
                                           double tol = kDefaultTol) {
  KernelCausalType out;
  const int k = static_cast<int>(basis.size());
  out.dimension = k;
  if (k == 0) return out;
  const int size = basis.front().size();
  Matrix gram(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gram(i, j) = minkowski_inner(basis[i], basis[j]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  // Scale by the basis vectors themselves: a 1x1 Gram matrix is its own norm.
  double scale = max_abs(gram);
  for (const MinkVector& v : basis) scale = std::max(scale, v.components.squaredNorm());
  const double threshold = tol * scale;
  for (int i = 0; i < k; ++i) {
    const double lambda = es.eigenvalues()(i);
    if (std::abs(lambda) <= threshold) ++out.zero;
    else if (lambda < 0) ++out.negative;
    else ++out.positive;
  }
  if (out.zero > 1 || out.negative > 1 || (out.zero == 1 && out.negative == 1))
    throw DegenerateSignature("kernel_causal_type: Gram signature impossible in R^{n,1}");
  if (k == size) out.tag = KernelTag::Full;
  else if (out.negative == 1) out.tag = KernelTag::Timelike;
  else if (out.zero == 1) out.tag = KernelTag::Null;
  else out.tag = KernelTag::Spacelike;
  return out;
}

struct Invariants {
  SpectrumSummary spectrum;
  KernelCausalType kernel;
};

inline Invariants invariants(const TwoForm& F, double tol = kDefaultTol) {
  return {eigen_structure(F, tol), kernel_causal_type(kernel_basis(F, tol), tol)};
}

} // namespace kvf

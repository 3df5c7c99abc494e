#include <gtest/gtest.h>

#include "kvf/canonical_form.hpp"
#include "kvf/random.hpp"
#include "kvf/sampling.hpp"

using namespace kvf;

namespace {

bool is_superdiagonal(const Matrix& m, double tol) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 2; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > tol) return false;
  return true;
}

double witness_error(const TwoForm& F, const TwoFormReport& rep) {
  return max_abs(Matrix(conjugate(rep.lambda, F).matrix() - canonical_2form_matrix(rep.cls, F.dim()).matrix()));
}

void expect_same_class(const TwoFormClass& got, const TwoFormClass& want, double tol) {
  EXPECT_EQ(got.tag, want.tag);
  EXPECT_NEAR(got.a, want.a, tol);
  ASSERT_EQ(got.b.size(), want.b.size());
  for (std::size_t i = 0; i < want.b.size(); ++i) EXPECT_NEAR(got.b[i], want.b[i], tol * want.b[i]);
}

} // namespace

TEST(SuperdiagonalReduce, AlreadySuperdiagonal) {
  const SuperdiagonalReduction red = superdiagonal_reduce(TwoForm::elementary(Dim(2), 1, 2));
  EXPECT_EQ(red.array.u, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(red.rotation.matrix(), Matrix::Identity(3, 3));
}

TEST(SuperdiagonalReduce, SingleOffDiagonalEntry) {
  const TwoForm F = TwoForm::elementary(Dim(3), 1, 3);
  const SuperdiagonalReduction red = superdiagonal_reduce(F);
  const Matrix out = conjugate(red.rotation, F).matrix();
  EXPECT_TRUE(is_superdiagonal(out, 1e-10));
  int nonzero = 0;
  for (double u : red.array.u)
    if (std::abs(u) > 1e-10) ++nonzero;
  EXPECT_EQ(nonzero, 1);
  EXPECT_EQ(red.rotation.matrix()(0, 0), 1.0);
}

TEST(SuperdiagonalReduce, ZeroForm) {
  const SuperdiagonalReduction red = superdiagonal_reduce(TwoForm::zero(Dim(4)));
  for (double u : red.array.u) EXPECT_EQ(u, 0.0);
  EXPECT_EQ(red.rotation.matrix(), Matrix::Identity(5, 5));
}

TEST(SuperdiagonalReduce, RandomFormsBecomeSuperdiagonal) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const Dim d(1 + t % 7);
    Matrix m(d.size(), d.size());
    for (int i = 0; i < d.size(); ++i)
      for (int j = 0; j < d.size(); ++j) m(i, j) = rng.normal();
    const TwoForm F(Matrix(m - m.transpose()));
    const SuperdiagonalReduction red = superdiagonal_reduce(F);
    const Matrix out = conjugate(red.rotation, F).matrix();
    EXPECT_TRUE(is_superdiagonal(out, 1e-10 * F.norm()));
    const Matrix& r = red.rotation.matrix();
    EXPECT_EQ(r(0, 0), 1.0);
    EXPECT_EQ(Vector(r.row(0).tail(d.n())).norm(), 0.0);
    EXPECT_EQ(Vector(r.col(0).tail(d.n())).norm(), 0.0);
  }
}

TEST(CanonicalMatrix, Examples) {
  const TwoForm b = canonical_2form_matrix({TwoFormTag::B, 0.0, {5.0}}, Dim(3));
  Matrix expect = Matrix::Zero(4, 4);
  expect(1, 2) = 5.0;
  expect(2, 1) = -5.0;
  EXPECT_EQ(b.matrix(), expect);

  EXPECT_TRUE(canonical_2form_matrix({TwoFormTag::A, 0.0, {}}, Dim(4)).matrix().isZero(0.0));

  const TwoForm f = canonical_2form_matrix({TwoFormTag::F, 0.0, {1.0}}, Dim(4));
  Matrix ef = Matrix::Zero(5, 5);
  ef(0, 1) = ef(1, 2) = ef(3, 4) = 1.0;
  ef(1, 0) = ef(2, 1) = ef(4, 3) = -1.0;
  EXPECT_EQ(f.matrix(), ef);
}

TEST(CanonicalMatrix, RejectsBadParameters) {
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::D, 1.0, {1.0}}, Dim(2)), DimensionTooSmall);
  EXPECT_NO_THROW(canonical_2form_matrix({TwoFormTag::D, 1.0, {1.0}}, Dim(3)));
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::F, 0.0, {1.0}}, Dim(3)), DimensionTooSmall);
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::E, 0.0, {}}, Dim(1)), DimensionTooSmall);
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::C, 0.0, {}}, Dim(2)), ParamViolation);
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::C, -1.0, {}}, Dim(2)), ParamViolation);
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::B, 0.0, {1.0, 2.0}}, Dim(4)), ParamViolation);
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::B, 0.0, {}}, Dim(4)), ParamViolation);
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::A, 0.0, {1.0}}, Dim(4)), ParamViolation);
  EXPECT_THROW(canonical_2form_matrix({TwoFormTag::B, 0.0, {0.0}}, Dim(4)), ParamViolation);
}

TEST(Canonicalize, Boost) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = 2.0;
  m(1, 0) = -2.0;
  const TwoFormReport rep = canonicalize_2form(TwoForm(m));
  EXPECT_EQ(rep.cls.tag, TwoFormTag::C);
  EXPECT_NEAR(rep.cls.a, 2.0, 1e-12);
  EXPECT_LE(rep.residual, 1e-12);
}

TEST(Canonicalize, NullRotationHasIdentityWitness) {
  const TwoForm F = canonical_2form_matrix({TwoFormTag::E, 0.0, {}}, Dim(2));
  const TwoFormReport rep = canonicalize_2form(F);
  EXPECT_EQ(rep.cls.tag, TwoFormTag::E);
  EXPECT_LE(max_abs(Matrix(rep.lambda.matrix() - Matrix::Identity(3, 3))), 1e-12);
}

TEST(Canonicalize, CanonicalInputsAreFixed) {
  const std::vector<std::pair<TwoFormClass, int>> cases{
      {{TwoFormTag::A, 0.0, {}}, 3},           {{TwoFormTag::B, 0.0, {2.0, 1.0}}, 5},
      {{TwoFormTag::C, 1.5, {}}, 2},           {{TwoFormTag::D, 2.0, {3.0, 0.5}}, 6},
      {{TwoFormTag::E, 0.0, {}}, 4},           {{TwoFormTag::F, 0.0, {2.0, 1.0}}, 7},
  };
  for (const auto& [cls, n] : cases) {
    const TwoForm F = canonical_2form_matrix(cls, Dim(n));
    const TwoFormReport rep = canonicalize_2form(F);
    expect_same_class(rep.cls, cls, 1e-10);
    EXPECT_LE(rep.residual, 1e-12);
  }
}

TEST(Canonicalize, ConjugatedNullRotationWithPlanes) {
  Rng rng(22);
  const TwoFormClass cls{TwoFormTag::F, 0.0, {2.0, 1.0}};
  const TwoForm F0 = canonical_2form_matrix(cls, Dim(6));
  for (int t = 0; t < 50; ++t) {
    const TwoForm F = conjugate(random_lorentz(Dim(6), rng), F0);
    const TwoFormReport rep = canonicalize_2form(F);
    expect_same_class(rep.cls, cls, 1e-8);
    EXPECT_LE(witness_error(F, rep), 1e-8 * (1.0 + F.norm()));
  }
}

TEST(Canonicalize, EqualStrengthsAreMerged) {
  Rng rng(23);
  const TwoFormClass cls{TwoFormTag::B, 0.0, {2.0, 2.0}};
  const TwoForm F0 = canonical_2form_matrix(cls, Dim(5));
  for (int t = 0; t < 20; ++t) {
    const TwoFormReport rep = canonicalize_2form(conjugate(random_lorentz(Dim(5), rng), F0));
    ASSERT_EQ(rep.cls.b.size(), 2u);
    EXPECT_EQ(rep.cls.b[0], rep.cls.b[1]);
    EXPECT_NEAR(rep.cls.b[0], 2.0, 1e-9);
  }
}

TEST(Canonicalize, RandomRoundTripAllClasses) {
  Rng rng(24);
  for (int tag = 0; tag < 6; ++tag) {
    for (int n = 1; n <= 7; ++n) {
      const auto t = static_cast<TwoFormTag>(tag);
      const int rmax = max_planes(t, n);
      if (rmax < 0) continue;
      for (int trial = 0; trial < 10; ++trial) {
        const int r = rmax == 0 ? 0 : 1 + trial % rmax;
        const TwoFormClass cls = random_two_form_class(t, r, rng);
        const TwoForm F = conjugate(random_lorentz(Dim(n), rng), canonical_2form_matrix(cls, Dim(n)));
        const TwoFormReport rep = canonicalize_2form(F);
        expect_same_class(rep.cls, cls, 1e-8);
        EXPECT_LE(witness_error(F, rep), 1e-8 * (1.0 + F.norm()));
      }
    }
  }
}

TEST(Canonicalize, ParametersMatchSpectrum) {
  Rng rng(25);
  for (int t = 0; t < 100; ++t) {
    const Dim d(1 + t % 7);
    Matrix m(d.size(), d.size());
    for (int i = 0; i < d.size(); ++i)
      for (int j = 0; j < d.size(); ++j) m(i, j) = rng.normal();
    const TwoForm F(Matrix(m - m.transpose()));
    const TwoFormReport rep = canonicalize_2form(F);
    const SpectrumSummary s = eigen_structure(F);
    if (s.real_pair) EXPECT_NEAR(rep.cls.a, *s.real_pair, 1e-8 * (1.0 + F.norm()));
    ASSERT_EQ(rep.cls.b.size(), s.imag_moduli.size());
    for (std::size_t i = 0; i < s.imag_moduli.size(); ++i)
      EXPECT_NEAR(rep.cls.b[i], s.imag_moduli[i], 1e-8 * (1.0 + F.norm()));
    const KernelTag k = rep.invariants.kernel.tag;
    switch (rep.cls.tag) {
      case TwoFormTag::A:
      case TwoFormTag::B: EXPECT_TRUE(k == KernelTag::Full || k == KernelTag::Timelike); break;
      case TwoFormTag::C:
      case TwoFormTag::D: EXPECT_TRUE(k == KernelTag::Spacelike || k == KernelTag::Trivial); break;
      default: EXPECT_EQ(k, KernelTag::Null);
    }
  }
}

TEST(MergeStrengths, AveragesCloseValues) {
  const auto b = detail::merge_strengths({1.0, 3.0, 3.0 * (1 + 1e-12), 2.0});
  ASSERT_EQ(b.size(), 4u);
  EXPECT_EQ(b[0], b[1]);
  EXPECT_EQ(b[2], 2.0);
  EXPECT_EQ(b[3], 1.0);
}

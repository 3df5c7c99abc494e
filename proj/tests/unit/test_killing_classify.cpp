#include <gtest/gtest.h>

#include "kvf/killing_classify.hpp"
#include "kvf/random.hpp"
#include "kvf/sampling.hpp"

using namespace kvf;

namespace {

KillingClass make(KillingTag t, int n, std::vector<double> b = {}, double a = 0.0, double f0 = 0.0,
                  double fn = 0.0) {
  KillingClass c;
  c.tag = t;
  c.dim = Dim(n);
  c.b = std::move(b);
  c.a = a;
  c.f0 = f0;
  c.fn = fn;
  return c;
}

void expect_same(const KillingClass& got, const KillingClass& want, double tol) {
  EXPECT_EQ(letter(got.tag), letter(want.tag));
  EXPECT_NEAR(got.a, want.a, tol);
  EXPECT_NEAR(got.f0, want.f0, tol);
  EXPECT_NEAR(got.fn, want.fn, tol);
  ASSERT_EQ(got.b.size(), want.b.size());
  for (std::size_t i = 0; i < want.b.size(); ++i) EXPECT_NEAR(got.b[i], want.b[i], tol);
}

} // namespace

TEST(Admissibility, TypeCountsPerDimension) {
  const int expected[] = {0, 4, 7, 11, 13, 14, 14, 14};
  for (int n = 1; n <= 7; ++n) {
    int count = 0;
    for (int t = 0; t < kKillingTagCount; ++t)
      if (max_planes(static_cast<KillingTag>(t), n) >= 0) ++count;
    EXPECT_EQ(count, expected[n]) << "n=" << n;
  }
}

TEST(Admissibility, ConstructionMatchesBounds) {
  for (int n = 1; n <= 7; ++n) {
    for (int t = 0; t < kKillingTagCount; ++t) {
      const auto tag = static_cast<KillingTag>(t);
      const KillingShape shape = shape_of(tag);
      for (int r = shape.has_rotations ? 1 : 0; r <= (shape.has_rotations ? 4 : 0); ++r) {
        KillingClass c = make(tag, n, std::vector<double>(r, 1.0), 1.0, -1.0, 1.0);
        if (admissible(tag, r, n)) EXPECT_NO_THROW(canonical_killing(c)) << letter(tag) << " n=" << n << " r=" << r;
        else EXPECT_THROW(canonical_killing(c), DimensionTooSmall) << letter(tag) << " n=" << n << " r=" << r;
      }
    }
  }
}

TEST(CanonicalKilling, Examples) {
  const KillingField d = canonical_killing(make(KillingTag::D, 1, {}, 2.0));
  EXPECT_EQ(d.F(0, 1), 2.0);
  EXPECT_TRUE(d.f.components.isZero(0.0));

  const KillingField g = canonical_killing(make(KillingTag::G, 2, {}, 0.0, 0.0));
  EXPECT_EQ(g.F(0, 1), 1.0);
  EXPECT_EQ(g.F(1, 2), 1.0);
  EXPECT_TRUE(g.f.components.isZero(0.0));

  const KillingField j = canonical_killing(make(KillingTag::J, 3, {1.0}, 1.0));
  EXPECT_EQ(j.F(0, 1), 1.0);
  EXPECT_EQ(j.F(2, 3), 1.0);
  EXPECT_TRUE(j.f.components.isZero(0.0));

  const KillingField c = canonical_killing(make(KillingTag::C, 4));
  EXPECT_EQ(c.f[0], -1.0);
  EXPECT_EQ(c.f[4], 1.0);
}

TEST(CanonicalKilling, ParameterViolations) {
  EXPECT_THROW(canonical_killing(make(KillingTag::A, 2, {}, 0.0, 0.0)), ParamViolation);
  EXPECT_THROW(canonical_killing(make(KillingTag::E, 2, {1.0}, 0.0, 0.5)), ParamViolation);
  EXPECT_THROW(canonical_killing(make(KillingTag::B, 2, {}, 0.0, 0.0, -1.0)), ParamViolation);
  EXPECT_THROW(canonical_killing(make(KillingTag::D, 2, {}, 0.0)), ParamViolation);
  EXPECT_THROW(canonical_killing(make(KillingTag::E, 4, {1.0, 2.0})), ParamViolation);
  EXPECT_THROW(canonical_killing(make(KillingTag::H, 4, {}, 0.0, 0.0, 1.0)), ParamViolation);
}

TEST(DecomposeBlocks, Examples) {
  const BlockDecomposition d =
      decompose_blocks(canonical_2form_matrix({TwoFormTag::D, 1.0, {2.0}}, Dim(4)));
  ASSERT_EQ(d.s_blocks.size(), 2u);
  EXPECT_EQ(d.s_blocks[0].p, 0);
  EXPECT_EQ(d.s_blocks[0].q, 1);
  EXPECT_EQ(d.s_blocks[0].strength, 1.0);
  EXPECT_EQ(d.s_blocks[1].p, 2);
  EXPECT_EQ(d.s_blocks[1].q, 3);
  EXPECT_EQ(d.s_blocks[1].strength, 2.0);
  EXPECT_EQ(d.o_indices, std::vector<int>{4});

  const BlockDecomposition e = decompose_blocks(canonical_2form_matrix({TwoFormTag::E, 0.0, {}}, Dim(3)));
  ASSERT_TRUE(e.n_block.has_value());
  EXPECT_EQ(*e.n_block, (std::array<int, 3>{0, 1, 2}));
  EXPECT_EQ(e.o_indices, std::vector<int>{3});

  const BlockDecomposition a = decompose_blocks(TwoForm::zero(Dim(3)));
  EXPECT_EQ(a.o_indices, (std::vector<int>{0, 1, 2, 3}));
}

TEST(DecomposeBlocks, RejectsNonCanonical) {
  EXPECT_THROW(decompose_blocks(TwoForm::elementary(Dim(3), 1, 3)), NotCanonical);
  EXPECT_THROW(decompose_blocks(TwoForm::elementary(Dim(3), 0, 1, -1.0)), NotCanonical);
}

TEST(ReduceTranslation, Examples) {
  const Dim d(3);
  Vector f(4);
  f << 0, 0, 0, 3;
  TranslationReduction r = reduce_translation(TwoForm::zero(d), MinkCovector(f));
  EXPECT_EQ(letter(r.cls.tag), 'b');
  EXPECT_NEAR(r.cls.fn, 3.0, 1e-12);

  const TwoForm Fb = canonical_2form_matrix({TwoFormTag::B, 0.0, {1.0}}, d);
  f << -2, 0.5, -0.7, 0;
  r = reduce_translation(Fb, MinkCovector(f));
  EXPECT_EQ(letter(r.cls.tag), 'e');
  EXPECT_NEAR(r.cls.f0, -2.0, 1e-12);
  const KillingField moved = act_poincare(r.g, KillingField(Fb, MinkCovector(f)));
  EXPECT_LE(max_abs(Matrix(moved.F.matrix() - Fb.matrix())), 1e-10);
  EXPECT_LE(max_abs(Vector(moved.f.components - r.f.components)), 1e-10);

  f << 1, 0, 0, 1;
  r = reduce_translation(TwoForm::zero(d), MinkCovector(f));
  EXPECT_EQ(letter(r.cls.tag), 'c');
  EXPECT_NEAR(r.f[0], -1.0, 1e-12);
  EXPECT_NEAR(r.f[3], 1.0, 1e-12);
}

TEST(ClassifyKilling, SimpleInputs) {
  KillingField xi = KillingField::zero(Dim(2));
  xi.f.components(0) = -1.0;
  KillingReport rep = classify_killing(xi);
  EXPECT_EQ(letter(rep.cls.tag), 'a');
  EXPECT_NEAR(rep.cls.f0, -1.0, 1e-12);

  KillingField boost = KillingField::zero(Dim(3));
  boost.F = TwoForm::elementary(Dim(3), 0, 1);
  boost.f.components(3) = 2.0;
  rep = classify_killing(boost);
  EXPECT_EQ(letter(rep.cls.tag), 'f');
  EXPECT_NEAR(rep.cls.a, 1.0, 1e-12);
  EXPECT_NEAR(rep.cls.fn, 2.0, 1e-12);
}

TEST(ClassifyKilling, ZeroFieldThrows) { EXPECT_THROW(classify_killing(KillingField::zero(Dim(3))), ZeroField); }

TEST(ClassifyKilling, CanonicalInputsHaveIdentityWitness) {
  Rng rng(31);
  for (int t = 0; t < kKillingTagCount; ++t) {
    const auto tag = static_cast<KillingTag>(t);
    for (int n = 1; n <= 7; ++n) {
      const int rmax = max_planes(tag, n);
      if (rmax < 0) continue;
      const KillingClass cls = random_killing_class(tag, Dim(n), rmax, rng);
      const KillingReport rep = classify_killing(canonical_killing(cls));
      expect_same(rep.cls, cls, 1e-10);
      EXPECT_LE(max_abs(Matrix(rep.g.lambda.matrix() - Matrix::Identity(n + 1, n + 1))), 1e-10)
          << letter(tag) << " n=" << n;
      EXPECT_LE(max_abs(rep.g.c.components), 1e-10) << letter(tag) << " n=" << n;
    }
  }
}

TEST(ClassifyKilling, ConjugatedBoundaryClass) {
  Rng rng(32);
  const KillingClass cls = make(KillingTag::M, 6, {2.0}, 0.0, -1.0);
  for (int t = 0; t < 20; ++t) {
    const KillingField xi = act_poincare(random_poincare(Dim(6), rng), canonical_killing(cls));
    const KillingReport rep = classify_killing(xi);
    expect_same(rep.cls, cls, 1e-8);
    EXPECT_LE(rep.residual, 1e-8 * (1.0 + xi.norm()));
  }
}

TEST(ClassifyKilling, RandomRoundTrip) {
  Rng rng(33);
  for (int t = 0; t < kKillingTagCount; ++t) {
    const auto tag = static_cast<KillingTag>(t);
    for (int n = 1; n <= 7; ++n) {
      const int rmax = max_planes(tag, n);
      if (rmax < 0) continue;
      for (int trial = 0; trial < 5; ++trial) {
        const int r = rmax == 0 ? 0 : 1 + trial % rmax;
        const KillingClass cls = random_killing_class(tag, Dim(n), r, rng);
        const KillingField xi = act_poincare(random_poincare(Dim(n), rng), canonical_killing(cls));
        const KillingReport rep = classify_killing(xi);
        expect_same(rep.cls, cls, 1e-8);
        const double err = field_distance(act_poincare(rep.g, xi), canonical_killing(rep.cls));
        EXPECT_LE(err, 1e-8 * (1.0 + xi.norm()));
      }
    }
  }
}

TEST(ClassifyKilling, BoundaryDemotesToSmallerClass) {
  // A rotation with no translation lands on class e with f0 = 0.
  const KillingReport rep = classify_killing(KillingField(TwoForm::elementary(Dim(3), 1, 2, 2.0), MinkCovector::zero(Dim(3))));
  EXPECT_EQ(letter(rep.cls.tag), 'e');
  EXPECT_EQ(rep.cls.f0, 0.0);
}

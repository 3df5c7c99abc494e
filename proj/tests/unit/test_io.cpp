#include <gtest/gtest.h>

#include "kvf/io.hpp"
#include "kvf/random.hpp"
#include "kvf/sampling.hpp"

using namespace kvf;
using io::json;

TEST(Json, DoublesRoundTripExactly) {
  Rng rng(61);
  for (int t = 0; t < 1000; ++t) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    const json back = json::parse(json(v).dump());
    EXPECT_EQ(back.get<double>(), v);
    EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
  }
}

TEST(Json, FieldDocumentRoundTrip) {
  Rng rng(62);
  const Dim d(4);
  const KillingField xi = act_poincare(random_poincare(d, rng), canonical_killing([] {
                                         KillingClass c;
                                         c.tag = KillingTag::L;
                                         c.dim = Dim(4);
                                         c.a = 0.8;
                                         c.b = {1.3};
                                         c.fn = 2.0;
                                         return c;
                                       }()));
  const io::FieldDocument doc = io::field_document_from(json::parse(io::to_json(xi).dump()));
  EXPECT_EQ(doc.dim.n(), 4);
  EXPECT_EQ(doc.xi.F.matrix(), xi.F.matrix());
  EXPECT_EQ(doc.xi.f.components, xi.f.components);
  EXPECT_FALSE(doc.eta.has_value());
}

TEST(Json, PairDocumentCarriesSecondField) {
  const auto [xi, eta] = canonical_pair({1, {}, 0.0}, Dim(2));
  const io::FieldDocument doc = io::field_document_from(io::to_json(io::FieldDocument{Dim(2), xi, eta}));
  ASSERT_TRUE(doc.eta.has_value());
  EXPECT_EQ(doc.eta->F.matrix(), eta.F.matrix());
}

TEST(Json, MissingTranslationDefaultsToZero) {
  const json doc = json::parse(R"({"n":1,"F":[[0,2],[-2,0]]})");
  const io::FieldDocument d = io::field_document_from(doc);
  EXPECT_TRUE(d.xi.f.components.isZero(0.0));
  EXPECT_EQ(d.xi.F(0, 1), 2.0);
}

TEST(Json, MalformedDocumentsAreParseErrors) {
  EXPECT_THROW(io::parse("{\"n\": 2,", "input"), ParseError);
  EXPECT_THROW(io::field_document_from(json::parse(R"({"F":[[0,1],[-1,0]]})")), ParseError);
  EXPECT_THROW(io::field_document_from(json::parse(R"({"n":0,"F":[[0]]})")), ParseError);
  EXPECT_THROW(io::field_document_from(json::parse(R"({"n":1.5,"F":[[0,1],[-1,0]]})")), ParseError);
  EXPECT_THROW(io::field_document_from(json::parse(R"({"n":1,"F":[[0,1],[-1]]})")), ParseError);
  EXPECT_THROW(io::field_document_from(json::parse(R"({"n":1,"F":[[0,1],[1,0]]})")), ParseError);
  EXPECT_THROW(io::field_document_from(json::parse(R"({"n":1,"F":[[0,"x"],[-1,0]]})")), ParseError);
  EXPECT_THROW(io::field_document_from(json::parse(R"({"n":1,"F":[[0,1],[-1,0]],"f":[1]})")), ParseError);
  EXPECT_THROW(io::poincare_from(json::parse(R"({"lambda":[[1,1],[0,1]],"c":[0,0]})"), Dim(1)), ParseError);
}

TEST(Json, ClassParametersRoundTrip) {
  KillingClass c;
  c.tag = KillingTag::N;
  c.dim = Dim(6);
  c.b = {2.0, 0.5};
  c.fn = 1.25;
  const json p = io::params_json(c);
  EXPECT_EQ(p["class"], "n");
  const KillingClass back = io::killing_class_from(io::tag_string(p, "class")[0], p);
  EXPECT_EQ(back.tag, c.tag);
  EXPECT_EQ(back.dim.n(), 6);
  EXPECT_EQ(back.b, c.b);
  EXPECT_EQ(back.fn, c.fn);

  const LiePairClass pc{2, {1.5}, 0.25};
  const LiePairClass pb = io::pair_class_from(io::params_json(pc));
  EXPECT_EQ(pb.family, 2);
  EXPECT_EQ(pb.b, pc.b);
  EXPECT_EQ(pb.q, pc.q);

  const TwoFormClass tc{TwoFormTag::D, 1.5, {0.5}};
  const TwoFormClass tb = io::two_form_class_from('d', io::params_json(tc));
  EXPECT_EQ(tb.a, 1.5);
  EXPECT_EQ(tb.b, tc.b);
  EXPECT_THROW(io::two_form_class_from('q', json::object()), ParamViolation);
}

TEST(Json, ReportWitnessReverifies) {
  Rng rng(63);
  KillingClass c;
  c.tag = KillingTag::H;
  c.dim = Dim(3);
  c.b = {1.1};
  c.fn = 0.6;
  const KillingField xi = act_poincare(random_poincare(c.dim, rng), canonical_killing(c));
  const KillingReport rep = classify_killing(xi);
  const json report = json::parse(io::report_json(rep, xi).dump());
  EXPECT_EQ(report["kind"], "killing");
  EXPECT_EQ(report["class"], "h");
  const Dim d = io::dim_from(report);
  const KillingField input = io::field_document_from(report["input"]).xi;
  const PoincareMap g = io::poincare_from(report["witness"], d);
  const KillingClass cls = io::killing_class_from(io::tag_string(report, "class")[0], report);
  const double residual = field_distance(act_poincare(g, input), canonical_killing(cls));
  EXPECT_LE(residual, 1e-8 * (1 + xi.norm()));
  EXPECT_NEAR(residual, report["residual"].get<double>(), 1e-12 * (1 + xi.norm()));
}

TEST(Json, PhaseStateForms) {
  const Dim d(1);
  const PhaseState a = io::phase_state_from(json::parse("[1,2,3,4]"), d);
  EXPECT_EQ(a.x[1], 2.0);
  EXPECT_EQ(a.P[0], 3.0);
  const PhaseState b = io::phase_state_from(json::parse(R"({"x":[1,2],"P":[3,4]})"), d);
  EXPECT_EQ(b.z(), a.z());
  EXPECT_THROW(io::phase_state_from(json::parse("[1,2,3]"), d), ParseError);
}

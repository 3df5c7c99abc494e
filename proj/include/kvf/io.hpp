#pragma once

// JSON documents for fields, classes and witnesses, and number formatting for
// CSV output. JSON numbers are written in nlohmann's shortest round-trip form;
// CSV numbers with 17 significant digits.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "kvf/canonical_form.hpp"
#include "kvf/errors.hpp"
#include "kvf/killing_classify.hpp"
#include "kvf/lie_pairs.hpp"
#include "kvf/minkowski.hpp"
#include "kvf/observable.hpp"

namespace kvf::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json to_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Matrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

inline json to_json(const std::vector<double>& v) { return json(v); }

inline double number_from(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + ": expected a number");
  return j.get<double>();
}

inline Vector vector_from(const json& j, int size, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != size)
    throw ParseError(what + ": expected an array of " + std::to_string(size) + " numbers");
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = number_from(j[i], what);
  return v;
}

inline Matrix matrix_from(const json& j, int rows, int cols, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ParseError(what + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) m.row(i) = vector_from(j[i], cols, what).transpose();
  return m;
}

inline std::vector<double> list_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  std::vector<double> out;
  for (const json& v : j) out.push_back(number_from(v, what));
  return out;
}

inline Dim dim_from(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer())
    throw ParseError("document needs an integer field \"n\"");
  const int n = doc["n"].get<int>();
  if (n < 1) throw ParseError("n must be at least 1");
  return Dim(n);
}

inline json to_json(const KillingField& xi) {
  return {{"n", xi.dim().n()}, {"F", to_json(xi.F.matrix())}, {"f", to_json(xi.f.components)}};
}

/// Reads F under `fkey` and f under `vkey`; a missing f is zero.
inline KillingField field_from(const json& doc, Dim d, const std::string& fkey = "F",
                               const std::string& vkey = "f") {
  if (!doc.contains(fkey)) throw ParseError("document needs \"" + fkey + "\"");
  const Matrix m = matrix_from(doc[fkey], d.size(), d.size(), fkey);
  TwoForm F;
  try {
    F = TwoForm(m);
  } catch (const NotAntisymmetric& e) {
    throw ParseError(fkey + ": " + e.what());
  }
  Vector f = doc.contains(vkey) ? vector_from(doc[vkey], d.size(), vkey) : Vector::Zero(d.size());
  return {std::move(F), MinkCovector(std::move(f))};
}

struct FieldDocument {
  Dim dim{1};
  KillingField xi;
  std::optional<KillingField> eta;  // from "G", "g"
};

inline FieldDocument field_document_from(const json& doc) {
  FieldDocument out;
  out.dim = dim_from(doc);
  out.xi = field_from(doc, out.dim);
  if (doc.contains("G")) out.eta = field_from(doc, out.dim, "G", "g");
  return out;
}

inline json to_json(const FieldDocument& d) {
  json out = to_json(d.xi);
  if (d.eta) {
    out["G"] = to_json(d.eta->F.matrix());
    out["g"] = to_json(d.eta->f.components);
  }
  return out;
}

inline json to_json(const PoincareMap& g) {
  return {{"lambda", to_json(g.lambda.matrix())}, {"c", to_json(g.c.components)}};
}

inline PoincareMap poincare_from(const json& j, Dim d) {
  if (!j.is_object() || !j.contains("lambda") || !j.contains("c")) throw ParseError("witness needs lambda and c");
  try {
    return {LorentzMap(matrix_from(j["lambda"], d.size(), d.size(), "lambda")),
            MinkVector(vector_from(j["c"], d.size(), "c"))};
  } catch (const InvalidLorentz& e) {
    throw ParseError(std::string("witness: ") + e.what());
  }
}

// Class parameters. Absent keys take their zero defaults.

inline json params_json(const TwoFormClass& c) {
  return {{"class", std::string(1, letter(c.tag))}, {"a", c.a}, {"b", c.b}};
}

inline json params_json(const KillingClass& c) {
  return {{"class", std::string(1, letter(c.tag))}, {"n", c.dim.n()}, {"a", c.a},
          {"b", c.b}, {"f0", c.f0}, {"fn", c.fn}};
}

inline json params_json(const LiePairClass& c) { return {{"family", c.family}, {"b", c.b}, {"q", c.q}}; }

inline std::string tag_string(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().size() != 1)
    throw ParseError("expected a one-letter \"" + key + "\"");
  return j[key].get<std::string>();
}

inline TwoFormClass two_form_class_from(char tag, const json& p) {
  TwoFormClass c;
  c.tag = two_form_tag_from(tag);
  if (p.contains("a")) c.a = number_from(p["a"], "a");
  if (p.contains("b")) c.b = list_from(p["b"], "b");
  return c;
}

inline KillingClass killing_class_from(char tag, const json& p) {
  KillingClass c;
  c.tag = killing_tag_from(tag);
  c.dim = dim_from(p);
  if (p.contains("a")) c.a = number_from(p["a"], "a");
  if (p.contains("b")) c.b = list_from(p["b"], "b");
  if (p.contains("f0")) c.f0 = number_from(p["f0"], "f0");
  if (p.contains("fn")) c.fn = number_from(p["fn"], "fn");
  return c;
}

inline LiePairClass pair_class_from(const json& p) {
  LiePairClass c;
  if (!p.contains("family") || !p["family"].is_number_integer()) throw ParseError("pair needs integer \"family\"");
  c.family = p["family"].get<int>();
  if (p.contains("b")) c.b = list_from(p["b"], "b");
  if (p.contains("q")) c.q = number_from(p["q"], "q");
  return c;
}

// Reports. Each carries its input so a witness can be re-checked from the
// report alone.

inline json report_json(const TwoFormReport& r, const TwoForm& input) {
  json out = params_json(r.cls);
  out["kind"] = "2form";
  out["n"] = input.dim().n();
  out["witness"] = to_json(PoincareMap::linear(r.lambda));
  out["residual"] = r.residual;
  out["margin"] = r.margin;
  out["input"] = to_json(KillingField(input, MinkCovector::zero(input.dim())));
  return out;
}

inline json report_json(const KillingReport& r, const KillingField& input) {
  json out = params_json(r.cls);
  out["kind"] = "killing";
  out["witness"] = to_json(r.g);
  out["residual"] = r.residual;
  out["margin"] = r.margin;
  out["input"] = to_json(input);
  return out;
}

inline json report_json(const LiePairReport& r, const KillingField& xi, const KillingField& eta) {
  json out = params_json(r.cls);
  out["kind"] = "pair";
  out["n"] = xi.dim().n();
  out["witness"] = to_json(r.g);
  out["residual"] = r.residual;
  out["margin"] = r.margin;
  out["input"] = to_json(FieldDocument{xi.dim(), xi, eta});
  return out;
}

/// Phase point from {"x": [...], "P": [...]} or a flat array of 2(n+1) numbers.
inline PhaseState phase_state_from(const json& j, Dim d) {
  if (j.is_array()) {
    const Vector z = vector_from(j, 2 * d.size(), "z0");
    return PhaseState::from_z(z);
  }
  if (!j.is_object() || !j.contains("x") || !j.contains("P")) throw ParseError("z0 needs \"x\" and \"P\"");
  return {MinkVector(vector_from(j["x"], d.size(), "x")), MinkCovector(vector_from(j["P"], d.size(), "P"))};
}

inline json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

} // namespace kvf::io

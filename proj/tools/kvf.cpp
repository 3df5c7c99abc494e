// kvf: classification, simulation and verification front end.
//
// Exit codes: 0 ok, 1 other error, 2 bad input or usage, 3 classification
// unstable, 4 impossible translation, 5 parameter or dimension violation,
// 6 constraint violated.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "kvf/canonical_form.hpp"
#include "kvf/flow.hpp"
#include "kvf/hamiltonian.hpp"
#include "kvf/io.hpp"
#include "kvf/killing_classify.hpp"
#include "kvf/lie_pairs.hpp"
#include "kvf/random.hpp"
#include "kvf/worldsheet.hpp"
#include "suites.hpp"

using namespace kvf;
using io::json;

namespace {

enum Exit { kOk = 0, kOther = 1, kParse = 2, kUnstable = 3, kImpossible = 4, kParams = 5, kConstraint = 6 };

double tolerance() {
  const char* env = std::getenv("KC_TOL");
  if (!env || !*env) return kDefaultTol;
  char* end = nullptr;
  const double tol = std::strtod(env, &end);
  if (*end != '\0' || !(tol > 0.0)) throw ParseError(std::string("KC_TOL is not a positive number: ") + env);
  return tol;
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) { return io::parse(read_input(path), path.empty() ? "stdin" : path); }

char one_letter(const std::string& s) {
  if (s.size() != 1) throw ParamViolation("class tag must be a single letter, got '" + s + "'");
  return s[0];
}

// "a:b:m" -> m points from a to b.
std::vector<double> grid_from(const std::string& spec, const std::string& what) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ParseError(what + " must look like a:b:m");
  try {
    return uniform_grid(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]));
  } catch (const std::logic_error&) {
    throw ParseError(what + " must look like a:b:m");
  }
}

int cmd_classify_2form(const std::string& input) {
  const io::FieldDocument doc = io::field_document_from(read_json(input));
  const TwoFormReport rep = canonicalize_2form(doc.xi.F, tolerance());
  std::cout << io::report_json(rep, doc.xi.F).dump(2) << "\n";
  return kOk;
}

int cmd_classify_killing(const std::string& input) {
  const io::FieldDocument doc = io::field_document_from(read_json(input));
  const KillingReport rep = classify_killing(doc.xi, tolerance());
  std::cout << io::report_json(rep, doc.xi).dump(2) << "\n";
  return kOk;
}

int cmd_classify_pair(const std::string& input) {
  const io::FieldDocument doc = io::field_document_from(read_json(input));
  if (!doc.eta) throw ParseError("pair document needs \"G\" (and optionally \"g\")");
  const LiePairReport rep = classify_pair(doc.xi, *doc.eta, tolerance());
  std::cout << io::report_json(rep, doc.xi, *doc.eta).dump(2) << "\n";
  return kOk;
}

int cmd_verify_witness(const std::string& input) {
  const json rep = read_json(input);
  if (!rep.contains("kind") || !rep["kind"].is_string() || !rep.contains("input"))
    throw ParseError("not a classification report");
  const std::string kind = rep["kind"];
  const io::FieldDocument doc = io::field_document_from(rep["input"]);
  const PoincareMap g = io::poincare_from(rep["witness"], doc.dim);
  double residual = 0.0;
  double scale = 1.0 + doc.xi.norm();
  if (kind == "2form") {
    const TwoFormClass cls = io::two_form_class_from(one_letter(io::tag_string(rep, "class")), rep);
    residual = max_abs(Matrix(conjugate(g.lambda, doc.xi.F).matrix() - canonical_2form_matrix(cls, doc.dim).matrix()));
  } else if (kind == "killing") {
    const KillingClass cls = io::killing_class_from(one_letter(io::tag_string(rep, "class")), rep);
    residual = field_distance(act_poincare(g, doc.xi), canonical_killing(cls));
  } else if (kind == "pair") {
    if (!doc.eta) throw ParseError("pair report without eta");
    const auto [xi_c, eta_c] = canonical_pair(io::pair_class_from(rep), doc.dim);
    residual = std::max(field_distance(act_poincare(g, doc.xi), xi_c), field_distance(act_poincare(g, *doc.eta), eta_c));
    scale += doc.eta->norm();
  } else {
    throw ParseError("unknown report kind '" + kind + "'");
  }
  const bool ok = residual <= 1e-8 * scale;
  std::cout << json{{"ok", ok}, {"residual", residual}, {"bound", 1e-8 * scale}}.dump() << "\n";
  return ok ? kOk : kOther;
}

int cmd_make_testcase(const std::string& kind, const std::string& tag, const std::string& params_text,
                      std::uint64_t seed, double rapidity, double translation) {
  const json params = io::parse(params_text, "--params");
  const Dim d = io::dim_from(params);
  Rng rng(seed);
  const PoincareMap g = random_poincare(d, rng, rapidity, translation);
  io::FieldDocument doc;
  doc.dim = d;
  if (kind == "2form") {
    const TwoForm F = canonical_2form_matrix(io::two_form_class_from(one_letter(tag), params), d);
    doc.xi = KillingField(conjugate(g.lambda, F), MinkCovector::zero(d));
  } else if (kind == "killing") {
    doc.xi = act_poincare(g, canonical_killing(io::killing_class_from(one_letter(tag), params)));
  } else if (kind == "pair") {
    if (tag != "1" && tag != "2") throw ParamViolation("pair class must be 1 or 2");
    json p = params;
    p["family"] = std::stoi(tag);
    const auto [xi, eta] = canonical_pair(io::pair_class_from(p), d);
    doc.xi = act_poincare(g, xi);
    doc.eta = act_poincare(g, eta);
  } else {
    throw ParseError("unknown kind '" + kind + "'");
  }
  std::cout << io::to_json(doc).dump(2) << "\n";
  return kOk;
}

int cmd_simulate(const std::string& tag, const std::string& params_text, const std::string& z0_text,
                 double sigma_max, int steps, const std::string& method) {
  const KillingClass cls = io::killing_class_from(one_letter(tag), io::parse(params_text, "--params"));
  const KillingField xi = canonical_killing(cls);
  const PhaseState z0 = io::phase_state_from(io::parse(z0_text, "--z0"), cls.dim);
  if (steps < 0) throw ParamViolation("steps must be nonnegative");
  if (!(sigma_max >= 0.0)) throw ParamViolation("sigma-max must be nonnegative");
  const HamiltonianParts parts = build_hamiltonian(xi);
  const double h = steps > 0 ? sigma_max / steps : 0.0;
  std::vector<PhaseState> states;
  if (method == "exact") {
    states = steps > 0 ? flow_exact_samples(parts.H, z0, h, steps) : std::vector<PhaseState>{z0};
  } else if (method == "leapfrog") {
    states = steps > 0 && h > 0.0 ? flow_symplectic(parts.H, z0, h, steps) : std::vector<PhaseState>{z0};
  } else {
    throw ParseError("method must be exact or leapfrog");
  }
  ConservedSet set = conserved_set(xi);
  std::vector<LabeledObservable> columns = set.observables;
  columns.insert(columns.end(), set.aliases.begin(), set.aliases.end());

  const int size = cls.dim.size();
  std::cout << "sigma";
  for (int mu = 0; mu < size; ++mu) std::cout << ",x" << mu;
  for (int mu = 0; mu < size; ++mu) std::cout << ",P" << mu;
  for (const auto& c : columns) std::cout << "," << c.label;
  std::cout << "\n";
  double max_drift = 0.0;
  const Vector zz0 = z0.z();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Vector z = states[k].z();
    std::cout << io::format_double(h * static_cast<double>(k));
    for (int i = 0; i < z.size(); ++i) std::cout << "," << io::format_double(z(i));
    for (const auto& c : columns) {
      std::cout << "," << io::format_double(c.q(z));
      max_drift = std::max(max_drift, relative_drift(c.q, zz0, z));
    }
    std::cout << "\n";
  }
  std::cout << "# max_drift=" << io::format_double(max_drift) << "\n";
  return kOk;
}

int cmd_worldsheet(const std::string& tag, const std::string& params_text, const std::string& z0_text,
                   const std::string& tau_spec, const std::string& sigma_spec, const std::string& out_path,
                   bool project) {
  const KillingClass cls = io::killing_class_from(one_letter(tag), io::parse(params_text, "--params"));
  const KillingField xi = canonical_killing(cls);
  PhaseState z0 = io::phase_state_from(io::parse(z0_text, "--geodesic-z0"), cls.dim);
  if (project) z0.P = constrained_momentum(xi, z0.x, z0.P);
  const std::vector<double> tau = grid_from(tau_spec, "--tau");
  const std::vector<double> sigma = grid_from(sigma_spec, "--sigma");
  const Worldsheet ws = build_worldsheet(xi, z0, tau, sigma);
  const ResidualReport rep = ng_residual(ws);
  json mesh{{"tau", tau}, {"sigma", sigma}, {"x", json::array()}};
  for (const auto& row : ws.points) {
    json r = json::array();
    for (const MinkVector& p : row) r.push_back(io::to_json(p.components));
    mesh["x"].push_back(std::move(r));
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  out << mesh.dump() << "\n";
  std::cout << "max_residual=" << io::format_double(rep.max_residual) << " det_min=" << io::format_double(rep.det_min)
            << " det_max=" << io::format_double(rep.det_max) << " interior_points=" << rep.interior_points
            << " invariance_defect=" << io::format_double(invariance_defect(ws, xi)) << "\n";
  return kOk;
}

int cmd_verify(const std::string& suite, int trials, std::uint64_t seed) {
  std::vector<std::string> run;
  if (suite == "all") {
    run = suites::suite_names();
  } else if (std::find(suites::suite_names().begin(), suites::suite_names().end(), suite) !=
             suites::suite_names().end()) {
    run = {suite};
  } else {
    std::cerr << "kvf: unknown suite '" << suite << "'\n";
    return kParse;
  }
  if (trials < 0) throw ParamViolation("trials must be nonnegative");
  if (trials == 0) std::cerr << "kvf: warning: --trials 0, every suite passes vacuously\n";
  const double tol = tolerance();
  bool all = true;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %8s %9s %12s  %s\n", "suite", "trials", "failures", "worst", "result");
  std::cout << line;
  for (const std::string& name : run) {
    const suites::SuiteResult r = suites::run_suite(name, trials, seed, tol);
    all = all && r.failures == 0;
    std::snprintf(line, sizeof line, "%-10s %8d %9d %12.3e  %s\n", r.name.c_str(), r.trials, r.failures, r.worst,
                  r.failures == 0 ? "PASS" : "FAIL");
    std::cout << line;
    if (!r.first_error.empty()) std::cout << "  first failure: " << r.first_error << "\n";
  }
  return all ? kOk : kOther;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "kvf: invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const ClassificationUnstable& e) {
    std::cerr << "kvf: classification unstable: " << e.what() << "\n";
    return kUnstable;
  } catch (const SnapFailure& e) {
    std::cerr << "kvf: classification unstable: " << e.what() << " (snap distance " << e.distance() << ")\n";
    return kUnstable;
  } catch (const ImpossibleTranslation& e) {
    std::cerr << "kvf: " << e.what() << "\n";
    return kImpossible;
  } catch (const DimensionTooSmall& e) {
    std::cerr << "kvf: dimension too small: " << e.what() << "\n";
    return kParams;
  } catch (const ParamViolation& e) {
    std::cerr << "kvf: parameter violation: " << e.what() << "\n";
    return kParams;
  } catch (const ConstraintViolated& e) {
    std::cerr << "kvf: constraint violated: " << e.what() << "\n";
    return kConstraint;
  } catch (const std::exception& e) {
    std::cerr << "kvf: " << e.what() << "\n";
    return kOther;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Killing vector fields of flat spacetime: classification, string dynamics, verification"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::string input;
  auto add_input = [&](CLI::App* sub) { sub->add_option("--input,-i", input, "JSON file (default stdin)"); };

  auto* c2 = app.add_subcommand("classify-2form", "canonical form of a constant 2-form");
  add_input(c2);
  c2->callback([&] { action = [&] { return cmd_classify_2form(input); }; });

  auto* ck = app.add_subcommand("classify-killing", "canonical form of a Killing field");
  add_input(ck);
  ck->callback([&] { action = [&] { return cmd_classify_killing(input); }; });

  auto* cp = app.add_subcommand("classify-pair", "canonical form of a pair with [xi, eta] = xi");
  add_input(cp);
  cp->callback([&] { action = [&] { return cmd_classify_pair(input); }; });

  auto* vw = app.add_subcommand("verify-witness", "re-check the witness of a classification report");
  add_input(vw);
  vw->callback([&] { action = [&] { return cmd_verify_witness(input); }; });

  std::string kind = "killing", tag, params = "{}";
  std::uint64_t seed = 1;
  double rapidity = 2.0, translation = 10.0;
  auto* mk = app.add_subcommand("make-testcase", "random Poincare conjugate of a canonical field");
  mk->add_option("--kind", kind, "2form, killing or pair")->check(CLI::IsMember({"2form", "killing", "pair"}));
  mk->add_option("--class", tag, "class letter, or pair family 1/2")->required();
  mk->add_option("--params", params, "JSON parameters including n");
  mk->add_option("--seed", seed, "random seed");
  mk->add_option("--rapidity", rapidity, "largest boost rapidity");
  mk->add_option("--translation", translation, "largest translation component");
  mk->callback([&] { action = [&] { return cmd_make_testcase(kind, tag, params, seed, rapidity, translation); }; });

  std::string z0, method = "exact";
  double sigma_max = 10.0;
  int steps = 100;
  auto* sim = app.add_subcommand("simulate", "trajectory of the reduced Hamiltonian as CSV");
  sim->add_option("--class", tag, "Killing class letter")->required();
  sim->add_option("--params", params, "JSON parameters including n")->required();
  sim->add_option("--z0", z0, "initial point {\"x\":[...],\"P\":[...]}")->required();
  sim->add_option("--sigma-max", sigma_max, "final parameter value");
  sim->add_option("--steps", steps, "number of steps");
  sim->add_option("--method", method, "exact or leapfrog");
  sim->callback([&] { action = [&] { return cmd_simulate(tag, params, z0, sigma_max, steps, method); }; });

  std::string tau_spec, sigma_spec, out_path;
  bool project = false;
  auto* wsc = app.add_subcommand("worldsheet", "sampled cohomogeneity-one string worldsheet");
  wsc->add_option("--class", tag, "Killing class letter")->required();
  wsc->add_option("--params", params, "JSON parameters including n")->required();
  wsc->add_option("--geodesic-z0", z0, "initial point of the reduced geodesic")->required();
  wsc->add_option("--tau", tau_spec, "a:b:m")->required();
  wsc->add_option("--sigma", sigma_spec, "c:d:k")->required();
  wsc->add_option("--out", out_path, "mesh JSON file")->required();
  wsc->add_flag("--project-momentum", project, "project P onto xi.P = 0, H = 0 first");
  wsc->callback([&] {
    action = [&] { return cmd_worldsheet(tag, params, z0, tau_spec, sigma_spec, out_path, project); };
  });

  std::string suite = "all";
  int trials = 100;
  auto* ver = app.add_subcommand("verify", "randomized property suites");
  ver->add_option("--suite", suite, "all, spectral, classify, dynamics or pairs");
  ver->add_option("--trials", trials, "trials per suite");
  ver->add_option("--seed", seed, "random seed");
  ver->callback([&] { action = [&] { return cmd_verify(suite, trials, seed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }
  return run_guarded(action);
}

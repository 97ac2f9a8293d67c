#include "verbs.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>

#include "fineq/bessel_certify.hpp"
#include "fineq/best_constants.hpp"
#include "fineq/error.hpp"
#include "fineq/moser.hpp"
#include "fineq/transport.hpp"
#include "fineq/verifier.hpp"
#include "fineq/weight_dsl.hpp"

namespace fineq::cli {

// --- Inputs ------------------------------------------------------------------------

double Inputs::number(const std::string& key) {
  auto it = raw_.find(key);
  if (it == raw_.end()) throw InvalidInput("missing required option --" + key);
  Expr e = parse_expr(it->second);
  if (e.depends_on_r()) throw InvalidInput("--" + key + " must be a number");
  const double v = e(1.0);
  if (!std::isfinite(v)) throw InvalidInput("--" + key + " is not finite");
  used_[key] = v;
  return v;
}

double Inputs::number(const std::string& key, double fallback) {
  if (has(key)) return number(key);
  used_[key] = number_or_null(fallback);
  return fallback;
}

std::optional<double> Inputs::maybe_number(const std::string& key) {
  if (!has(key)) return std::nullopt;
  return number(key);
}

int Inputs::integer(const std::string& key, int fallback) {
  if (!has(key)) {
    used_[key] = fallback;
    return fallback;
  }
  const double v = number(key);
  if (v != std::round(v) || std::abs(v) > 1e9) throw InvalidInput("--" + key + " must be an integer");
  used_[key] = int(v);
  return int(v);
}

std::string Inputs::text(const std::string& key) {
  auto it = raw_.find(key);
  if (it == raw_.end()) throw InvalidInput("missing required option --" + key);
  used_[key] = it->second;
  return it->second;
}

std::string Inputs::text(const std::string& key, const std::string& fallback) {
  if (has(key)) return text(key);
  used_[key] = fallback;
  return fallback;
}

void Inputs::require_all_used(const std::string& verb) const {
  for (const auto& [k, v] : raw_)
    if (!used_.contains(k)) throw InvalidInput("option --" + k + " does not apply to '" + verb + "' here");
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json number_or_null_impl(double v) { return std::isnan(v) ? Json(nullptr) : number(v); }

bool is_builtin_name(const std::string& s) {
  return s == "zero" || s == "one" || s == "power" || s == "inv_sq_log" || s == "iterlog" || s == "pair_shift";
}

// DSL text, or a catalog entry such as iterlog(k=1, rho=1).
WeightExpr weight_from_text(const std::string& text, WeightRole role, double R) {
  static const std::regex call(R"(^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, call) && is_builtin_name(m[1].str())) {
    BuiltinParams params;
    std::string body = m[2].str();
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidInput("catalog parameter needs key=value: '" + item + "'");
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
      };
      Expr v = parse_expr(trim(item.substr(eq + 1)));
      params[trim(item.substr(0, eq))] = v(1.0);
    }
    WeightExpr w = builtin(m[1].str(), params);
    if (role == WeightRole::potential) require_potential(w, std::isnan(R) ? std::min(w.r_max(), 1.0) : R);
    return w;
  }
  return parse_weight(text, role, R);
}

// R from --R, else the weight's own domain.
double radius_for(Inputs& in, const WeightExpr& w) {
  if (in.has("R")) {
    const double R = in.number("R");
    if (!(R > 0.0)) throw InvalidInput("--R must be positive");
    return R;
  }
  if (!std::isfinite(w.r_max())) throw InvalidInput("missing --R and the weight has no finite domain");
  in.number("R", w.r_max());
  return w.r_max();
}

Json certificate_json(const PositivityCertificate& c) {
  Json j;
  j["status"] = to_string(c.status);
  j["first_zero"] = c.zero ? number(*c.zero) : Json(nullptr);
  j["radius"] = number(c.radius);
  j["start_radius"] = number(c.start_radius);
  j["min_value"] = number(c.min_value);
  j["steps"] = c.steps;
  j["endpoint_zero"] = c.endpoint_zero;
  j["origin_oscillatory"] = c.origin_oscillatory;
  j["settings_hash"] = c.settings_hash;
  j["note"] = c.note;
  return j;
}

Json outcome_json(const CheckOutcome& c) {
  Json j;
  j["lhs"] = number(c.lhs);
  j["rhs"] = number(c.rhs);
  j["margin"] = number(c.margin);
  j["error"] = number(c.error);
  j["pass"] = c.pass;
  j["theta"] = c.theta ? number(*c.theta) : Json(nullptr);
  j["note"] = c.note;
  return j;
}

Json verdict(bool pass) { return Json{{"status", pass ? "pass" : "fail"}}; }

void write_text(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InvalidInput("cannot write " + path);
  os << body;
}

// --- certify-hi / certify-pair ------------------------------------------------------

Outcome certify_hi(Inputs& in) {
  const std::string text = in.text("potential");
  WeightExpr P = weight_from_text(text, WeightRole::potential, kNaN);
  const double R = radius_for(in, P);
  require_potential(P, R);
  const double tol = in.number("tol", kDefaultOdeTolerance);
  PositivityCertificate c = is_hi_potential(P, R, tol);
  Outcome o;
  o.result = certificate_json(c);
  o.result["potential"] = P.text();
  o.certificate["status"] = to_string(c.status);
  o.certificate["positive"] = c.positive();
  o.tolerances["ode_tol"] = tol;
  if (in.has("trace")) {
    std::ostringstream os;
    integrate_singular_ode(RadialCoefficients::hardy(P, R), tol).write_csv(os);
    write_text(in.text("trace"), os.str());
  }
  o.exit_code = c.positive() ? kPass : kFail;
  return o;
}

Outcome certify_pair(Inputs& in) {
  PairSpec spec;
  spec.V = weight_from_text(in.text("V"), WeightRole::generic, kNaN);
  spec.W = weight_from_text(in.text("W"), WeightRole::generic, kNaN);
  spec.n = in.integer("n", 3);
  spec.R = in.number("R");
  spec.lambda = in.maybe_number("lambda");
  spec.validate();
  const double tol = in.number("tol", kDefaultOdeTolerance);
  PositivityCertificate c = is_bessel_pair(spec, tol);
  Outcome o;
  o.result = certificate_json(c);
  o.result["V"] = spec.V.text();
  o.result["W"] = spec.W.text();
  GridCheck g = rellich_condition_check(spec);
  o.result["rellich_condition"] = {{"holds", g.holds},
                                   {"violation_radius", g.violation_radius ? number(*g.violation_radius) : Json()},
                                   {"worst_value", number(g.worst_value)},
                                   {"grid_points", g.grid_points}};
  o.certificate["status"] = to_string(c.status);
  o.certificate["positive"] = c.positive();
  o.tolerances["ode_tol"] = tol;
  o.exit_code = c.positive() ? kPass : kFail;
  return o;
}

// --- beta / rayleigh ----------------------------------------------------------------

Outcome beta(Inputs& in) {
  WeightExpr P = weight_from_text(in.text("potential"), WeightRole::potential, kNaN);
  const int n = in.integer("n", 2);
  const double R = radius_for(in, P);
  BetaOptions opt;
  opt.ode_tol = in.number("tol", opt.ode_tol);
  ConstantResult r = beta_constant(P, n, R, opt);
  Outcome o;
  o.result["value"] = number(r.value);
  o.result["lower"] = number(r.lower);
  o.result["upper"] = number(r.upper);
  o.result["method"] = to_string(r.method);
  o.result["iterations"] = r.iterations;
  o.result["cross_check"] = number_or_null_impl(r.cross_check);
  o.result["note"] = r.note;
  o.certificate = verdict(true);
  o.tolerances["ode_tol"] = opt.ode_tol;
  o.tolerances["rel_width"] = opt.rel_width;
  return o;
}

Outcome rayleigh(Inputs& in) {
  const std::string mode = in.text("mode", "hardy");
  const int n = in.integer("n", mode == "hardy-rellich" ? 5 : 3);
  const double R = in.number("R", 1.0);
  const int N = in.integer("grid", 512);
  QuadraticForm form;
  double closed = kNaN;
  if (mode == "hardy") {
    form = QuadraticForm::hardy_quotient(n, R);
    closed = closed_constant(ClosedConstant::interior, n);
  } else if (mode == "hardy-rellich") {
    form = QuadraticForm::hardy_rellich_quotient(n, R);
    closed = closed_constant(ClosedConstant::hardy_rellich, n);
  } else if (mode == "improved") {
    WeightExpr P = weight_from_text(in.text("potential"), WeightRole::potential, R);
    form = QuadraticForm::improved_hardy_quotient(P, n, R);
  } else {
    throw InvalidInput("unknown rayleigh mode '" + mode + "' (hardy | hardy-rellich | improved)");
  }
  ConstantResult r = rayleigh_minimize(form, N);
  Outcome o;
  o.result["value"] = number(r.value);
  o.result["closed_form"] = number_or_null_impl(closed);
  o.result["residual"] = number(r.residual);
  o.result["attainment_diagnostic"] = number(r.attainment_diagnostic);
  o.result["grid"] = r.grid;
  o.result["log_span"] = number(r.log_span);
  o.result["method"] = to_string(r.method);
  o.result["note"] = r.note;
  o.certificate = verdict(true);
  if (in.has("trace")) {
    std::ostringstream os;
    os.precision(17);
    os << "r,u\n";
    for (auto [x, u] : r.profile) os << x << ',' << u << '\n';
    write_text(in.text("trace"), os.str());
  }
  return o;
}

// --- verify -------------------------------------------------------------------------

Outcome verify(Inputs& in) {
  const std::string check = in.text("check");
  const int n = in.integer("n", 3);
  const double R = check == "distance-interval" ? 1.0 : in.number("R", 1.0);
  std::vector<RadialTestFunction> profiles;
  if (in.has("profile")) {
    std::ifstream is(in.text("profile"));
    if (!is) throw InvalidInput("cannot read profile CSV");
    profiles.push_back(RadialTestFunction::read_csv(is, Smoothness::h2, "csv"));
  } else {
    const int seed = in.integer("seed", 20240601);
    profiles = check == "distance-interval" ? interval_family(std::uint64_t(seed))
                                            : profile_family(R, std::uint64_t(seed));
  }
  std::function<CheckOutcome(const RadialTestFunction&)> run_one;
  if (check == "improved-hardy") {
    WeightExpr P = weight_from_text(in.text("potential"), WeightRole::potential, R);
    run_one = [=](const RadialTestFunction& u) { return check_improved_hardy(P, u, n, R); };
  } else if (check == "hardy-rellich" || check == "boundary-h1" || check == "boundary-h2") {
    WeightExpr V = weight_from_text(in.text("V"), WeightRole::generic, kNaN);
    WeightExpr W = weight_from_text(in.text("W"), WeightRole::generic, kNaN);
    if (check == "hardy-rellich")
      run_one = [=](const RadialTestFunction& u) { return check_hardy_rellich_radial(V, W, u, n, R); };
    else {
      const BoundaryForm f = check == "boundary-h1" ? BoundaryForm::first_order : BoundaryForm::second_order;
      run_one = [=](const RadialTestFunction& u) { return check_boundary_terms(V, W, u, n, R, f); };
    }
  } else if (check == "e-weight" || check == "e-weight-boundary") {
    WeightExpr E = weight_from_text(in.text("V"), WeightRole::generic, kNaN);
    const EWeightMode mode = check == "e-weight" ? EWeightMode::interior : EWeightMode::boundary;
    run_one = [=](const RadialTestFunction& u) { return check_E_weight(E, mode, u, n); };
  } else if (check == "distance") {
    run_one = [=](const RadialTestFunction& u) { return check_distance_hardy(n, u, n, R); };
  } else if (check == "distance-interval") {
    run_one = [](const RadialTestFunction& u) { return check_distance_hardy_interval(u); };
  } else {
    throw InvalidInput("unknown check '" + check +
                       "' (improved-hardy | hardy-rellich | boundary-h1 | boundary-h2 | e-weight | "
                       "e-weight-boundary | distance | distance-interval)");
  }
  Outcome o;
  int passed = 0, failed = 0;
  double worst = std::numeric_limits<double>::infinity();
  double theta_max = 0.0;
  bool any_theta = false;
  std::string worst_label;
  Json margins = Json::array();
  for (const auto& u : profiles) {
    CheckOutcome c = run_one(u);
    (c.pass ? passed : failed)++;
    margins.push_back(number(c.margin));
    const double rel = c.margin / std::max({std::abs(c.lhs), std::abs(c.rhs), 1e-300});
    if (rel < worst) {
      worst = rel;
      worst_label = u.label();
    }
    if (c.theta) {
      any_theta = true;
      theta_max = std::max(theta_max, *c.theta);
    }
  }
  o.result["check"] = check;
  o.result["profiles"] = profiles.size();
  o.result["passed"] = passed;
  o.result["failed"] = failed;
  o.result["worst_relative_margin"] = number(worst);
  o.result["worst_profile"] = worst_label;
  o.result["theta_max"] = any_theta ? number(theta_max) : Json(nullptr);
  o.result["margins"] = margins;
  o.certificate = verdict(failed == 0);
  o.tolerances["pass_rule"] = "margin >= -error";
  o.exit_code = failed == 0 ? kPass : kFail;
  return o;
}

// --- transport-check ----------------------------------------------------------------

ScalarFunction scalar_from_text(const std::string& text, bool energy) {
  if (text == "zero") return zero_function();
  if (energy && text == "entropy") return entropy_energy();
  auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const double arg = colon == std::string::npos ? kNaN : parse_expr(text.substr(colon + 1))(1.0);
  if (energy && head == "power" && std::isfinite(arg)) return power_energy(arg);
  if (!energy && head == "quadratic" && std::isfinite(arg)) return quadratic_potential(arg);
  throw InvalidInput(energy ? "F must be entropy | power:<gamma> | zero"
                            : "potentials must be quadratic:<k> | zero");
}

double quadratic_coefficient(const std::string& text) {
  if (text == "zero") return 0.0;
  return parse_expr(text.substr(text.find(':') + 1))(1.0);
}

struct GaussianInput {
  bool closed = false;
  double m = 0.0, s = 1.0;
};

DensityGrid density_input(Inputs& in, const std::string& idx, int nodes, GaussianInput& g) {
  if (in.has("rho" + idx)) {
    std::ifstream is(in.text("rho" + idx));
    if (!is) throw InvalidInput("cannot read density CSV --rho" + idx);
    return DensityGrid::read_csv(is).normalized();
  }
  g.closed = true;
  g.m = in.number("m" + idx, 0.0);
  g.s = in.number("s" + idx, 1.0);
  return DensityGrid::gaussian(g.m, g.s, nodes);
}

Outcome transport_check(Inputs& in) {
  const std::string mode = in.text("mode", "w2");
  Outcome o;
  if (mode == "duality") {
    const int n = in.integer("n", 3);
    const double tol = in.number("tol", 1e-2);
    DualityGap d = sobolev_duality_gap(n);
    const double rel = std::abs(d.gap) / std::abs(d.inf_side);
    o.result = {{"sup_side", number(d.sup_side)}, {"inf_side", number(d.inf_side)}, {"gap", number(d.gap)},
                {"relative_gap", number(rel)},    {"sup_t", number(d.sup_t)},       {"inf_t", number(d.inf_t)},
                {"yamabe_residual", number(d.yamabe_residual)}};
    const bool pass = rel <= tol && d.yamabe_residual <= 1e-6;
    o.certificate = verdict(pass);
    o.tolerances = {{"relative_gap", tol}, {"yamabe_residual", 1e-6}};
    o.exit_code = pass ? kPass : kFail;
    return o;
  }
  const int nodes = in.integer("grid", 2001);
  GaussianInput g0, g1;
  DensityGrid rho0 = density_input(in, "0", nodes, g0);
  if (mode == "energy-entropy") {
    ScalarFunction F = scalar_from_text(in.text("F", "entropy"), true);
    const double sigma = in.number("s", 2.0);
    CheckOutcome c = check_energy_entropy(rho0, F, YoungPair::quadratic(sigma));
    o.result = outcome_json(c);
    o.certificate = verdict(c.pass);
    o.exit_code = c.pass ? kPass : kFail;
    return o;
  }
  DensityGrid rho1 = density_input(in, "1", nodes, g1);
  if (mode == "w2") {
    Estimate w = wasserstein_1d(rho0, rho1);
    const double tol = in.number("tol", 1e-4);
    o.result["w2"] = number(w.value);
    o.result["error"] = number(w.error);
    bool pass = true;
    if (g0.closed && g1.closed) {
      const double closed = std::hypot(g0.m - g1.m, g0.s - g1.s);
      o.result["closed_form"] = closed;
      o.result["deviation"] = number(std::abs(w.value - closed));
      pass = std::abs(w.value - closed) <= tol;
    }
    o.certificate = verdict(pass);
    o.tolerances["w2"] = tol;
    o.exit_code = pass ? kPass : kFail;
    return o;
  }
  EnergySpec spec;
  const std::string Vt = in.text("V", "quadratic:1");
  const std::string Wt = in.text("W", "zero");
  spec.F = scalar_from_text(in.text("F", "entropy"), true);
  spec.V = scalar_from_text(Vt, false);
  spec.W = scalar_from_text(Wt, false);
  spec.mu = quadratic_coefficient(Vt);
  spec.nu = quadratic_coefficient(Wt);
  CheckOutcome c;
  if (mode == "master") {
    const double lambda = in.number("lambda", spec.mu);
    const double sigma = in.number("s", 2.0);
    c = check_master_inequality(rho0, rho1, spec, YoungPair::quadratic(sigma), lambda);
  } else {
    c = check_hwbi(rho0, rho1, spec, hwbi_mode_from_string(mode));
  }
  o.result = outcome_json(c);
  o.certificate = verdict(c.pass);
  o.tolerances["pass_rule"] = "margin >= -error";
  o.exit_code = c.pass ? kPass : kFail;
  return o;
}

// --- moser --------------------------------------------------------------------------

constexpr const char* kLineConvention =
    "I_alpha = (alpha/2) int (1-x^2) g'^2 dx + int g dx - ln(1/2 int e^{2g} dx) on (-1,1); "
    "equal to J_alpha under x = cos(theta) with d(omega) = dx/2";

std::string trace_csv(const std::vector<MoserTraceRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,parameter,value,residual\n";
  for (const auto& r : rows) os << r.iteration << ',' << r.parameter << ',' << r.value << ',' << r.residual << '\n';
  return os.str();
}

Outcome moser(Inputs& in) {
  const std::string mode = in.text("mode", "onofri");
  Outcome o;
  if (mode == "onofri") {
    const double alpha = in.number("alpha");
    MoserOptions opt;
    opt.cells = in.integer("grid", opt.cells);
    const double tol = in.number("tol", 1e-4);
    MoserResult r = minimize_I_alpha(alpha, opt);
    o.result["alpha"] = alpha;
    o.result["inf_estimate"] = number(r.inf_estimate);
    o.result["status"] = r.status;
    o.result["trace_length"] = r.trace.size();
    o.result["last"] = r.trace.empty() ? Json(nullptr)
                                       : Json{{"iteration", r.trace.back().iteration},
                                              {"parameter", number(r.trace.back().parameter)},
                                              {"value", number(r.trace.back().value)}};
    o.result["convention"] = kLineConvention;
    const bool pass = alpha >= 0.5 ? (r.status == "converged" && std::abs(r.inf_estimate) <= tol)
                                   : r.status == "divergent";
    o.certificate = verdict(pass);
    o.tolerances["inf"] = tol;
    o.tolerances["blowup_target"] = opt.blowup_target;
    if (in.has("trace")) write_text(in.text("trace"), trace_csv(r.trace));
    o.exit_code = pass ? kPass : kFail;
    return o;
  }
  if (mode == "ghigi" || mode == "ghigi-convex") {
    const bool family = mode == "ghigi";
    const int nodes = in.integer("grid", family ? 401 : 41);
    const double tol = in.number("tol", 1e-2);
    GhigiSearch s = family ? minimize_ghigi_family(nodes) : minimize_ghigi_convex(nodes);
    const double target = std::log(4.0 / std::numbers::pi);
    o.result["value"] = number(s.value);
    if (family) {
      o.result["a"] = number(s.a);
      o.result["b"] = number(s.b);
    }
    o.result["target"] = target;
    o.result["excess"] = number(s.value - target);
    o.result["above_floor"] = s.value >= target - 1e-4;
    o.result["critical_value"] = 2.0 * std::log(2.0) - 1.0;
    o.result["note"] = "Phi is stationary at u0 = ((1+x)log(1+x) + (1-x)log(1-x))/2 with Phi(u0) = 2 log 2 - 1";
    const bool pass = s.value <= target + tol;
    o.certificate = verdict(pass);
    o.tolerances["target"] = tol;
    o.exit_code = pass ? kPass : kFail;
    return o;
  }
  if (mode == "sphere") {
    const double alpha = in.number("alpha", 1.0);
    const int seed = in.integer("seed", 1);
    const int count = in.integer("grid", 20);
    const double tol = in.number("tol", 1e-8);
    double worst = 0.0;
    Json rows = Json::array();
    for (int i = 0; i < count; ++i) {
      SphereFunction u = random_axisymmetric(std::uint64_t(seed) + std::uint64_t(i));
      const double J = J_alpha_sphere(u, alpha);
      const double I = I_alpha(u.line_profile(), u.line_derivative(), alpha);
      worst = std::max(worst, std::abs(J - I));
      rows.push_back({{"J", number(J)}, {"I", number(I)}});
    }
    o.result["profiles"] = count;
    o.result["max_difference"] = number(worst);
    o.result["values"] = rows;
    o.result["convention"] = kLineConvention;
    o.certificate = verdict(worst <= tol);
    o.tolerances["reduction"] = tol;
    o.exit_code = worst <= tol ? kPass : kFail;
    return o;
  }
  if (mode == "aubin") {
    const double alpha = in.number("alpha");
    MoserOptions opt;
    opt.cells = in.integer("grid", 200);
    const double tol = in.number("tol", 1e-2);
    AubinProbe p = aubin_threshold_probe(alpha, 6, opt);
    const bool claimed = alpha >= 2.0 / 3.0 - 1e-12;
    o.result["alpha"] = alpha;
    o.result["value"] = number(p.value);
    o.result["starts"] = p.starts;
    o.result["scope"] = "axisymmetric functions; only the x3 moment constraint is active";
    o.result["convention"] = kLineConvention;
    if (in.has("trace")) write_text(in.text("trace"), trace_csv(p.trace));
    if (claimed) {
      o.certificate = verdict(p.value >= -tol);
      o.exit_code = p.value >= -tol ? kPass : kFail;
    } else {
      o.certificate = {{"status", "reported"}};
    }
    o.tolerances["floor"] = tol;
    return o;
  }
  if (mode == "singular") {
    const int n = in.integer("n", 2);
    const double alpha = in.number("alpha", 0.0);
    const double bmax = singular_moser_threshold(n, alpha);
    const double beta = in.number("beta", 0.9 * bmax);
    std::vector<RadialTestFunction> profiles;
    if (in.has("profile")) {
      std::ifstream is(in.text("profile"));
      if (!is) throw InvalidInput("cannot read profile CSV");
      profiles.push_back(RadialTestFunction::read_csv(is, Smoothness::h1_0, "csv"));
    } else {
      const int K = in.integer("grid", 12);
      for (int k = 1; k <= K; ++k) profiles.push_back(moser_sequence_profile(n, k));
    }
    Json values = Json::array(), norms = Json::array();
    bool all = true;
    double top = 0.0;
    std::string notes;
    for (const auto& u : profiles) {
      SingularMoserOutcome s = singular_moser_check(n, alpha, beta, u);
      values.push_back(number(s.value));
      norms.push_back(number(s.gradient_norm));
      all = all && s.pass;
      top = std::max(top, s.value);
      if (!s.note.empty() && notes.find(s.note) == std::string::npos) notes += (notes.empty() ? "" : "; ") + s.note;
    }
    o.result["beta_max"] = number(bmax);
    o.result["beta"] = number(beta);
    o.result["values"] = values;
    o.result["gradient_norms"] = norms;
    o.result["max_value"] = number(top);
    o.result["note"] = notes;
    o.certificate = verdict(all);
    o.exit_code = all ? kPass : kFail;
    return o;
  }
  throw InvalidInput("unknown moser mode '" + mode + "' (onofri | ghigi | ghigi-convex | sphere | aubin | singular)");
}

// --- report -------------------------------------------------------------------------

Outcome report(Inputs& in) {
  const std::string path = in.text("in");
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot read report " + path);
  Json stored;
  try {
    stored = Json::parse(is);
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed report: ") + e.what());
  }
  if (!stored.contains("command") || !stored["command"].contains("verb"))
    throw InvalidInput("report has no command echo");
  Command c;
  c.verb = stored["command"]["verb"].get<std::string>();
  if (c.verb == "report" || c.verb == "sweep") throw InvalidInput("cannot replay a '" + c.verb + "' report");
  for (auto& [k, v] : stored["command"]["options"].items()) c.options[k] = v.get<std::string>();
  c.options.erase("trace");
  Report fresh = run(c);
  Report old;
  old.json = stored;
  Json a = old.json, b = fresh.json;
  std::vector<std::string> differing;
  for (auto& [k, v] : a.items())
    if (k != "runtime_ms" && (!b.contains(k) || b[k] != v)) differing.push_back(k);
  const bool same = differing.empty();
  Outcome o;
  o.result["source"] = path;
  o.result["verb"] = c.verb;
  o.result["identical"] = same;
  o.result["differing_keys"] = differing;
  o.result["replayed_exit_code"] = fresh.exit_code;
  o.certificate = verdict(same);
  o.exit_code = same ? kPass : kFail;
  return o;
}

}  // namespace

Json number_or_null(double v) { return number_or_null_impl(v); }

Handler handler_for(const std::string& verb) {
  if (verb == "certify-hi") return &certify_hi;
  if (verb == "certify-pair") return &certify_pair;
  if (verb == "beta") return &beta;
  if (verb == "rayleigh") return &rayleigh;
  if (verb == "verify") return &verify;
  if (verb == "transport-check") return &transport_check;
  if (verb == "moser") return &moser;
  if (verb == "report") return &report;
  return nullptr;
}

}  // namespace fineq::cli

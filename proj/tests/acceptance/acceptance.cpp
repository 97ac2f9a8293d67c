// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fineq/bessel_certify.hpp"
#include "fineq/best_constants.hpp"
#include "fineq/cli/command.hpp"
#include "fineq/error.hpp"
#include "fineq/moser.hpp"
#include "fineq/transport.hpp"
#include "fineq/verifier.hpp"
#include "fineq/weight_dsl.hpp"

using namespace fineq;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + ("FAILED " + what);
    }
  }
  void info(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Catalog {
  WeightExpr P;
  std::string name;
};

std::vector<Catalog> catalog() {
  return {{builtin("one"), "one"},
          {builtin("power", {{"a", 0.5}}), "power(a=0.5)"},
          {builtin("power", {{"a", 1.0}}), "power(a=1)"},
          {builtin("inv_sq_log", {{"rho", 1.0}}), "inv_sq_log(rho=1)"},
          {builtin("iterlog", {{"k", 1.0}, {"rho", 1.0}}), "iterlog(k=1,rho=1)"},
          {builtin("iterlog", {{"k", 2.0}, {"rho", 1.0}}), "iterlog(k=2,rho=1)"}};
}

Verdict first_bessel_zero() {
  Verdict v;
  WeightExpr one = builtin("one");
  PositivityCertificate below = is_hi_potential(one, 2.404);
  PositivityCertificate above = is_hi_potential(one, 2.405);
  v.require(below.positive(), "positive at R = 2.404");
  v.require(above.status == CertificateStatus::first_zero && above.zero, "first_zero at R = 2.405");
  if (above.zero) {
    v.require(std::abs(*above.zero - 2.4048) <= 1e-3, "zero near 2.4048");
    v.info("first_zero = " + fmt("%.10f", *above.zero));
  }
  return v;
}

Verdict beta_scaling() {
  Verdict v;
  WeightExpr one(Expr::constant(1.0));
  const double z2 = kBesselJ0FirstZero * kBesselJ0FirstZero;
  const double b1 = beta_constant(one, 3, 1.0).value;
  v.require(std::abs(b1 / z2 - 1) <= 1e-3, "beta(R=1) = z0^2");
  for (double R : {0.5, 2.0}) {
    const double bR = beta_constant(one, 3, R, BetaOptions{1e-10, 1e-8, false}).value;
    v.require(std::abs(bR * R * R / b1 - 1) <= 1e-4, "R^-2 scaling at R = " + fmt("%g", R));
  }
  v.info("beta(1) = " + fmt("%.8f", b1) + ", z0^2 = " + fmt("%.8f", z2));
  return v;
}

Verdict hardy_constant() {
  Verdict v;
  auto seq = rayleigh_sequence(QuadraticForm::hardy_quotient(3, 1.0), 256, 4);
  v.require(seq.front().value >= 0.25 && seq.front().value <= 0.27, "value in [0.25, 0.27] at N = 256");
  for (std::size_t i = 1; i < seq.size(); ++i) {
    v.require(seq[i].value < seq[i - 1].value && seq[i].value >= 0.25, "monotone decrease at N = " +
                                                                           std::to_string(seq[i].grid));
    v.require(seq[i].attainment_diagnostic >= 1.2 * seq[i - 1].attainment_diagnostic,
              "derivative norm growth at N = " + std::to_string(seq[i].grid));
  }
  std::string vals;
  for (const auto& s : seq) vals += fmt("%.5f ", s.value);
  v.info("values " + vals);
  return v;
}

Verdict hardy_rellich_constant() {
  Verdict v;
  ConstantResult r = rayleigh_minimize(QuadraticForm::hardy_rellich_quotient(5, 1.0), 2048);
  v.require(std::abs(r.value / (25.0 / 16.0) - 1) <= 0.02, "within 2% of 25/16");
  v.info("value " + fmt("%.6f", r.value));
  return v;
}

Verdict bessel_equivalence() {
  Verdict v;
  int cases = 0, agree = 0;
  for (const auto& c : catalog())
    for (int n : {3, 4, 5})
      for (double s : {0.5, 0.95, 1.3}) {
        const double R = s * c.P.r_max();
        const bool hi = is_hi_potential(c.P, R).positive();
        const bool pair = is_bessel_pair(hardy_pair(n, c.P, R)).positive();
        ++cases;
        if (hi == pair) ++agree;
        else v.require(false, c.name + " n=" + std::to_string(n) + " R=" + fmt("%g", R));
      }
  v.require(cases >= 36, "at least 36 cases");
  v.info(std::to_string(agree) + "/" + std::to_string(cases) + " agree");
  return v;
}

Verdict verifier_soundness() {
  Verdict v;
  int checks = 0, failures = 0;
  auto tally = [&](const CheckOutcome& c, const std::string& what) {
    ++checks;
    if (!c.pass) {
      ++failures;
      if (failures <= 3) v.require(false, what + fmt(" margin %.3g", c.margin));
    }
  };
  for (const auto& c : catalog())
    for (double s : {0.5, 0.95}) {
      const double R = s * c.P.r_max();
      if (!is_hi_potential(c.P, R).positive()) continue;
      auto family = profile_family(R);
      for (int n : {3, 5}) {
        PairSpec pair = hardy_pair(n, c.P, R);
        for (const auto& u : family) {
          tally(check_improved_hardy(c.P, u, n, R), "improved " + c.name + " " + u.label());
          tally(check_hardy_rellich_radial(pair.V, pair.W, u, n, R), "hardy-rellich " + c.name + " " + u.label());
        }
      }
    }
  WeightExpr harmonic(pow(Expr::r(), -1.0));
  WeightExpr boundary(Expr::constant(1.0) - pow(Expr::r(), 2.0));
  for (const auto& u : profile_family(1.0)) {
    tally(check_E_weight(harmonic, EWeightMode::interior, u, 3), "e-weight " + u.label());
    tally(check_E_weight(boundary, EWeightMode::boundary, u, 3), "e-weight-boundary " + u.label());
    for (int n : {3, 4}) tally(check_distance_hardy(n, u, n, 1.0), "distance " + u.label());
  }
  for (const auto& u : interval_family()) tally(check_distance_hardy_interval(u), "distance-interval " + u.label());
  v.require(checks >= 600, "at least 600 checks");
  v.require(failures == 0, "no failures");
  v.info(std::to_string(checks) + " checks, " + std::to_string(failures) + " failures");
  return v;
}

Verdict gaussian_transport() {
  Verdict v;
  const auto ref = DensityGrid::gaussian(0.0, 1.0);
  const EnergySpec spec = EnergySpec::gaussian(1.0);
  double w2err = 0, tal = 0, lsi = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double m = -2.0 + 4.0 * i / 9.0, s = 0.5 + 1.5 * j / 9.0;
      const auto rho = DensityGrid::gaussian(m, s);
      w2err = std::max(w2err, std::abs(wasserstein_1d(rho, ref).value - std::hypot(m, s - 1.0)));
      tal = std::min(tal, check_hwbi(rho, ref, spec, HwbiMode::talagrand).margin);
      lsi = std::min(lsi, check_hwbi(rho, ref, spec, HwbiMode::log_sobolev).margin);
    }
  v.require(w2err <= 1e-4, "W2 closed form");
  v.require(tal >= -1e-6, "Talagrand margins");
  v.require(lsi >= -1e-6, "log-Sobolev margins");
  double eq = 0;
  for (double m : {-2.0, -0.5, 0.5, 1.0, 2.0})
    eq = std::max(eq, std::abs(check_hwbi(DensityGrid::gaussian(m, 1.0), ref, spec, HwbiMode::log_sobolev).margin));
  v.require(eq <= 1e-3, "log-Sobolev equality for translations");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> M(-2.0, 2.0), S(0.5, 2.0);
  int hwbi = 0;
  for (int k = 0; k < 50; ++k) {
    const auto a = DensityGrid::gaussian(M(rng), S(rng)), b = DensityGrid::gaussian(M(rng), S(rng));
    hwbi += check_hwbi(a, b, spec, HwbiMode::hwbi).pass;
  }
  v.require(hwbi == 50, "HWBI on 50 random pairs");
  v.info(fmt("W2 err %.2e", w2err) + fmt(", min Talagrand %.2e", tal) + fmt(", min LSI %.2e", lsi) +
         fmt(", translation LSI %.2e", eq) + ", HWBI " + std::to_string(hwbi) + "/50");
  return v;
}

Verdict sobolev_duality() {
  Verdict v;
  for (int n : {3, 4}) {
    DualityGap d = sobolev_duality_gap(n);
    const double rel = std::abs(d.gap) / std::abs(d.inf_side);
    const double y = yamabe_residual(n);
    v.require(rel <= 1e-2, "gap n = " + std::to_string(n));
    v.require(y <= 1e-6, "Yamabe residual n = " + std::to_string(n));
    v.info("n=" + std::to_string(n) + fmt(" gap %.2e", rel) + fmt(" yamabe %.2e", y));
  }
  return v;
}

Verdict moser_onofri() {
  Verdict v;
  MoserResult one = minimize_I_alpha(1.0);
  v.require(one.status == "converged" && std::abs(one.inf_estimate) <= 1e-4, "|inf| <= 1e-4 at alpha = 1");
  MoserResult low = minimize_I_alpha(0.4);
  v.require(low.inf_estimate <= -1e3, "blow-up to -1e3 at alpha = 0.4");
  v.info(fmt("inf(1) %.2e", one.inf_estimate) + fmt(", blow-up(0.4) %.1f", low.inf_estimate));

  const double floor = std::log(4.0 / std::numbers::pi);
  GhigiSearch fam = minimize_ghigi_family();
  GhigiSearch cvx = minimize_ghigi_convex();
  const double best = std::min(fam.value, cvx.value);
  double lowest = best;
  for (const auto* s : {&fam, &cvx})
    for (const auto& row : s->trace) lowest = std::min(lowest, row.back());
  v.require(best <= floor + 1e-2, "Ghigi reaches log(4/pi) + 1e-2");
  v.require(lowest >= floor - 1e-4, "no convex sample below log(4/pi) - 1e-4");
  v.info(fmt("Ghigi min %.6f", best) + fmt(" vs log(4/pi) %.6f", floor) +
         fmt(", stationary value 2log2-1 = %.6f", 2 * std::log(2.0) - 1));

  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SphereFunction u = random_axisymmetric(seed);
    worst = std::max(worst, std::abs(J_alpha_sphere(u, 1.0) - I_alpha(u.line_profile(), u.line_derivative(), 1.0)));
  }
  v.require(worst <= 1e-8, "J/I reduction");
  v.info(fmt("J/I %.2e", worst));
  return v;
}

Verdict singular_moser() {
  Verdict v;
  v.require(singular_moser_threshold(2, 0.0) == 4 * std::numbers::pi, "4 pi at alpha = 0");
  v.require(singular_moser_threshold(2, 1.0) == 2 * std::numbers::pi, "2 pi at alpha = 1");
  for (double alpha : {0.0, 1.0}) {
    const double beta = 0.9 * singular_moser_threshold(2, alpha);
    std::vector<double> vals;
    for (int k = 1; k <= 12; ++k) {
      SingularMoserOutcome s = singular_moser_check(2, alpha, beta, moser_sequence_profile(2, k));
      v.require(s.pass && std::isfinite(s.value), "finite at k = " + std::to_string(k));
      vals.push_back(s.value);
    }
    const double bound = 2 * std::numbers::pi * 10 / (2 - alpha) + std::numbers::pi;
    const auto peak = std::max_element(vals.begin(), vals.end());
    v.require(*peak <= bound, "bounded at alpha = " + fmt("%g", alpha));
    v.require(std::is_sorted(peak, vals.end(), std::greater<>()), "monotone after the peak");
    v.info(fmt("alpha=%g:", alpha) + fmt(" peak %.3f", *peak) + fmt(" last %.3f", vals.back()));
  }
  return v;
}

struct CliCase {
  std::vector<std::string> args;
  int expected;
};

int invoke(const std::vector<std::string>& args, std::string& payload) {
  std::vector<const char*> argv{"fineq"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(int(argv.size()), argv.data(), out, err);
  payload.clear();
  if (!out.str().empty()) {
    cli::Json j = cli::Json::parse(out.str());
    j.erase("runtime_ms");
    payload = j.dump();
  }
  return code;
}

Verdict determinism() {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path() / "fineq_acceptance_cache";
  std::filesystem::remove_all(dir);
  const std::vector<CliCase> cases = {
      {{"certify-hi", "--potential", "1", "--R", "2.404"}, 0},
      {{"certify-hi", "--potential", "1", "--R", "2.405"}, 1},
      {{"beta", "--potential", "1", "--n", "3", "--R", "1"}, 0},
      {{"rayleigh", "--mode", "hardy", "--n", "3", "--grid", "256"}, 0},
      {{"rayleigh", "--mode", "hardy-rellich", "--n", "5", "--grid", "512"}, 0},
      {{"certify-pair", "--V", "1", "--W", "0.25*pow(r,-2) + 1", "--n", "3", "--R", "2.4"}, 0},
      {{"verify", "--check", "improved-hardy", "--potential", "1", "--n", "3", "--R", "1"}, 0},
      {{"transport-check", "--mode", "talagrand", "--m0", "1", "--s0", "0.7"}, 0},
      {{"transport-check", "--mode", "duality", "--n", "3"}, 0},
      {{"moser", "--mode", "onofri", "--alpha", "1"}, 0},
      {{"moser", "--mode", "onofri", "--alpha", "0.4"}, 0},
      {{"moser", "--mode", "singular", "--n", "2", "--alpha", "0"}, 0},
      {{"certify-hi", "--potential", "pow(r,-3)"}, 2},
      {{"certify-pair", "--V", "1", "--W", "-exp(r*r)", "--n", "3", "--R", "30"}, 3},
  };
  int ok = 0;
  for (const auto& c : cases) {
    std::string a, b, warm, hit;
    auto cached = c.args;
    cached.insert(cached.end(), {"--cache-dir", dir.string()});
    const int ca = invoke(c.args, a), cb = invoke(c.args, b), cw = invoke(cached, warm), ch = invoke(cached, hit);
    const std::string name = c.args[0] + " " + c.args[1] + " " + c.args[2];
    const bool same = a == b && a == warm && a == hit && !a.empty();
    const bool codes = ca == c.expected && cb == c.expected && cw == c.expected && ch == c.expected;
    v.require(same, "payload identity for " + name);
    v.require(codes, "exit code " + std::to_string(ca) + " != " + std::to_string(c.expected) + " for " + name);
    ok += same && codes;
  }
  std::string dummy;
  v.require(invoke({"certify-hi", "--potential", "1", "--nonsense", "1"}, dummy) == 2, "unknown flag exits 2");
  v.info(std::to_string(ok) + "/" + std::to_string(cases.size()) + " commands reproducible with conforming exit codes");
  std::filesystem::remove_all(dir);
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "first Bessel zero", 1, first_bessel_zero},
      {2, "beta bisection vs scaling", 10, beta_scaling},
      {3, "Hardy constant and non-attainment", 60, hardy_constant},
      {4, "Hardy-Rellich constant", 60, hardy_rellich_constant},
      {5, "HI vs Bessel pair equivalence", 30, bessel_equivalence},
      {6, "verifier soundness", 300, verifier_soundness},
      {7, "Gaussian transport suite", 60, gaussian_transport},
      {8, "Sobolev duality", 120, sobolev_duality},
      {9, "Moser-Onofri thresholds", 300, moser_onofri},
      {10, "singular Moser", 60, singular_moser},
      {11, "determinism and report contract", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(s < c.budget_s, fmt("runtime budget %.0f s", c.budget_s));
    failed += !v.pass;
    std::printf("criterion %2d %-36s %s  %7.2fs  %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL", s, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

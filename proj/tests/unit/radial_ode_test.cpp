#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fineq/error.hpp"
#include "fineq/radial_ode.hpp"

using namespace fineq;

TEST_SUITE("radial_ode") {
  TEST_CASE("constant potential traces J0") {
    auto c = RadialCoefficients::hardy(builtin("one"), 2.3);
    SolutionTrace t = integrate_singular_ode(c, 1e-11);
    const double ref = 1.0;
    const double scale = t.sample(ref).first / std::cyl_bessel_j(0.0, ref);
    for (double r : {0.05, 0.5, 1.5, 2.2}) {
      auto [y, dy] = t.sample(r);
      CHECK(y / scale == doctest::Approx(std::cyl_bessel_j(0.0, r)).epsilon(1e-8));
      CHECK(dy / scale == doctest::Approx(-std::cyl_bessel_j(1.0, r)).epsilon(1e-7));
    }
  }

  TEST_CASE("first zero of J0") {
    auto c = RadialCoefficients::hardy(builtin("one"), 3.0);
    auto z = first_zero(integrate_singular_ode(c, 1e-11, true));
    REQUIRE(z);
    CHECK(*z == doctest::Approx(kBesselJ0FirstZero).epsilon(1e-9));
  }

  TEST_CASE("scaling: P = c moves the zero to z0 / sqrt(c)") {
    for (double c : {0.25, 4.0, 9.0}) {
      auto co = RadialCoefficients::hardy(WeightExpr(Expr::constant(c)), 6.0 / std::sqrt(c));
      auto z = first_zero(integrate_singular_ode(co, 1e-11, true));
      REQUIRE(z);
      CHECK(*z == doctest::Approx(kBesselJ0FirstZero / std::sqrt(c)).epsilon(1e-8));
    }
  }

  TEST_CASE("three-dimensional Helmholtz: sin r / r vanishes at pi") {
    auto c = RadialCoefficients::euclidean(3, WeightExpr(Expr::constant(1.0)), 4.0);
    auto z = first_zero(integrate_singular_ode(c, 1e-11, true));
    REQUIRE(z);
    CHECK(*z == doctest::Approx(std::numbers::pi).epsilon(1e-9));
  }

  TEST_CASE("indicial data") {
    auto hs = frobenius_start(RadialCoefficients::hardy(builtin("one"), 1.0));
    CHECK(hs.kappa == doctest::Approx(1.0));
    CHECK(hs.B == doctest::Approx(0.0));
    CHECK_FALSE(hs.oscillatory);
    // y'' + y'/r + c/r^2 y with c > 0 has complex indicial roots
    auto osc = frobenius_start(RadialCoefficients::euclidean(3, parse_weight("1*pow(r,-2)"), 1.0));
    CHECK(osc.B == doctest::Approx(1.0));
    CHECK(osc.oscillatory);
  }

  TEST_CASE("certificate flips across z0") {
    auto below = certify_positive(RadialCoefficients::hardy(builtin("one"), 2.404), 1e-10);
    auto above = certify_positive(RadialCoefficients::hardy(builtin("one"), 2.405), 1e-10);
    CHECK(below.status == CertificateStatus::positive);
    CHECK(above.status == CertificateStatus::first_zero);
    REQUIRE(above.zero);
    CHECK(std::abs(*above.zero - 2.4048) < 1e-3);
    CHECK_FALSE(below.settings_hash.empty());
  }

  TEST_CASE("trace CSV has one row per node") {
    SolutionTrace t = integrate_singular_ode(RadialCoefficients::hardy(builtin("one"), 1.0), 1e-9);
    std::ostringstream os;
    t.write_csv(os);
    const std::string s = os.str();
    CHECK(std::count(s.begin(), s.end(), '\n') >= long(t.size()));
  }

  TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  }

  TEST_CASE("invalid coefficients are rejected") {
    CHECK_THROWS_AS(RadialCoefficients::hardy(builtin("one"), -1.0).validate(), InvalidInput);
  }
}

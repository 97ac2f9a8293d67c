#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fineq/best_constants.hpp"
#include "fineq/error.hpp"

using namespace fineq;

TEST_SUITE("best_constants") {
  TEST_CASE("beta for P = 1 is z0^2 / R^2") {
    for (double R : {0.5, 1.0, 2.0}) {
      ConstantResult b = beta_constant(builtin("one"), 3, R);
      const double z2 = kBesselJ0FirstZero * kBesselJ0FirstZero;
      CHECK(b.value * R * R == doctest::Approx(z2).epsilon(1e-7));
      CHECK(b.lower <= b.value);
      CHECK(b.upper >= b.value);
      CHECK(std::abs(b.cross_check - b.value) / b.value < 1e-2);
    }
  }

  TEST_CASE("beta for the power potential r^-1 on (0, 1)") {
    // c r^-1 has its first zero at (z0 / 2)^2 / c, so beta = (z0/2)^2
    ConstantResult b = beta_constant(builtin("power", {{"a", 1.0}}), 2, 1.0, BetaOptions{1e-10, 1e-8, false});
    CHECK(b.value == doctest::Approx(std::pow(kBesselJ0FirstZero / 2, 2)).epsilon(1e-7));
  }

  TEST_CASE("interior Hardy Rayleigh quotient decreases toward 1/4") {
    auto seq = rayleigh_sequence(QuadraticForm::hardy_quotient(3, 1.0), 128, 3);
    REQUIRE(seq.size() == 4);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      CHECK(seq[i].value > 0.25);
      CHECK(seq[i].value < 0.28);
      if (i) CHECK(seq[i].value < seq[i - 1].value);
      CHECK(seq[i].residual < 1e-8);
    }
  }

  TEST_CASE("Hardy-Rellich quotient in R^5 approaches 25/16") {
    ConstantResult r = rayleigh_minimize(QuadraticForm::hardy_rellich_quotient(5, 1.0), 512);
    CHECK(std::abs(r.value - 25.0 / 16) / (25.0 / 16) < 0.03);
  }

  TEST_CASE("improved Hardy quotient with P = 1 recovers z0^2") {
    ConstantResult r = rayleigh_minimize(QuadraticForm::improved_hardy_quotient(builtin("one"), 3, 1.0), 400);
    CHECK(r.value == doctest::Approx(kBesselJ0FirstZero * kBesselJ0FirstZero).epsilon(1e-3));
  }

  TEST_CASE("closed-form constants") {
    CHECK(closed_constant(ClosedConstant::interior, 3) == doctest::Approx(0.25));
    CHECK(closed_constant(ClosedConstant::interior, 5) == doctest::Approx(2.25));
    CHECK(closed_constant(ClosedConstant::hardy_rellich, 5) == doctest::Approx(25.0 / 16));
    CHECK(closed_constant(ClosedConstant::hardy_rellich, 8) == doctest::Approx(64.0));
    CHECK(closed_constant(ClosedConstant::codimension, 5, ClosedExtras{NAN, 0.0, 4}) == doctest::Approx(1.0));
    CHECK(closed_constant_from_string("codim") == ClosedConstant::codimension);
    CHECK_THROWS_AS(closed_constant_from_string("whatever"), InvalidInput);
  }

  TEST_CASE("Sobolev quotient minimum is the sharp Sobolev constant") {
    // S_n = n(n-2)/4 |S^n|^{2/n}; |S^3| = 2 pi^2
    const double S3 = 0.75 * std::pow(2 * std::numbers::pi * std::numbers::pi, 2.0 / 3.0);
    HardySobolevResult r = hardy_sobolev_value(3, 0.0);
    CHECK(r.value == doctest::Approx(S3).epsilon(1e-6));
  }

  TEST_CASE("Rayleigh input validation") {
    CHECK_THROWS_AS(rayleigh_minimize(QuadraticForm::hardy_quotient(3, 1.0), 16), InvalidInput);
  }
}

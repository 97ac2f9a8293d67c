#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fineq/bessel_certify.hpp"
#include "fineq/error.hpp"

using namespace fineq;

TEST_SUITE("bessel_certify") {
  TEST_CASE("catalog potentials are HI-potentials on their domains") {
    CHECK(is_hi_potential(builtin("one"), kBesselJ0FirstZero).positive());
    CHECK(is_hi_potential(builtin("power", {{"a", 1.0}}), std::pow(kBesselJ0FirstZero / 2, 2)).positive());
    CHECK(is_hi_potential(builtin("inv_sq_log", {{"rho", 1.0}}), 1 / std::numbers::e).positive());
    CHECK(is_hi_potential(builtin("iterlog", {{"k", 2.0}, {"rho", 1.0}}), 1 / exp_tower(2)).positive());
  }

  TEST_CASE("power potential zero: J0(2 sqrt(r)) vanishes at (z0/2)^2") {
    const double R = 1.5 * std::pow(kBesselJ0FirstZero / 2, 2);
    auto c = is_hi_potential(builtin("power", {{"a", 1.0}}), R);
    CHECK(c.status == CertificateStatus::first_zero);
    REQUIRE(c.zero);
    CHECK(*c.zero == doctest::Approx(std::pow(kBesselJ0FirstZero / 2, 2)).epsilon(1e-8));
  }

  TEST_CASE("HI-potential and Hardy pair agree") {
    for (const auto& P : {builtin("one"), builtin("power", {{"a", 0.5}}), builtin("inv_sq_log", {{"rho", 1.0}})})
      for (int n : {3, 4, 5})
        for (double f : {0.5, 0.95, 1.3}) {
          const double R = f * P.r_max();
          CHECK(is_hi_potential(P, R).positive() == is_bessel_pair(hardy_pair(n, P, R)).positive());
        }
  }

  TEST_CASE("Hardy weight r^-2 (n-2)^2/4 is a borderline Bessel pair") {
    for (int n : {3, 4, 5}) {
      const double c = (n - 2) * (n - 2) / 4.0;
      PairSpec s{WeightExpr(Expr::constant(1.0)), WeightExpr(Expr::constant(c) * pow(Expr::r(), -2.0)), n, 1.0, {}};
      CHECK(is_bessel_pair(s).positive());
      PairSpec worse{WeightExpr(Expr::constant(1.0)), WeightExpr(Expr::constant(c + 0.1) * pow(Expr::r(), -2.0)), n,
                     1.0, {}};
      CHECK_FALSE(is_bessel_pair(worse).positive());
    }
  }

  TEST_CASE("(1, c) in R^3 is a pair exactly while sqrt(c) R < pi") {
    PairSpec in{WeightExpr(Expr::constant(1.0)), WeightExpr(Expr::constant(1.0)), 3, 3.1, {}};
    PairSpec out{WeightExpr(Expr::constant(1.0)), WeightExpr(Expr::constant(1.0)), 3, 3.2, {}};
    CHECK(is_bessel_pair(in).positive());
    CHECK_FALSE(is_bessel_pair(out).positive());
  }

  TEST_CASE("shifted pairs validate lambda") {
    PairSpec s = shifted_pair(1.0, 5, builtin("one"), 1.0);
    CHECK_NOTHROW(s.validate());
    CHECK(is_bessel_pair(s).positive());
    s.lambda = 4.0;
    CHECK_THROWS_AS(s.validate(), InvalidInput);
  }

  TEST_CASE("Rellich lifting condition") {
    // V = 1, W = n^2/4 r^-2: W - 2V/r^2 = (n^2/4 - 2)/r^2 >= 0 for n >= 3
    PairSpec ok{WeightExpr(Expr::constant(1.0)), WeightExpr(Expr::constant(25.0 / 4) * pow(Expr::r(), -2.0)), 5, 1.0,
                {}};
    CHECK(rellich_condition_check(ok).holds);
    PairSpec bad{WeightExpr(Expr::constant(1.0)), WeightExpr(Expr::constant(1.0)), 5, 1.0, {}};
    auto g = rellich_condition_check(bad);
    CHECK_FALSE(g.holds);
    CHECK(g.violation_radius.has_value());
  }

  TEST_CASE("improvement premise for monomials") {
    auto p = improvement_premise_check(builtin("power", {{"a", 1.0}}), -1.0);
    CHECK(p.holds);
    CHECK(p.nonnegative);
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fineq/bessel_certify.hpp"
#include "fineq/error.hpp"
#include "fineq/verifier.hpp"

using namespace fineq;

namespace {

RadialTestFunction bump(double R) {
  // (1 - (r/R)^2)^2
  return RadialTestFunction::symbolic(parse_expr("pow(1 - pow(r/" + std::to_string(R) + ",2),2)"), R, Smoothness::h2,
                                      "bump");
}

}  // namespace

TEST_SUITE("verifier") {
  TEST_CASE("ball integral against a closed form") {
    // int_{B_1 in R^3} (1 - r^2) = 4 pi (1/3 - 1/5)
    auto u = RadialTestFunction::symbolic(parse_expr("1 - pow(r,2)"), 1.0, Smoothness::h1_0);
    Integral I = ball_integral(u, 3, [&](double r) { return u(r); });
    CHECK(I.value == doctest::Approx(8 * std::numbers::pi / 15).epsilon(1e-12));
  }

  TEST_CASE("profile family shape") {
    auto fam = profile_family(1.0);
    REQUIRE(fam.size() == 50);
    for (const auto& u : fam) {
      CHECK(std::abs(u.boundary_value()) < 1e-10);
      CHECK(std::abs(u.boundary_slope()) < 1e-8);
      CHECK(std::abs(u.d1(1e-9)) < 1e-3);
    }
    auto again = profile_family(1.0);
    CHECK(again[40](0.3) == fam[40](0.3));
    auto other = profile_family(1.0, 7);
    CHECK(other[40](0.3) != fam[40](0.3));
  }

  TEST_CASE("spline interpolates its nodes") {
    std::vector<double> v = {1.0, 0.8, 0.3, 0.1, 0.0};
    auto s = RadialTestFunction::spline(v, 2.0, 0.0, 0.0, Smoothness::h2);
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(s(0.5 * j) == doctest::Approx(v[j]).epsilon(1e-12));
    CHECK(s.scaled(3.0)(0.5) == doctest::Approx(2.4));
  }

  TEST_CASE("improved Hardy holds over the family for certified potentials") {
    for (int n : {3, 4}) {
      for (const auto& [P, R] : {std::pair{builtin("one"), 1.0}, std::pair{builtin("inv_sq_log", {{"rho", 1.0}}), 0.3}}) {
        REQUIRE(is_hi_potential(P, R).positive());
        for (const auto& u : profile_family(R)) {
          CheckOutcome c = check_improved_hardy(P, u, n, R);
          CHECK(c.pass);
        }
      }
    }
  }

  TEST_CASE("improved Hardy detects an over-large potential") {
    // z0^2 is sharp for P = 1 on B_1; J0-like profiles see 4 z0^2 as a violation
    WeightExpr P(Expr::constant(4 * kBesselJ0FirstZero * kBesselJ0FirstZero));
    int violations = 0;
    for (const auto& u : profile_family(1.0)) violations += !check_improved_hardy(P, u, 3, 1.0).pass;
    CHECK(violations > 0);
  }

  TEST_CASE("radial Hardy-Rellich on a Bessel pair") {
    WeightExpr V(Expr::constant(1.0));
    WeightExpr W(Expr::constant(2.25) * pow(Expr::r(), -2.0));
    for (const auto& u : profile_family(1.0)) CHECK(check_hardy_rellich_radial(V, W, u, 5, 1.0).pass);
  }

  TEST_CASE("boundary terms give a finite theta") {
    WeightExpr V(Expr::constant(1.0));
    WeightExpr W(Expr::constant(20.0));
    auto u = RadialTestFunction::symbolic(parse_expr("1 - pow(r,2)/2"), 1.0, Smoothness::h1);
    CheckOutcome c = check_boundary_terms(V, W, u, 3, 1.0, BoundaryForm::first_order);
    REQUIRE(c.theta);
    CHECK(*c.theta >= 0.0);
    // at theta the inequality is tight
    CHECK(std::abs(c.margin) <= 1e-8 * std::max(1.0, std::abs(c.lhs)));
  }

  TEST_CASE("E-weight inequality for harmonic and boundary weights") {
    WeightExpr Einterior(pow(Expr::r(), -1.0));
    WeightExpr Eboundary(Expr::constant(1.0) - pow(Expr::r(), 2.0));
    for (const auto& u : profile_family(1.0)) {
      CHECK(check_E_weight(Einterior, EWeightMode::interior, u, 3).pass);
      CHECK(check_E_weight(Eboundary, EWeightMode::boundary, u, 3).pass);
    }
    CHECK_THROWS_AS(check_E_weight(Eboundary, EWeightMode::interior, bump(1.0), 3), InvalidInput);
  }

  TEST_CASE("distance inequalities") {
    for (const auto& u : profile_family(1.0)) {
      CHECK(check_distance_hardy(3, u, 3, 1.0).pass);
    }
    for (const auto& u : interval_family()) CHECK(check_distance_hardy_interval(u).pass);
    CHECK_THROWS_AS(check_distance_hardy(2, bump(1.0), 2, 1.0), InvalidInput);
  }

  TEST_CASE("H2 checks demand an H2 profile") {
    auto u = RadialTestFunction::symbolic(parse_expr("1 - r"), 1.0, Smoothness::h1_0);
    CHECK_THROWS_AS(check_hardy_rellich_radial(WeightExpr(Expr::constant(1.0)), WeightExpr(), u, 5, 1.0),
                    InvalidInput);
  }

  TEST_CASE("CSV round trip") {
    auto u = bump(1.0);
    std::stringstream ss;
    u.write_csv(ss, 401);
    auto v = RadialTestFunction::read_csv(ss, Smoothness::h2);
    for (double r : {0.1, 0.45, 0.9}) CHECK(v(r) == doctest::Approx(u(r)).epsilon(1e-6));
  }
}

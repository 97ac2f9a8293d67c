#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fineq/error.hpp"
#include "fineq/weight_dsl.hpp"

using namespace fineq;

TEST_SUITE("weight_dsl") {
  TEST_CASE("evaluation matches direct arithmetic") {
    const double r = 0.3;
    CHECK(parse_expr("pow(r,-2)*log(1/r)")(r) == doctest::Approx(std::log(1 / r) / (r * r)).epsilon(1e-15));
    CHECK(parse_expr("2*r + 3/4 - pow(r,2)")(r) == doctest::Approx(2 * r + 0.75 - r * r));
    CHECK(parse_expr("exp(-r)*pi")(r) == doctest::Approx(std::exp(-r) * std::numbers::pi));
    CHECK(parse_expr("e")(r) == doctest::Approx(std::numbers::e));
  }

  TEST_CASE("printing round-trips") {
    for (const char* text : {"pow(r,-1.5)", "1/(4*pow(r,2)*pow(log(1/r),2))", "exp(r) - 2*r", "-(r+1)/(r-3)"}) {
      Expr e = parse_expr(text);
      Expr back = parse_expr(e.str());
      for (double r : {0.1, 0.5, 0.9}) CHECK(back(r) == doctest::Approx(e(r)).epsilon(1e-14));
    }
  }

  TEST_CASE("symbolic derivative agrees with central differences") {
    for (const char* text : {"pow(r,-1.5)", "pow(log(1/r),-2)/pow(r,2)", "exp(-pow(r,2))*r", "pow(r,3) - 2/r", "log(log(10/r))"}) {
      Expr e = parse_expr(text);
      Expr d = derivative(e);
      for (double r : {0.2, 0.4, 0.7}) {
        const double h = 1e-5 * r;
        const double fd = (e(r + h) - e(r - h)) / (2 * h);
        CHECK(d(r) == doctest::Approx(fd).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("syntax errors carry a position") {
    CHECK_THROWS_AS(parse_expr("1 + * r"), SyntaxError);
    try {
      parse_expr("r + (2");
      FAIL("no throw");
    } catch (const SyntaxError& e) {
      CHECK(e.position() >= 5);
    }
    CHECK_THROWS_AS(parse_expr("foo(r)"), SyntaxError);
  }

  TEST_CASE("singular order of monomials and log-damped terms") {
    CHECK(parse_weight("pow(r,-1.5)").singular_order().order == doctest::Approx(1.5));
    CHECK(parse_weight("1").singular_order().order == doctest::Approx(0.0));
    const auto& s = builtin("inv_sq_log", {{"rho", 1.0}}).singular_order();
    CHECK(s.order == doctest::Approx(2.0));
    CHECK(s.log_power == doctest::Approx(-2.0));
  }

  TEST_CASE("potential role screens order and sign") {
    CHECK_THROWS_AS(parse_weight("pow(r,-3)", WeightRole::potential, 1.0), InvalidInput);
    CHECK_THROWS_AS(parse_weight("pow(r,-2)", WeightRole::potential, 1.0), InvalidInput);
    CHECK_THROWS_AS(parse_weight("r - 0.5", WeightRole::potential, 1.0), InvalidInput);
    CHECK_NOTHROW(parse_weight("pow(r,-1.9)", WeightRole::potential, 1.0));
    CHECK_NOTHROW(parse_weight("1/(4*pow(r,2)*pow(log(1/r),2))", WeightRole::potential, 0.3));
  }

  TEST_CASE("catalog domains") {
    CHECK(builtin("one").r_max() == kBesselJ0FirstZero);
    // y'' + y'/r + y/r = 0 is solved by J0(2 sqrt r)
    CHECK(builtin("power", {{"a", 1.0}}).r_max() ==
          doctest::Approx(std::pow(kBesselJ0FirstZero / 2, 2)).epsilon(1e-14));
    CHECK(builtin("inv_sq_log", {{"rho", 2.0}}).r_max() == doctest::Approx(2.0 / std::numbers::e));
    CHECK(exp_tower(1) == doctest::Approx(std::numbers::e));
    CHECK(exp_tower(2) == doctest::Approx(std::exp(std::numbers::e)));
    CHECK_THROWS_AS(builtin("iterlog", {{"k", 4.0}, {"rho", 1.0}}), InvalidInput);
    CHECK_THROWS_AS(builtin("nope"), InvalidInput);
  }

  TEST_CASE("iterated-log potential sums the levels") {
    const double r = 0.01, rho = 1.0;
    const double L1 = std::log(rho / r), L2 = std::log(L1);
    const double expected = (1 / (L1 * L1) + 1 / (L1 * L1 * L2 * L2)) / (4 * r * r);
    CHECK(builtin("iterlog", {{"k", 2.0}, {"rho", rho}})(r) == doctest::Approx(expected).epsilon(1e-14));
  }

  TEST_CASE("shifted pair weights") {
    const int n = 5;
    const double lambda = 1.0, r = 0.4;
    PairWeights p = pair_shift(lambda, n, builtin("one"));
    CHECK(p.V(r) == doctest::Approx(std::pow(r, -lambda)));
    const double c = (n - lambda - 2) / 2;
    CHECK(p.W(r) == doctest::Approx(c * c * std::pow(r, -lambda - 2) + std::pow(r, -lambda)));
    CHECK_THROWS_AS(pair_shift(4.0, 5, builtin("one")), InvalidInput);
  }

  TEST_CASE("differentiate keeps the domain") {
    WeightExpr w = builtin("inv_sq_log", {{"rho", 1.0}});
    WeightExpr d = differentiate(w, 1);
    CHECK(d.r_max() == w.r_max());
    const double r = 0.1, h = 1e-6;
    CHECK(d(r) == doctest::Approx((w(r + h) - w(r - h)) / (2 * h)).epsilon(1e-6));
  }
}

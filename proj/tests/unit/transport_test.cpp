#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fineq/error.hpp"
#include "fineq/transport.hpp"

using namespace fineq;

TEST_SUITE("transport") {
  TEST_CASE("Gaussian mass, barycenter and CDF") {
    auto g = DensityGrid::gaussian(0.7, 1.3);
    CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.barycenter() == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(g.cdf(0.7) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(g.cdf(0.7 + 1.3) == doctest::Approx(0.5 * std::erfc(-1 / std::sqrt(2.0))).epsilon(1e-9));
    for (double t : {0.01, 0.3, 0.77}) CHECK(g.cdf(g.quantile(t)) == doctest::Approx(t).epsilon(1e-10));
  }

  TEST_CASE("W2 between Gaussians") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.5, 2.0), M(-2.0, 2.0);
    for (int i = 0; i < 10; ++i) {
      const double m0 = M(rng), m1 = M(rng), s0 = U(rng), s1 = U(rng);
      Estimate w = wasserstein_1d(DensityGrid::gaussian(m0, s0), DensityGrid::gaussian(m1, s1));
      CHECK(w.value == doctest::Approx(std::hypot(m0 - m1, s0 - s1)).epsilon(1e-6));
    }
  }

  TEST_CASE("monotone map between Gaussians is affine") {
    auto a = DensityGrid::gaussian(0.0, 1.0), b = DensityGrid::gaussian(1.0, 2.0);
    auto T = quantile_map(a, b);
    for (double x : {-2.0, 0.0, 1.5}) CHECK(T(x) == doctest::Approx(1.0 + 2.0 * x).epsilon(1e-7));
    CHECK(push_forward_check(T, a, b).max_residual < 1e-6);
  }

  TEST_CASE("Legendre transform of x^2/2") {
    GridFunction f;
    for (int i = 0; i <= 400; ++i) {
      f.x.push_back(-4 + 0.02 * i);
      f.v.push_back(0.5 * f.x.back() * f.x.back());
    }
    GridFunction g = legendre(f, {-1.0, 0.0, 2.5});
    CHECK(g.v[0] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(g.v[1] == doctest::Approx(0.0));
    CHECK(g.v[2] == doctest::Approx(3.125).epsilon(1e-3));
  }

  TEST_CASE("Gaussian entropy and Fisher information") {
    const double s = 0.8;
    auto g = DensityGrid::gaussian(0.3, s);
    EnergySpec spec;
    FreeEnergy H = free_energy(g, spec);
    CHECK(H.internal == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi * std::numbers::e * s * s)).epsilon(1e-8));
    // c* = |y|^2 for sigma = 2: Fisher information 1/s^2
    EntropyProduction I = entropy_production(g, spec, YoungPair::quadratic(2.0));
    CHECK_FALSE(I.divergent);
    CHECK(I.value == doctest::Approx(1 / (s * s)).epsilon(1e-6));
  }

  TEST_CASE("log-Sobolev is an equality for translates") {
    for (double m : {0.5, 1.0, 2.0}) {
      CheckOutcome c = check_hwbi(DensityGrid::gaussian(m, 1.0), DensityGrid::gaussian(0, 1.0), EnergySpec::gaussian(),
                                  HwbiMode::log_sobolev);
      CHECK(c.pass);
      CHECK(std::abs(c.margin) < 1e-3);
    }
  }

  TEST_CASE("Talagrand and HWBI on Gaussians") {
    for (double s : {0.5, 1.0, 1.7})
      for (double m : {-1.0, 0.0, 1.5}) {
        auto r0 = DensityGrid::gaussian(m, s), r1 = DensityGrid::gaussian(0.0, 1.0);
        CHECK(check_hwbi(r0, r1, EnergySpec::gaussian(), HwbiMode::talagrand).margin >= -1e-6);
        CHECK(check_hwbi(r0, r1, EnergySpec::gaussian(), HwbiMode::hwbi).pass);
        CHECK(check_hwbi(r0, r1, EnergySpec::gaussian(), HwbiMode::hwi).pass);
      }
  }

  TEST_CASE("energy-entropy equality at variance sigma") {
    for (double sigma : {0.5, 2.0}) {
      CheckOutcome eq = check_energy_entropy(DensityGrid::gaussian(0.0, std::sqrt(sigma)), entropy_energy(),
                                             YoungPair::quadratic(sigma));
      CHECK(eq.pass);
      CHECK(std::abs(eq.margin) < 1e-6);
      CheckOutcome off = check_energy_entropy(DensityGrid::gaussian(0.0, 2.0 * std::sqrt(sigma)), entropy_energy(),
                                              YoungPair::quadratic(sigma));
      CHECK(off.pass);
      CHECK(off.margin > 1e-3);
    }
  }

  TEST_CASE("compactly supported uniform density has divergent Fisher information") {
    auto u = DensityGrid::from_function([](double x) { return std::abs(x) < 1 ? 0.5 : 0.0; }, -2, 2, 801);
    EntropyProduction I = entropy_production(u, EnergySpec{}, YoungPair::quadratic(2.0));
    CHECK(I.divergent);
    CHECK(check_energy_entropy(u, entropy_energy(), YoungPair::quadratic(2.0)).pass);
  }

  TEST_CASE("master inequality on Gaussian pairs") {
    for (double m : {0.0, 1.0})
      for (double s : {0.7, 1.4}) {
        CheckOutcome c = check_master_inequality(DensityGrid::gaussian(m, s), DensityGrid::gaussian(-0.5, 1.0),
                                                 EnergySpec::gaussian(1.0), YoungPair::quadratic(2.0), 1.0);
        CHECK(c.pass);
      }
  }

  TEST_CASE("Young pairs satisfy Young's inequality") {
    std::vector<double> grid;
    for (int i = -50; i <= 50; ++i) grid.push_back(0.1 * i);
    CHECK(YoungPair::quadratic(0.7).young_violation(grid) <= 1e-12);
    CHECK(YoungPair::power(3.0).young_violation(grid) <= 1e-12);
  }

  TEST_CASE("Sobolev duality closes for n = 3") {
    DualityGap d = sobolev_duality_gap(3);
    CHECK(std::abs(d.gap) / d.inf_side < 1e-2);
    CHECK(yamabe_residual(3) < 1e-6);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(DensityGrid(0, 1, std::vector<double>(5, 1.0)), InvalidInput);
    CHECK_THROWS_AS(DensityGrid(0, 1, std::vector<double>(20, -1.0)), InvalidInput);
    CHECK_THROWS_AS(hwbi_mode_from_string("hw"), InvalidInput);
    CHECK_THROWS_AS(wasserstein_1d(DensityGrid(0, 1, std::vector<double>(20, 3.0)), DensityGrid::gaussian(0, 1)),
                    InvalidInput);
  }
}

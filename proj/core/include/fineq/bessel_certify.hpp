#pragma once

#include <cstddef>
#include <limits>
#include <optional>

#include "fineq/radial_ode.hpp"
#include "fineq/weight_dsl.hpp"

namespace fineq {

inline constexpr double kDefaultOdeTolerance = 1e-10;

struct PairSpec {
  WeightExpr V;
  WeightExpr W;
  int n = 3;
  double R = 1.0;
  std::optional<double> lambda;

  // V > 0 on (0, R) and 0 <= lambda <= n-2 when present.
  void validate() const;
  RadialCoefficients coefficients() const;
};

// y'' + y'/r + P y = 0 on (0, R). A zero resolved only at R itself counts as positive
// on the open interval and is recorded in the note.
PositivityCertificate is_hi_potential(const WeightExpr& P, double R, double tol = kDefaultOdeTolerance);
PositivityCertificate is_bessel_pair(const PairSpec& spec, double tol = kDefaultOdeTolerance);

// R defaults to the domain of P.
PairSpec shifted_pair(double lambda, int n, const WeightExpr& P,
                      double R = std::numeric_limits<double>::quiet_NaN());
PairSpec hardy_pair(int n, const WeightExpr& P, double R);

struct GridCheck {
  bool holds = true;
  std::optional<double> violation_radius;
  double worst_value = 0.0;  // most negative sampled value (0 if none)
  std::size_t grid_points = 0;
  double r0 = 0.0;
  double R = 0.0;
};

// W - 2V/r^2 + 2V_r/r - V_rr >= 0, the pointwise condition that lifts the radial
// Hardy-Rellich inequality to all of H^2.
GridCheck rellich_condition_check(const PairSpec& spec);

struct PremiseCheck {
  bool holds = false;
  bool nonnegative = false;
  double r_f_at_probe = 0.0;  // r f(r) at r = 1e-6
  std::optional<double> violation_radius;
};

// P_r/P = lambda/r + f(r) with f >= 0 and r f(r) -> 0.
PremiseCheck improvement_premise_check(const WeightExpr& P, double lambda);

}  // namespace fineq

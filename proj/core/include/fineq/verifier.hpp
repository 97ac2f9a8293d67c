#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fineq/quadrature.hpp"
#include "fineq/radial_ode.hpp"
#include "fineq/weight_dsl.hpp"

namespace fineq {

enum class Smoothness { h1_0, h1, h2 };
const char* to_string(Smoothness s);

// Radial profile u(r) on [0, R] with its first two derivatives.
class RadialTestFunction {
 public:
  using Fn = std::function<double(double)>;

  RadialTestFunction(Fn u, Fn du, Fn d2u, double R, Smoothness tag, std::string label = {},
                     std::vector<double> knots = {});

  static RadialTestFunction symbolic(const Expr& u, double R, Smoothness tag, std::string label = {});
  // C^2 cubic spline through values at r_j = j R / (size-1), clamped slopes at both ends.
  static RadialTestFunction spline(const std::vector<double>& values, double R, double slope_left,
                                   double slope_right, Smoothness tag, std::string label = {});
  // The ODE solution carried by the trace, truncated at `cut` (zero beyond).
  static RadialTestFunction ode_profile(const SolutionTrace& trace, double cut, std::string label = {});
  static RadialTestFunction zero(double R);
  // Uniformly spaced (r, u) rows starting at r = 0; spline with natural slope estimates.
  static RadialTestFunction read_csv(std::istream& is, Smoothness tag, std::string label = {});

  double operator()(double r) const { return u_(r); }
  double d1(double r) const { return du_(r); }
  double d2(double r) const { return d2u_(r); }
  double laplacian(double r, int n) const { return d2u_(r) + (n - 1) * du_(r) / r; }

  double support() const { return R_; }
  Smoothness tag() const { return tag_; }
  const std::string& label() const { return label_; }
  const std::vector<double>& knots() const { return knots_; }
  double boundary_value() const { return u_(R_); }
  double boundary_slope() const { return du_(R_); }

  RadialTestFunction scaled(double c) const;
  void write_csv(std::ostream& os, int points = 200) const;

 private:
  Fn u_, du_, d2u_;
  double R_;
  Smoothness tag_;
  std::string label_;
  std::vector<double> knots_;
};

// 10 polynomial bumps, 5 near-extremal profiles, 10 Bessel-type profiles and 25
// random clamped splines, all with u(R) = u'(R) = u'(0) = 0.
std::vector<RadialTestFunction> profile_family(double R, std::uint64_t seed = 20240601);
// x u(x) for each member of profile_family(1); vanishes at both ends of (0, 1).
std::vector<RadialTestFunction> interval_family(std::uint64_t seed = 20240601);

// Integrals over the ball B_R in R^n (sphere area included).
struct WeightedIntegrals {
  Integral gradient;   // int V |u'|^2
  Integral mass;       // int V u^2
  Integral laplacian;  // int V |Delta u|^2
};

WeightedIntegrals weighted_integrals(const RadialTestFunction& u, const WeightExpr& V, int n);
// int w(r) g(u, r) over B_R with measure |S^{n-1}| r^{n-1} dr.
Integral ball_integral(const RadialTestFunction& u, int n, const std::function<double(double)>& integrand);

// lhs is the side claimed to be the larger one; pass iff margin >= -error.
struct CheckOutcome {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double error = 0.0;
  bool pass = false;
  std::optional<double> theta;
  std::string note;
};

CheckOutcome make_outcome(double lhs, double rhs, double error);

// int |grad u|^2 - (n-2)^2/4 int u^2/r^2 >= int P u^2.
CheckOutcome check_improved_hardy(const WeightExpr& P, const RadialTestFunction& u, int n, double R);

// int V |Delta u|^2 >= int W |u'|^2 + (n-1) int (V/r^2 - V_r/r) |u'|^2.
CheckOutcome check_hardy_rellich_radial(const WeightExpr& V, const WeightExpr& W, const RadialTestFunction& u,
                                        int n, double R);

enum class BoundaryForm { first_order, second_order };

// Smallest theta >= 0 for which the boundary-term inequality holds on u.
//   first_order:  int V|u'|^2 >= int W u^2 - theta int_{dB} u^2
//   second_order: int V|Delta u|^2 >= int W|u'|^2 + (n-1) int (V/r^2 - V_r/r)|u'|^2
//                                     + ((n-1) - theta) V(R) int_{dB} |u'|^2
CheckOutcome check_boundary_terms(const WeightExpr& V, const WeightExpr& W, const RadialTestFunction& u, int n,
                                  double R, BoundaryForm form);

enum class EWeightMode { interior, boundary };

// int |grad u|^2 >= 1/4 int |E'|^2/E^2 u^2 (+ 1/2 int u^2/E (-Delta E) dx in boundary mode).
CheckOutcome check_E_weight(const WeightExpr& E, EWeightMode mode, const RadialTestFunction& u, int n);

// Distance to M = {0} in R^n, co-dimension k = n: int |grad u|^2 >= (k-2)^2/4 int u^2/r^2.
CheckOutcome check_distance_hardy(int k, const RadialTestFunction& u, int n, double R);
// On (0, 1) with d(x) = min(x, 1-x): int u'^2 >= 1/4 int u^2/d^2. u is read as a function of x.
CheckOutcome check_distance_hardy_interval(const RadialTestFunction& u);

}  // namespace fineq

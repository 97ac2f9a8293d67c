#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fineq/weight_dsl.hpp"

namespace fineq {

enum class ConstantMethod { oscillation_bisection, rayleigh_eig, closed_form, profile_search };
const char* to_string(ConstantMethod m);

struct ConstantResult {
  double value = 0.0;
  ConstantMethod method = ConstantMethod::closed_form;
  double lower = 0.0;  // bisection bracket
  double upper = 0.0;
  double residual = 0.0;  // relative eigen-residual
  double attainment_diagnostic = 0.0;
  int grid = 0;
  double log_span = 0.0;
  int iterations = 0;
  double cross_check = std::numeric_limits<double>::quiet_NaN();
  std::string note;
  std::vector<std::pair<double, double>> profile;  // (r, u) of the discrete minimizer
};

struct BetaOptions {
  double ode_tol = 1e-10;
  double rel_width = 1e-8;
  bool cross_check = true;
  int rayleigh_grid = 800;
  double rayleigh_span = 40.0;
};

// sup{c : y'' + y'/r + c P y = 0 has a positive solution on (0, R)}.
ConstantResult beta_constant(const WeightExpr& P, int n, double R, const BetaOptions& opt = {});

// Radial quotient
//   order 1: (int V|u'|^2 + Q u^2 + hardy u^2/r^2) / int D u^2,  u(R) = 0
//   order 2: int V (Delta u)^2 / int D u^2,                      u = u' = 0 at both ends
// over the measure r^{n-1} dr, discretised on the log window [R e^{-L}, R].
struct QuadraticForm {
  int order = 1;
  int n = 3;
  double R = 1.0;
  WeightExpr V = WeightExpr(Expr::constant(1.0));
  WeightExpr Q = WeightExpr();
  double hardy = 0.0;
  WeightExpr D = WeightExpr(pow(Expr::r(), -2.0));
  double log_span = 0.0;  // 0 selects L = 2 sqrt(N)

  static QuadraticForm hardy_quotient(int n, double R);
  static QuadraticForm hardy_rellich_quotient(int n, double R);
  // Improved Hardy quotient (int |u'|^2 - (n-2)^2/4 u^2/r^2) / int P u^2.
  static QuadraticForm improved_hardy_quotient(const WeightExpr& P, int n, double R);
};

// C^1 Hermite cubic elements in t = log r after the ground-state substitution
// u = r^{-g} v, g = (n-2)/2 (order 1) or (n-4)/2 (order 2). N elements.
ConstantResult rayleigh_minimize(const QuadraticForm& form, int N);
std::vector<ConstantResult> rayleigh_sequence(const QuadraticForm& form, int N0, int doublings);

enum class ClosedConstant {
  interior,
  half_space,
  hardy_rellich,
  rellich_improvement,
  boundary_distance,
  codimension,
  hardy_sobolev_exponent
};

struct ClosedExtras {
  double beta = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;
  int k = 0;
  double s = std::numeric_limits<double>::quiet_NaN();
};

double closed_constant(ClosedConstant kind, int n, const ClosedExtras& extras = {});
ClosedConstant closed_constant_from_string(const std::string& name);

struct HardySobolevOptions {
  double t_lo = 0.55;
  double t_hi = 4.0;
  int scan_points = 24;
  double t_tol = 1e-7;
};

struct HardySobolevResult {
  double value = 0.0;
  double best_t = 0.0;
  std::vector<std::pair<double, double>> trace;  // (t, quotient)
};

// int |grad u|^2 / (int |u|^p |x|^{-s})^{2/p}, p = 2(n-s)/(n-2), on
// u = amplitude (1 + r^{(2-s)t})^{-(n-2)/(2-s)} over R^n.
double hardy_sobolev_quotient(int n, double s, double t, double amplitude = 1.0);
HardySobolevResult hardy_sobolev_value(int n, double s, const HardySobolevOptions& opt = {});

}  // namespace fineq

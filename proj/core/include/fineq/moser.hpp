#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fineq/verifier.hpp"

namespace fineq {

// Nodes x_j = -cos(j pi / M) on [-1, 1]; quadrature weights sum to 2.
class LineFunction {
 public:
  explicit LineFunction(int cells = 400);
  static LineFunction sample(const std::function<double(double)>& g, int cells = 400);

  int cells() const { return int(x_.size()) - 1; }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& weights() const { return w_; }
  std::vector<double>& values() { return g_; }
  const std::vector<double>& values() const { return g_; }

  // int (1 - x^2) g'^2 dx for g piecewise linear in theta.
  double dirichlet() const;
  double integral() const;
  // int e^{2g} x dx
  double constraint_residual() const;
  // Adds a x with int e^{2(g + a x)} x dx = 0 (Newton on the shift a).
  double project();
  void write_csv(std::ostream& os) const;

 private:
  friend class MoserDescent;
  std::vector<double> x_, w_, stiff_;
  std::vector<double> g_;
};

// (alpha/2) int (1-x^2) g'^2 + int g - ln(1/2 int e^{2g}), on the discrete grid.
double I_alpha(const LineFunction& g, double alpha);
// The same functional by adaptive quadrature of a smooth g on (-1, 1).
double I_alpha(const std::function<double(double)>& g, const std::function<double(double)>& dg, double alpha);

// Symmetric blow-up family g_L = ln(1-a^2) - ln(1-a^2 x^2), a = 1 - e^{-L}; closed form.
double blowup_value(double alpha, double L);

struct MoserTraceRow {
  int iteration = 0;
  double parameter = 0.0;  // step length, or L for the blow-up family
  double value = 0.0;
  double residual = 0.0;
};

struct MoserResult {
  double inf_estimate = 0.0;
  std::string status;  // converged | divergent | inconclusive
  std::vector<MoserTraceRow> trace;
  LineFunction minimizer;
};

struct MoserOptions {
  int cells = 400;
  int max_iterations = 4000;
  double tol = 1e-13;
  double blowup_target = -1000.0;
  double blowup_max_L = 16384.0;
};

// Projected H^1-preconditioned descent for alpha >= 1/2; blow-up family for alpha < 1/2.
MoserResult minimize_I_alpha(double alpha, const MoserOptions& opt = {});
MoserResult descend_I_alpha(LineFunction g, double alpha, const MoserOptions& opt = {});

// Bounded convex function on a uniform grid over [-1, 1], piecewise linear.
class ConvexFunction {
 public:
  explicit ConvexFunction(std::vector<double> values);
  static ConvexFunction sample(const std::function<double(double)>& u, int nodes = 201);

  const std::vector<double>& values() const { return u_; }
  double x(std::size_t i) const { return -1.0 + 2.0 * double(i) / double(u_.size() - 1); }
  std::size_t size() const { return u_.size(); }
  // u*(y) = max_j (x_j y - u_j).
  double legendre(double y) const;

 private:
  std::vector<double> u_;
};

// int_{-1}^{1} u - log(1/2 int_R e^{-2 u*}), exact for piecewise linear u.
double ghigi_phi(const ConvexFunction& u);

struct GhigiSearch {
  double value = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<std::vector<double>> trace;  // (a, b, value)
};

// Minimize over u = a x^2 + b |x| + c with a, b >= 0 (c does not change Phi).
GhigiSearch minimize_ghigi_family(int nodes = 401);
// Minimize over all convex piecewise linear u on `nodes` points.
GhigiSearch minimize_ghigi_convex(int nodes = 41, int iterations = 4000);

// Axisymmetric u(theta) on S^2 with the normalized measure d(omega) = sin(theta) d(theta) / 2.
struct SphereFunction {
  std::function<double(double)> u;
  std::function<double(double)> du;  // d/d(theta)
  double measure_total() const;      // int d(omega)
  // g(x) = u(arccos x) and its derivative.
  std::function<double(double)> line_profile() const;
  std::function<double(double)> line_derivative() const;
};

// alpha int |grad u|^2 + 2 int u - ln int e^{2u}, all against d(omega).
double J_alpha_sphere(const SphereFunction& u, double alpha);
// e^{2u} = (1 - a^2) / (1 - a cos(theta))^2
SphereFunction stereographic_profile(double a);
// sum_k c_k cos(k theta), k = 1..m, seeded coefficients.
SphereFunction random_axisymmetric(std::uint64_t seed, int modes = 4, double scale = 0.5);

struct AubinProbe {
  double value = 0.0;
  int starts = 0;
  std::vector<MoserTraceRow> trace;  // best value after each start
};

// Minimum of J_alpha over axisymmetric functions in the moment-constrained manifold.
AubinProbe aubin_threshold_probe(double alpha, int starts = 6, const MoserOptions& opt = {});

// (1 - alpha/n) n omega_{n-1}^{1/(n-1)}
double singular_moser_threshold(int n, double alpha);
// Moser's truncated logarithm on the unit ball, int |grad u|^n = 1.
RadialTestFunction moser_sequence_profile(int n, int k);

struct SingularMoserOutcome {
  double value = 0.0;  // int exp(beta |u|^{n/(n-1)}) |x|^{-alpha}
  double error = 0.0;
  double beta_max = 0.0;
  double gradient_norm = 0.0;  // int |grad u|^n before renormalisation
  bool pass = false;           // finite value
  std::string note;
};

SingularMoserOutcome singular_moser_check(int n, double alpha, double beta, const RadialTestFunction& u);

}  // namespace fineq

#pragma once

#include <cmath>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fineq/quadrature.hpp"
#include "fineq/verifier.hpp"

namespace fineq {

enum class Geometry { line, radial };

// Density on a uniform grid. Radial densities live on [0, R] in R^n and carry the
// Jacobian |S^{n-1}| r^{n-1}; all integrals below include it.
class DensityGrid {
 public:
  DensityGrid(double lo, double hi, std::vector<double> rho, Geometry geometry = Geometry::line, int n = 1);

  static DensityGrid from_function(const std::function<double(double)>& rho, double lo, double hi, int nodes,
                                   Geometry geometry = Geometry::line, int n = 1);
  static DensityGrid gaussian(double m, double s, int nodes = 2001, double width = 12.0);
  static DensityGrid read_csv(std::istream& is, Geometry geometry = Geometry::line, int n = 1);
  void write_csv(std::ostream& os) const;

  std::size_t size() const { return rho_.size(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double spacing() const { return h_; }
  double x(std::size_t i) const { return lo_ + h_ * double(i); }
  const std::vector<double>& values() const { return rho_; }
  Geometry geometry() const { return geometry_; }
  int dimension() const { return n_; }
  double jacobian(double x) const;

  double mass() const { return cumulative_.back(); }
  DensityGrid normalized() const;
  double barycenter() const;
  // Every other node; the last node is dropped when the interval count is odd.
  DensityGrid coarsened() const;

  // int g(x_i) J(x_i) dx from node values: trapezoid plus the Euler-Maclaurin end correction.
  double integrate(const std::vector<double>& g) const;
  double integrate(const std::function<double(double x, double rho)>& g) const;
  // Cumulative mass at x and its inverse; exact inverses of each other on the nodes.
  double cdf(double x) const;
  double quantile(double t) const;
  // d/dx of node values (fourth-order differences).
  std::vector<double> gradient(const std::vector<double>& g) const;

 private:
  void build();
  double cell_cdf(std::size_t i, double s) const;

  double lo_, hi_, h_;
  std::vector<double> rho_;
  Geometry geometry_;
  int n_;
  std::vector<double> m_;       // rho * J
  std::vector<double> dm_;      // d(m)/dx
  std::vector<double> cumulative_;
};

using Estimate = Integral;

struct GridFunction {
  std::vector<double> x;
  std::vector<double> v;
};

// f*(y) = sup_x (x y - f(x)) over the grid, by a slope scan along the lower convex hull.
GridFunction legendre(const GridFunction& f, const std::vector<double>& y);
std::vector<double> dual_grid(const GridFunction& f, std::size_t points = 0);

Estimate wasserstein_1d(const DensityGrid& rho0, const DensityGrid& rho1);
// T = Q1 o C0, the monotone map pushing rho0 to rho1.
std::function<double(double)> quantile_map(const DensityGrid& rho0, const DensityGrid& rho1);

struct PushForwardResidual {
  double max_residual = 0.0;
  std::vector<double> residuals;  // one per test function
  std::vector<std::string> labels;
};

// |int h rho1 - int h(s(x)) rho0| for a fixed family of ten test functions h.
PushForwardResidual push_forward_check(const std::function<double(double)>& s, const DensityGrid& rho0,
                                       const DensityGrid& rho1);

struct ScalarFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  std::string label;
  std::string kind;  // entropy | power | quadratic | zero | custom
  double operator()(double x) const { return f(x); }
};

ScalarFunction entropy_energy();  // x log x, 0 log 0 = 0
ScalarFunction power_energy(double gamma);
ScalarFunction quadratic_potential(double k, double center = 0.0);  // k (x-c)^2 / 2
ScalarFunction zero_function();

struct EnergySpec {
  ScalarFunction F = entropy_energy();
  ScalarFunction V = zero_function();
  ScalarFunction W = zero_function();
  double mu = 0.0;  // D^2 V >= mu
  double nu = 0.0;  // D^2 W >= nu

  double pressure(double x) const { return x * F.df(x) - F.f(x); }
  // W even and P_F consistent with F' on samples.
  void validate() const;
  static EnergySpec gaussian(double k = 1.0);
};

struct YoungPair {
  ScalarFunction c;
  ScalarFunction cstar;
  double sigma = std::numeric_limits<double>::quiet_NaN();  // quadratic family only

  static YoungPair quadratic(double sigma);  // c = |x|^2/(2 sigma), c* = sigma |y|^2/2
  static YoungPair power(double p);          // c = |x|^p/p, c* = |y|^q/q
  bool is_quadratic() const { return !std::isnan(sigma); }
  // max over the grid of x y - c(x) - c*(y) (<= 0 when Young's inequality holds).
  double young_violation(const std::vector<double>& grid) const;
};

struct FreeEnergy {
  double internal = 0.0;
  double potential = 0.0;
  double interaction = 0.0;
  double total = 0.0;
  double error = 0.0;
};

FreeEnergy free_energy(const DensityGrid& rho, const EnergySpec& spec);

struct EntropyProduction {
  double value = 0.0;
  double error = 0.0;
  std::size_t masked = 0;  // nodes with vanishing density
  bool divergent = false;  // the density jumps to zero, so the production is +inf
};

// int rho c*(-grad(F'(rho) + V + W * rho)).
EntropyProduction entropy_production(const DensityGrid& rho, const EnergySpec& spec, const YoungPair& young);

CheckOutcome check_master_inequality(const DensityGrid& rho0, const DensityGrid& rho1, const EnergySpec& spec,
                                     const YoungPair& young, double lambda);

// int [F(rho) + n P_F(rho)] <= int rho c*(-grad F'(rho)) + K_c. K_c defaults to the
// entropy / quadratic value -(n/2) log(2 pi sigma).
CheckOutcome check_energy_entropy(const DensityGrid& rho, const ScalarFunction& F, const YoungPair& young,
                                  std::optional<double> K_c = std::nullopt);
double gaussian_log_sobolev_constant(int n, double sigma);

struct DualityGap {
  double sup_side = 0.0;
  double inf_side = 0.0;
  double gap = 0.0;
  double sup_t = 0.0;
  double inf_t = 0.0;
  double yamabe_residual = 0.0;
};

// (n(n-2)/(n-1)) int rho^{(n-1)/n} - int |x|^2 rho on rho_t ~ t^n (1+|tx|^2)^{-n}, int rho = 1.
double sobolev_sup_value(int n, double t);
// int |grad f|^2 on f_t ~ (1+|tx|^2)^{-(n-2)/2}, normalized so int |f|^{2*} = 1.
double sobolev_inf_value(int n, double t, double amplitude = 1.0);
// max |Delta f + f^{2*-1}| / max f^{2*-1} over r in (0, 20] for the Aubin-Talenti profile.
double yamabe_residual(int n);
DualityGap sobolev_duality_gap(int n, double t_lo = 0.2, double t_hi = 5.0);

enum class HwbiMode { hwbi, hwi, talagrand, log_sobolev };
HwbiMode hwbi_mode_from_string(const std::string& s);

CheckOutcome check_hwbi(const DensityGrid& rho0, const DensityGrid& rho1, const EnergySpec& spec, HwbiMode mode);

}  // namespace fineq

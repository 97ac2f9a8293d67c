#pragma once

#include <functional>
#include <vector>

#include "fineq/error.hpp"

namespace fineq {

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

using Integrand = std::function<double(double)>;

class DivergentIntegral : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Adaptive Gauss-Kronrod on [a, b].
Integral integrate(const Integrand& f, double a, double b, double rel_tol = 1e-11, double abs_tol = 0.0);

// Integral of g over (0, support]. Panels run between breakpoints in t = log r; the
// neighbourhood of the origin is probed for divergence and its remainder added.
Integral integrate_from_origin(const Integrand& g, double support, std::vector<double> breakpoints = {},
                               double rel_tol = 1e-11);

// Integral of g over (0, inf) with power-law tails extrapolated beyond
// [exp(tau_lo), exp(tau_hi)].
Integral integrate_half_line(const Integrand& g, double tau_lo = -40.0, double tau_hi = 40.0,
                             double rel_tol = 1e-11);

// |S^{n-1}|
double sphere_area(int n);

}  // namespace fineq

#include "fineq/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace fineq {

namespace {

struct Workspace {
  gsl_integration_workspace* w;
  Workspace() : w(gsl_integration_workspace_alloc(2000)) {}
  ~Workspace() { gsl_integration_workspace_free(w); }
};

double trampoline(double x, void* p) { return (*static_cast<const Integrand*>(p))(x); }

struct ErrorHandlerOff {
  ErrorHandlerOff() { gsl_set_error_handler_off(); }
};

}  // namespace

Integral integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol) {
  static ErrorHandlerOff once;
  (void)once;
  if (a == b) return {};
  thread_local Workspace ws;
  gsl_function F{&trampoline, const_cast<Integrand*>(&f)};
  Integral out;
  gsl_integration_qag(&F, a, b, abs_tol, rel_tol, 2000, GSL_INTEG_GAUSS21, ws.w, &out.value, &out.error);
  if (!std::isfinite(out.value)) throw NumericalFailure("integrand not finite on the quadrature panel");
  out.error += 64.0 * std::numeric_limits<double>::epsilon() * std::abs(out.value);
  return out;
}

Integral integrate_from_origin(const Integrand& g, double support, std::vector<double> breakpoints,
                               double rel_tol) {
  if (!(support > 0.0)) return {};
  Integrand gt = [&g](double t) {
    double r = std::exp(t);
    return g(r) * r;
  };
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> ts;
  const double t_lo = std::log(support) - 60.0;
  ts.push_back(t_lo);
  for (double b : breakpoints)
    if (b > std::exp(t_lo) && b < support) ts.push_back(std::log(b));
  ts.push_back(std::log(support));

  Integral total;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    Integral piece = integrate(gt, ts[i], ts[i + 1], rel_tol);
    total.value += piece.value;
    total.error += piece.error;
  }
  Integral near = integrate(gt, t_lo - 60.0, t_lo, 1e-8);
  Integral nearer = integrate(gt, t_lo - 120.0, t_lo - 60.0, 1e-8);
  if (std::abs(near.value) > 1e-10 * std::abs(total.value) && std::abs(nearer.value) >= 0.5 * std::abs(near.value))
    throw DivergentIntegral("divergent integral: the integrand is not integrable at the origin");
  total.value += near.value;
  total.error += std::abs(near.value) + near.error;
  return total;
}

Integral integrate_half_line(const Integrand& g, double tau_lo, double tau_hi, double rel_tol) {
  Integrand gt = [&g](double t) {
    double r = std::exp(t);
    return g(r) * r;
  };
  Integral total;
  const double width = 10.0;
  for (double a = tau_lo; a < tau_hi; a += width) {
    Integral piece = integrate(gt, a, std::min(a + width, tau_hi), rel_tol);
    total.value += piece.value;
    total.error += piece.error;
  }
  // Tails: gt ~ exp(k t) with the local exponent k estimated by differencing.
  auto tail = [&](double t, double dir) {
    double f0 = gt(t), f1 = gt(t - dir * 0.5);
    if (f0 == 0.0) return Integral{};
    if (f1 == 0.0 || (f0 > 0) != (f1 > 0)) throw NumericalFailure("tail integrand changes sign");
    double k = std::log(std::abs(f0 / f1)) / 0.5;  // growth rate toward the tail
    if (!(k < 0.0)) throw DivergentIntegral("divergent integral: tail does not decay");
    double v = f0 / -k;
    return Integral{v, 0.1 * std::abs(v)};
  };
  Integral lo = tail(tau_lo, -1.0), hi = tail(tau_hi, 1.0);
  total.value += lo.value + hi.value;
  total.error += lo.error + hi.error;
  return total;
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

}  // namespace fineq

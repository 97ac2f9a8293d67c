#include "fineq/bessel_certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fineq/error.hpp"

namespace fineq {

namespace {

PositivityCertificate open_interval(PositivityCertificate c) {
  if (c.status == CertificateStatus::inconclusive && c.endpoint_zero) {
    c.status = CertificateStatus::positive;
    c.note = "zero resolved at R within tolerance; positive on the open interval (0, R)";
  }
  return c;
}

double log_grid(double r0, double R, std::size_t i, std::size_t m) {
  return r0 * std::pow(R / r0, double(i) / double(m));
}

}  // namespace

void PairSpec::validate() const {
  if (n < 1) throw InvalidInput("dimension must be >= 1");
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("radius must be positive and finite");
  if (lambda && !(*lambda >= 0.0 && *lambda <= n - 2.0))
    throw InvalidInput("lambda must satisfy 0 <= lambda <= n-2");
  const std::size_t m = 1000;
  for (std::size_t i = 0; i < m; ++i) {
    double r = log_grid(1e-8 * R, R, i, m);
    double v = V(r);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "V must be positive on (0, R); V(" << r << ") = " << v;
      throw InvalidInput(msg.str());
    }
  }
}

RadialCoefficients PairSpec::coefficients() const {
  const Expr r = Expr::r();
  Expr dv = derivative(V.expr());
  Expr a = n == 1 ? Expr::constant(0.0) : Expr::constant(n - 1.0) / r;
  if (!dv.is_constant(0.0)) a = n == 1 ? dv / V.expr() : a + dv / V.expr();
  Expr b = V.expr().is_constant(1.0) ? W.expr() : W.expr() / V.expr();
  double inf = std::numeric_limits<double>::infinity();
  return RadialCoefficients{WeightExpr(a, inf), WeightExpr(b, W.r_max()), n, R};
}

PositivityCertificate is_hi_potential(const WeightExpr& P, double R, double tol) {
  require_potential(P, R);
  return open_interval(certify_positive(RadialCoefficients::hardy(P, R), tol));
}

PositivityCertificate is_bessel_pair(const PairSpec& spec, double tol) {
  spec.validate();
  return open_interval(certify_positive(spec.coefficients(), tol));
}

PairSpec shifted_pair(double lambda, int n, const WeightExpr& P, double R) {
  PairWeights w = pair_shift(lambda, n, P);
  double radius = std::isnan(R) ? P.r_max() : R;
  return PairSpec{w.V, w.W, n, radius, lambda};
}

PairSpec hardy_pair(int n, const WeightExpr& P, double R) {
  PairWeights w = pair_shift(0.0, n, P);
  return PairSpec{w.V, w.W, n, R, std::nullopt};
}

GridCheck rellich_condition_check(const PairSpec& spec) {
  if (!(spec.R > 0.0) || !std::isfinite(spec.R)) throw InvalidInput("radius must be positive and finite");
  const Expr dv = derivative(spec.V.expr());
  const Expr ddv = derivative(dv);
  GridCheck out;
  out.grid_points = 10000;
  out.R = spec.R;
  out.r0 = 1e-8 * spec.R;
  for (std::size_t i = 0; i < out.grid_points; ++i) {
    double r = log_grid(out.r0, spec.R, i, out.grid_points);
    double w = spec.W(r), v2 = 2.0 * spec.V(r) / (r * r), d1 = 2.0 * dv(r) / r, d2 = ddv(r);
    double value = w - v2 + d1 - d2;
    double scale = std::max(1.0, std::abs(w) + std::abs(v2) + std::abs(d1) + std::abs(d2));
    if (!std::isfinite(value)) throw NumericalFailure("condition not finite on the grid");
    if (value < -1e-12 * scale) {
      if (out.holds) out.violation_radius = r;
      out.holds = false;
      out.worst_value = std::min(out.worst_value, value);
    }
  }
  return out;
}

PremiseCheck improvement_premise_check(const WeightExpr& P, double lambda) {
  const Expr dp = derivative(P.expr());
  double top = std::isfinite(P.r_max()) && P.r_max() > 0 ? P.r_max() : 1.0;
  auto f = [&](double r) { return dp(r) / P(r) - lambda / r; };
  PremiseCheck out;
  out.nonnegative = true;
  const std::size_t m = 10000;
  for (std::size_t i = 0; i < m; ++i) {
    double r = log_grid(1e-8 * top, top, i, m);
    double p = P(r);
    if (!(p > 0.0)) throw InvalidInput("P must be positive near the origin");
    double value = f(r);
    double scale = std::max(1.0, std::abs(dp(r) / p) + std::abs(lambda / r));
    if (value < -1e-12 * scale) {
      out.nonnegative = false;
      out.violation_radius = r;
      break;
    }
  }
  double probe = 1e-6 * std::min(1.0, top);
  out.r_f_at_probe = probe * f(probe);
  out.holds = out.nonnegative && std::abs(out.r_f_at_probe) < 1e-3;
  return out;
}

}  // namespace fineq

#include "fineq/radial_ode.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>

#include "fineq/error.hpp"

namespace fineq {

namespace {

// Start where the regular parts of r a and r^2 b are this small.
constexpr double kStartBalance = 1e-6;

using State = std::array<double, 2>;  // (y, w = r y') in t = log r

struct Rhs {
  const RadialCoefficients* c;
  State operator()(double t, const State& u) const {
    double r = std::exp(t);
    double ra = r * c->a(r);
    double r2b = r * r * c->b(r);
    if (!std::isfinite(ra) || !std::isfinite(r2b)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "coefficient evaluation overflow at r = %.17g", r);
      throw NumericalFailure(buf);
    }
    return {u[1], (1.0 - ra) * u[1] - r2b * u[0]};
  }
};

struct StepResult {
  State u;
  State err;
};

// Dormand-Prince 5(4).
StepResult dp_step(const Rhs& f, double t, const State& u, double h) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    State s = u;
    for (auto [coef, k] : terms) {
      s[0] += h * coef * (*k)[0];
      s[1] += h * coef * (*k)[1];
    }
    return s;
  };
  State k1 = f(t, u);
  State k2 = f(t + c2 * h, comb({{a21, &k1}}));
  State k3 = f(t + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
  State k4 = f(t + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  State k5 = f(t + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  State k6 = f(t + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  State y5 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  State k7 = f(t + h, y5);
  StepResult out{y5, {}};
  for (int i = 0; i < 2; ++i) {
    out.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  return out;
}

std::string fmt(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

// Limit of r^p * f(r) at 0 for p = 1 (drift) or 2 (potential); throws when it diverges.
double scaled_limit(const WeightExpr& f, int p, double R, const char* what) {
  if (f.is_zero()) return 0.0;
  Expr scaled = p == 1 ? Expr::r() * f.expr() : pow(Expr::r(), 2.0) * f.expr();
  Asymptotic a = asymptotic(scaled);
  if (a.exact) {
    if (a.vanishes) return 0.0;
    double g0 = -a.power, g1 = a.log_power, g2 = a.loglog_power;
    int cmp = g0 != 0 ? (g0 > 0 ? 1 : -1) : g1 != 0 ? (g1 > 0 ? 1 : -1) : g2 != 0 ? (g2 > 0 ? 1 : -1) : 0;
    if (cmp < 0) return 0.0;
    if (cmp == 0) return a.coeff;
    throw InvalidInput(std::string(what) + " is more singular than r^-" + std::to_string(p) +
                       " at the origin");
  }
  double r1 = 1e-12 * R, r2 = 1e-10 * R;
  double v1 = std::pow(r1, p) * f(r1), v2 = std::pow(r2, p) * f(r2);
  if (!std::isfinite(v1) || std::abs(v1) > 1e6 * (1.0 + std::abs(v2)))
    throw InvalidInput(std::string(what) + " is more singular than r^-" + std::to_string(p) +
                       " at the origin");
  return v1;
}

}  // namespace

RadialCoefficients RadialCoefficients::hardy(const WeightExpr& P, double R) {
  return euclidean(2, P, R);
}

RadialCoefficients RadialCoefficients::euclidean(int n, const WeightExpr& b, double R) {
  Expr a = n == 1 ? Expr::constant(0.0) : Expr::constant(n - 1.0) / Expr::r();
  return RadialCoefficients{WeightExpr(a, std::numeric_limits<double>::infinity()), b, n, R};
}

void RadialCoefficients::validate() const {
  if (dimension < 1) throw InvalidInput("dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("radius must be positive and finite");
  if (a.singular_order().order > 1.0 + 1e-9)
    throw InvalidInput("drift coefficient a must have singular order <= 1 at the origin");
}

FrobeniusStart frobenius_start(const RadialCoefficients& c) {
  c.validate();
  const double R = c.radius;
  FrobeniusStart s;
  s.kappa = scaled_limit(c.a, 1, R, "drift coefficient a");
  s.B = scaled_limit(c.b, 2, R, "potential coefficient b");
  double km1 = s.kappa - 1.0;
  double disc = km1 * km1 - 4.0 * s.B;
  double slack = 1e-12 * std::max({1.0, km1 * km1, 4.0 * std::abs(s.B)});
  if (disc < -slack) {
    s.oscillatory = true;
    s.exponent = -km1 / 2.0;
  } else {
    s.exponent = (-km1 + std::sqrt(std::max(disc, 0.0))) / 2.0;
  }

  const int scan = 200;
  s.r0 = 1e-8 * R;
  for (int j = 0; j <= scan; ++j) {
    double r = R * std::pow(10.0, -8.0 + 6.0 * j / scan);
    double breg = r * r * c.b(r) - s.B;
    double dreg = r * c.a(r) - s.kappa;
    if (!std::isfinite(breg) || !std::isfinite(dreg)) break;
    if (std::abs(breg) >= kStartBalance || std::abs(dreg) >= kStartBalance) break;
    s.r0 = r;
  }
  // r^2 b - B ~ beta r^m; m from two radii, m = 2 when the decay is too slow to resolve
  double breg0 = s.r0 * s.r0 * c.b(s.r0) - s.B;
  double half = 0.25 * s.r0 * s.r0 * c.b(0.5 * s.r0) - s.B;
  double m = 2.0;
  if (breg0 != 0.0 && half != 0.0 && (breg0 > 0) == (half > 0)) {
    double est = std::log2(breg0 / half);
    if (est >= 0.5 && est <= 4.0) m = est;
  }
  double denom = 2.0 * s.exponent + s.kappa + m - 1.0;
  s.w0 = s.exponent;
  if (!s.oscillatory && denom > 1e-12) s.w0 -= breg0 / denom;
  return s;
}

SolutionTrace integrate_singular_ode(const RadialCoefficients& coeffs, double tol, bool stop_at_sign_change) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) throw InvalidInput("tolerance must lie in [1e-12, 1e-4]");
  SolutionTrace tr;
  tr.coeffs_ = coeffs;
  tr.start_ = frobenius_start(coeffs);
  tr.tol_ = tol;
  Rhs f{&tr.coeffs_};

  const double R = coeffs.radius;
  double t = std::log(tr.start_.r0);
  const double t_end = std::log(R);
  State u{1.0, tr.start_.w0};
  auto push = [&](double tt, double r, const State& s, double e) {
    tr.t_.push_back(tt);
    tr.r_.push_back(r);
    tr.y_.push_back(s[0]);
    tr.w_.push_back(s[1]);
    tr.dy_.push_back(s[1] / r);
    tr.err_.push_back(e);
  };
  push(t, tr.start_.r0, u, 0.0);

  double h = std::min(1e-2, t_end - t);
  const std::size_t max_steps = 4'000'000;
  std::size_t steps = 0;
  while (t < t_end) {
    if (++steps > max_steps) throw NumericalFailure("step budget exhausted before reaching R");
    bool last = t + h >= t_end;
    double hh = last ? t_end - t : h;
    StepResult st = dp_step(f, t, u, hh);
    double norm = 0.0;
    for (int i = 0; i < 2; ++i) {
      double sc = tol * (1.0 + std::max(std::abs(u[i]), std::abs(st.u[i])));
      norm = std::max(norm, std::abs(st.err[i]) / sc);
    }
    if (!std::isfinite(norm) || !std::isfinite(st.u[0]) || !std::isfinite(st.u[1]))
      throw NumericalFailure("solution overflow");
    if (norm <= 1.0) {
      t = last ? t_end : t + hh;
      u = st.u;
      push(t, last ? R : std::exp(t), u, norm * tol);
      if (stop_at_sign_change && u[0] <= 0.0) {
        tr.truncated_ = t < t_end;
        break;
      }
    }
    double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    if (norm > 1.0) factor = std::min(factor, 0.9);
    h = hh * factor;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) throw NumericalFailure("step size underflow");
  }
  return tr;
}

std::pair<double, double> SolutionTrace::sample(double r) const {
  if (r_.empty() || r < r_.front() || r > r_.back()) throw InvalidInput("sample radius outside trace");
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  std::size_t i = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
  if (r == r_[i]) return {y_[i], dy_[i]};
  Rhs f{&coeffs_};
  StepResult st = dp_step(f, t_[i], State{y_[i], w_[i]}, std::log(r) - t_[i]);
  return {st.u[0], st.u[1] / r};
}

void SolutionTrace::write_csv(std::ostream& os) const {
  os << "r,y,dy\n";
  for (std::size_t i = 0; i < r_.size(); ++i) os << fmt(r_[i]) << ',' << fmt(y_[i]) << ',' << fmt(dy_[i]) << '\n';
}

std::optional<double> SolutionTrace::refine_zero(std::size_t i) const {
  Rhs f{&coeffs_};
  double lo = t_[i], hi = t_[i + 1];
  State base{y_[i], w_[i]};
  for (int k = 0; k < 200 && hi - lo > 1e-11; ++k) {
    double mid = 0.5 * (lo + hi);
    double y = dp_step(f, t_[i], base, mid - t_[i]).u[0];
    if (y > 0.0) lo = mid;
    else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

std::optional<double> first_zero(const SolutionTrace& trace) {
  const auto& y = trace.values();
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    if (y[i + 1] == 0.0) return trace.radii()[i + 1];
    if (y[i + 1] < 0.0) return trace.refine_zero(i);
  }
  return std::nullopt;
}

const char* to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::positive:
      return "positive";
    case CertificateStatus::first_zero:
      return "first_zero";
    case CertificateStatus::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PositivityCertificate certify_positive(const RadialCoefficients& coeffs, double tol) {
  PositivityCertificate cert;
  cert.tolerance = tol;
  cert.radius = coeffs.radius;
  FrobeniusStart start = frobenius_start(coeffs);
  cert.start_radius = start.r0;
  cert.origin_oscillatory = start.oscillatory;
  cert.settings_hash = fnv1a_hex("dopri54;t=log r;tol=" + fmt(tol) + ";r0=" + fmt(start.r0) +
                                 ";w0=" + fmt(start.w0) + ";R=" + fmt(coeffs.radius) +
                                 ";n=" + std::to_string(coeffs.dimension) + ";a=" + coeffs.a.text() +
                                 ";b=" + coeffs.b.text());
  SolutionTrace tr;
  try {
    tr = integrate_singular_ode(coeffs, tol, true);
  } catch (const NumericalFailure& e) {
    cert.status = CertificateStatus::inconclusive;
    cert.note = e.what();
    return cert;
  }
  cert.steps = tr.size() - 1;
  cert.min_value = *std::min_element(tr.values().begin(), tr.values().end());
  const double R = coeffs.radius;
  const double window = 100.0 * tol * R;

  if (auto z = first_zero(tr)) {
    cert.zero = z;
    if (*z < R - window) {
      cert.status = CertificateStatus::first_zero;
      if (start.oscillatory) cert.note = "indicial roots complex: zeros accumulate at the origin";
    } else {
      cert.status = CertificateStatus::inconclusive;
      cert.endpoint_zero = true;
      cert.note = "zero within the endpoint window of R";
    }
    return cert;
  }
  double yR = tr.values().back(), dyR = tr.derivatives().back();
  if (dyR < 0.0 && yR / -dyR <= window) {
    cert.status = CertificateStatus::inconclusive;
    cert.endpoint_zero = true;
    cert.zero = R + yR / -dyR;
    cert.note = "extrapolated zero within the endpoint window of R";
    return cert;
  }
  if (start.oscillatory) {
    cert.status = CertificateStatus::inconclusive;
    cert.note = "indicial roots complex: oscillatory at the origin, no zero resolved on [r0, R]";
    return cert;
  }
  cert.status = CertificateStatus::positive;
  return cert;
}

}  // namespace fineq

#include "fineq/best_constants.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "fineq/bessel_certify.hpp"
#include "fineq/error.hpp"
#include "fineq/quadrature.hpp"
#include "fineq/radial_ode.hpp"

namespace fineq {

const char* to_string(ConstantMethod m) {
  switch (m) {
    case ConstantMethod::oscillation_bisection:
      return "oscillation_bisection";
    case ConstantMethod::rayleigh_eig:
      return "rayleigh_eig";
    case ConstantMethod::closed_form:
      return "closed_form";
    case ConstantMethod::profile_search:
      return "profile_search";
  }
  return "closed_form";
}

// --- oscillation bisection ----------------------------------------------------

ConstantResult beta_constant(const WeightExpr& P, int n, double R, const BetaOptions& opt) {
  if (P.is_zero()) throw InvalidInput("beta is undefined for P = 0 (the quotient denominator vanishes)");
  if (n < 1) throw InvalidInput("dimension must be >= 1");
  require_potential(P, R);
  auto positive = [&](double c) {
    WeightExpr cP(Expr::constant(c) * P.expr(), P.r_max());
    return is_hi_potential(cP, R, opt.ode_tol).positive();
  };
  ConstantResult out;
  out.method = ConstantMethod::oscillation_bisection;
  double lo = 0.0, hi = 1.0;
  while (positive(hi)) {
    lo = hi;
    hi *= 2.0;
    ++out.iterations;
    if (hi > std::ldexp(1.0, 60)) throw NumericalFailure("bisection bracket exceeded 2^60 without oscillation");
  }
  while (hi - lo > opt.rel_width * hi) {
    double mid = 0.5 * (lo + hi);
    if (positive(mid)) lo = mid;
    else hi = mid;
    ++out.iterations;
  }
  out.lower = lo;
  out.upper = hi;
  out.value = 0.5 * (lo + hi);
  if (opt.cross_check && n >= 3) {
    QuadraticForm form = QuadraticForm::improved_hardy_quotient(P, n, R);
    form.log_span = opt.rayleigh_span;
    ConstantResult ray = rayleigh_minimize(form, opt.rayleigh_grid);
    out.cross_check = ray.value;
    double rel = std::abs(ray.value - out.value) / out.value;
    if (rel > 1e-2) {
      std::ostringstream msg;
      msg << "rayleigh cross-check differs by " << rel * 100 << "%";
      out.note = msg.str();
    }
  }
  return out;
}

// --- Rayleigh quotients -----------------------------------------------------

QuadraticForm QuadraticForm::hardy_quotient(int n, double R) {
  QuadraticForm f;
  f.n = n;
  f.R = R;
  return f;
}

QuadraticForm QuadraticForm::hardy_rellich_quotient(int n, double R) {
  QuadraticForm f;
  f.order = 2;
  f.n = n;
  f.R = R;
  f.D = WeightExpr(pow(Expr::r(), -4.0));
  return f;
}

QuadraticForm QuadraticForm::improved_hardy_quotient(const WeightExpr& P, int n, double R) {
  QuadraticForm f;
  f.n = n;
  f.R = R;
  f.hardy = -(n - 2.0) * (n - 2.0) / 4.0;
  f.D = P;
  return f;
}

namespace {

constexpr int kBand = 3;
constexpr int kLd = kBand + 1;

// 5-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 5> kGaussX = {0.046910077030668, 0.230765344947158, 0.5,
                                           0.769234655052842, 0.953089922969332};
constexpr std::array<double, 5> kGaussW = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                                           0.239314335249683, 0.118463442528095};

struct Hermite {
  std::array<double, 4> v, d1, d2;
};

Hermite hermite(double x, double h) {
  double x2 = x * x, x3 = x2 * x;
  Hermite s;
  s.v = {1 - 3 * x2 + 2 * x3, h * (x - 2 * x2 + x3), 3 * x2 - 2 * x3, h * (-x2 + x3)};
  s.d1 = {(-6 * x + 6 * x2) / h, 1 - 4 * x + 3 * x2, (6 * x - 6 * x2) / h, -2 * x + 3 * x2};
  s.d2 = {(-6 + 12 * x) / (h * h), (-4 + 6 * x) / h, (6 - 12 * x) / (h * h), (-2 + 6 * x) / h};
  return s;
}

struct Band {
  int m;
  std::vector<double> ab;  // LAPACK lower band storage
  explicit Band(int size) : m(size), ab(static_cast<std::size_t>(kLd) * size, 0.0) {}
  void add(int i, int j, double v) {
    if (i < j) std::swap(i, j);
    ab[static_cast<std::size_t>(i - j) + static_cast<std::size_t>(j) * kLd] += v;
  }
  double at(int i, int j) const {
    if (i < j) std::swap(i, j);
    if (i - j > kBand) return 0.0;
    return ab[static_cast<std::size_t>(i - j) + static_cast<std::size_t>(j) * kLd];
  }
  std::vector<double> mul(const std::vector<double>& x) const {
    std::vector<double> y(m, 0.0);
    for (int j = 0; j < m; ++j) {
      y[j] += at(j, j) * x[j];
      for (int k = 1; k <= kBand && j + k < m; ++k) {
        double a = at(j + k, j);
        y[j + k] += a * x[j];
        y[j] += a * x[j + k];
      }
    }
    return y;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

ConstantResult rayleigh_minimize(const QuadraticForm& f, int N) {
  if (N < 64) throw InvalidInput("grid size N must be >= 64");
  if (f.order != 1 && f.order != 2) throw InvalidInput("derivative order must be 1 or 2");
  if (f.n < 1) throw InvalidInput("dimension must be >= 1");
  if (!(f.R > 0.0) || !std::isfinite(f.R)) throw InvalidInput("radius must be positive and finite");
  if (f.D.is_zero()) throw InvalidInput("denominator weight vanishes identically");
  const SingularOrder& so = f.D.singular_order();
  const double cap = 2.0 * f.order;
  if (so.order > cap + 1e-9 || (so.symbolic && so.order == cap && so.log_power > 0)) {
    std::ostringstream msg;
    msg << "denominator weight has singular order " << so.order << " > " << cap
        << ": non-integrable singularity for this discretization";
    throw InvalidInput(msg.str());
  }

  const double L = f.log_span > 0 ? f.log_span : 2.0 * std::sqrt(double(N));
  const double g = f.order == 1 ? (f.n - 2.0) / 2.0 : (f.n - 4.0) / 2.0;
  const double alpha = f.n - 2.0 - 2.0 * g;  // order 2: coefficient of v_t
  const double beta = g * g - (f.n - 2.0) * g;
  const double tR = std::log(f.R), tL = tR - L, h = L / N;
  const Expr dV = derivative(f.V.expr());

  const int ndof = 2 * (N + 1);
  std::vector<int> map(ndof);
  int m = 0;
  for (int d = 0; d < ndof; ++d) {
    bool fixed = f.order == 1 ? d == 2 * N : (d <= 1 || d >= 2 * N);
    map[d] = fixed ? -1 : m++;
  }
  Band A(m), M(m);

  for (int e = 0; e < N; ++e) {
    std::array<std::array<double, 4>, 4> ka{}, ma{};
    for (std::size_t q = 0; q < kGaussX.size(); ++q) {
      double t = tL + (e + kGaussX[q]) * h;
      double r = std::exp(t);
      double w = kGaussW[q] * h;
      Hermite s = hermite(kGaussX[q], h);
      double V = f.V(r);
      double d = f.D(r) * std::pow(r, cap);
      double c = 0.0;
      if (f.order == 1) c = g * g * V + g * r * dV(r) + f.Q(r) * r * r + f.hardy;
      if (!std::isfinite(V) || !std::isfinite(d) || !std::isfinite(c)) {
        std::ostringstream msg;
        msg << "weights not finite at r = " << r << " on the log window; reduce log_span";
        throw InvalidInput(msg.str());
      }
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          if (f.order == 1) {
            ka[i][j] += w * (V * s.d1[i] * s.d1[j] + c * s.v[i] * s.v[j]);
          } else {
            double li = s.d2[i] + alpha * s.d1[i] + beta * s.v[i];
            double lj = s.d2[j] + alpha * s.d1[j] + beta * s.v[j];
            ka[i][j] += w * V * li * lj;
          }
          ma[i][j] += w * d * s.v[i] * s.v[j];
        }
      }
    }
    for (int i = 0; i < 4; ++i) {
      int gi = map[2 * e + i];
      if (gi < 0) continue;
      for (int j = 0; j <= i; ++j) {
        int gj = map[2 * e + j];
        if (gj < 0) continue;
        A.add(gi, gj, ka[i][j]);
        if (gi != gj || i == j) M.add(gi, gj, ma[i][j]);
      }
    }
  }

  // Largest eigenvalue of M x = mu A x; A is well scaled while M may be graded.
  std::vector<double> mab = M.ab, aab = A.ab;
  std::vector<double> w(m), z(1), q(1);
  std::vector<lapack_int> ifail(m);
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsbgvx(LAPACK_COL_MAJOR, 'N', 'I', 'L', m, kBand, kBand, mab.data(), kLd,
                                   aab.data(), kLd, q.data(), 1, 0.0, 0.0, m, m, 0.0, &found, w.data(),
                                   z.data(), 1, ifail.data());
  if (info > m) throw NumericalFailure("numerator form is not positive definite on the discrete space");
  if (info != 0 || found != 1 || !(w[0] > 0.0)) throw NumericalFailure("generalized eigen-solve failed");
  double lambda = 1.0 / w[0];

  // Shift-invert iteration for the eigenvector.
  const double sigma = lambda * (1.0 - 1e-7);
  std::vector<double> K(A.ab);
  for (std::size_t i = 0; i < K.size(); ++i) K[i] -= sigma * M.ab[i];
  if (LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', m, kBand, K.data(), kLd) != 0)
    throw NumericalFailure("shifted operator factorisation failed");
  std::vector<double> x(m, 1.0);
  double rq = lambda;
  ConstantResult out;
  for (int it = 0; it < 50; ++it) {
    std::vector<double> y = M.mul(x);
    LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', m, kBand, 1, K.data(), kLd, y.data(), m);
    double nrm = std::sqrt(dot(y, y));
    for (int i = 0; i < m; ++i) x[i] = y[i] / nrm;
    double next = dot(x, A.mul(x)) / dot(x, M.mul(x));
    out.iterations = it + 1;
    bool done = std::abs(next - rq) <= 1e-15 * std::abs(next);
    rq = next;
    if (done && it > 1) break;
  }
  std::vector<double> ax = A.mul(x), mx = M.mul(x);
  double res = 0.0;
  for (int i = 0; i < m; ++i) res += (ax[i] - lambda * mx[i]) * (ax[i] - lambda * mx[i]);
  out.residual = std::sqrt(res / dot(ax, ax));
  out.value = lambda;
  out.method = ConstantMethod::rayleigh_eig;
  out.grid = N;
  out.log_span = L;

  // Minimizer u = r^{-g} v and the ratio ||u'|| / ||u|| in L^2(r^{n-1} dr).
  double grad2 = 0.0, mass2 = 0.0;
  auto coef = [&](int d) { return map[d] < 0 ? 0.0 : x[map[d]]; };
  for (int e = 0; e < N; ++e) {
    for (std::size_t qd = 0; qd < kGaussX.size(); ++qd) {
      double t = tL + (e + kGaussX[qd]) * h;
      Hermite s = hermite(kGaussX[qd], h);
      double v = 0.0, vt = 0.0;
      for (int i = 0; i < 4; ++i) {
        v += coef(2 * e + i) * s.v[i];
        vt += coef(2 * e + i) * s.d1[i];
      }
      double wq = kGaussW[qd] * h;
      grad2 += wq * (vt - g * v) * (vt - g * v) * std::exp((f.n - 2.0 - 2.0 * g) * t);
      mass2 += wq * v * v * std::exp((f.n - 2.0 * g) * t);
    }
  }
  out.attainment_diagnostic = std::sqrt(grad2 / mass2);
  double sign = 0.0;
  for (int k = 0; k <= N && sign == 0.0; ++k) sign = coef(2 * k) > 0 ? 1.0 : coef(2 * k) < 0 ? -1.0 : 0.0;
  out.profile.reserve(N + 1);
  for (int k = 0; k <= N; ++k) {
    double t = tL + k * h;
    out.profile.emplace_back(std::exp(t), sign * coef(2 * k) * std::exp(-g * t));
  }
  return out;
}

std::vector<ConstantResult> rayleigh_sequence(const QuadraticForm& form, int N0, int doublings) {
  std::vector<ConstantResult> seq;
  for (int k = 0, N = N0; k <= doublings; ++k, N *= 2) {
    seq.push_back(rayleigh_minimize(form, N));
    seq.back().profile.clear();
  }
  return seq;
}

// --- closed forms -----------------------------------------------------------

double closed_constant(ClosedConstant kind, int n, const ClosedExtras& x) {
  switch (kind) {
    case ClosedConstant::interior:
      if (n < 1) throw InvalidInput("dimension must be >= 1");
      return (n - 2.0) * (n - 2.0) / 4.0;
    case ClosedConstant::half_space:
      if (n < 1) throw InvalidInput("dimension must be >= 1");
      return n * double(n) / 4.0;
    case ClosedConstant::hardy_rellich:
      if (n < 4) throw InvalidInput("the Hardy-Rellich constant requires n >= 4");
      return n * double(n) * (n - 4.0) * (n - 4.0) / 16.0;
    case ClosedConstant::rellich_improvement:
      if (std::isnan(x.beta)) throw InvalidInput("rellich_improvement requires beta");
      if (!(x.lambda < n - 2.0)) throw InvalidInput("rellich_improvement requires lambda < n-2");
      return x.beta * (n * double(n) + (n - x.lambda - 2.0) * (n - x.lambda - 2.0)) / 4.0;
    case ClosedConstant::boundary_distance:
      return 0.25;
    case ClosedConstant::codimension:
      if (x.k == 2) throw InvalidInput("co-dimension k = 2 is excluded");
      if (x.k < 1) throw InvalidInput("co-dimension must be >= 1");
      return (x.k - 2.0) * (x.k - 2.0) / 4.0;
    case ClosedConstant::hardy_sobolev_exponent:
      if (n < 3) throw InvalidInput("the Hardy-Sobolev exponent requires n >= 3");
      if (std::isnan(x.s) || x.s < 0.0 || x.s >= 2.0) throw InvalidInput("s must lie in [0, 2)");
      return 2.0 * (n - x.s) / (n - 2.0);
  }
  throw InvalidInput("unknown constant kind");
}

ClosedConstant closed_constant_from_string(const std::string& name) {
  if (name == "interior") return ClosedConstant::interior;
  if (name == "half_space") return ClosedConstant::half_space;
  if (name == "hardy_rellich") return ClosedConstant::hardy_rellich;
  if (name == "rellich_improvement") return ClosedConstant::rellich_improvement;
  if (name == "boundary_distance" || name == "boundary") return ClosedConstant::boundary_distance;
  if (name == "codimension" || name == "codim") return ClosedConstant::codimension;
  if (name == "hardy_sobolev_exponent") return ClosedConstant::hardy_sobolev_exponent;
  throw InvalidInput("unknown constant kind '" + name + "'");
}

// --- Hardy-Sobolev profile search --------------------------------------------

double hardy_sobolev_quotient(int n, double s, double t, double amplitude) {
  if (n < 3) throw InvalidInput("n must be >= 3");
  if (!(s >= 0.0 && s < 2.0)) throw InvalidInput("s must lie in [0, 2)");
  if (!(t > 0.5)) throw InvalidInput("profile parameter t must exceed 1/2 for finite energy");
  const double k = (2.0 - s) * t, m = (n - 2.0) / (2.0 - s);
  const double p = 2.0 * (n - s) / (n - 2.0);
  const double area = sphere_area(n);
  Integral grad = integrate_half_line([&](double r) {
    double du = -amplitude * m * k * std::pow(r, k - 1.0) * std::pow(1.0 + std::pow(r, k), -m - 1.0);
    return du * du * std::pow(r, n - 1.0);
  });
  Integral mass = integrate_half_line([&](double r) {
    double u = amplitude * std::pow(1.0 + std::pow(r, k), -m);
    return std::pow(std::abs(u), p) * std::pow(r, n - 1.0 - s);
  });
  return area * grad.value / std::pow(area * mass.value, 2.0 / p);
}

HardySobolevResult hardy_sobolev_value(int n, double s, const HardySobolevOptions& opt) {
  if (opt.scan_points < 3) throw InvalidInput("scan needs at least 3 points");
  HardySobolevResult out;
  auto q = [&](double t) {
    double v = hardy_sobolev_quotient(n, s, t);
    out.trace.emplace_back(t, v);
    return v;
  };
  int best = 0;
  std::vector<double> ts(opt.scan_points), vs(opt.scan_points);
  for (int i = 0; i < opt.scan_points; ++i) {
    ts[i] = opt.t_lo + (opt.t_hi - opt.t_lo) * i / (opt.scan_points - 1);
    vs[i] = q(ts[i]);
    if (vs[i] < vs[best]) best = i;
  }
  double a = ts[std::max(best - 1, 0)], b = ts[std::min(best + 1, opt.scan_points - 1)];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = q(c), fd = q(d);
  while (b - a > opt.t_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = q(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = q(d);
    }
  }
  out.best_t = fc < fd ? c : d;
  out.value = std::min(fc, fd);
  if (vs[best] < out.value) {
    out.value = vs[best];
    out.best_t = ts[best];
  }
  return out;
}

}  // namespace fineq

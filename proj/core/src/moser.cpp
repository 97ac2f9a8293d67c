#include "fineq/moser.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "fineq/error.hpp"
#include "fineq/quadrature.hpp"

namespace fineq {

namespace {

constexpr double kPi = std::numbers::pi;

// 8-point Gauss-Legendre on [0, 1].
constexpr int kGauss = 8;
constexpr double kGaussNode[kGauss] = {0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                       0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                       0.8983332387068134,   0.9801449282487681};
constexpr double kGaussWeight[kGauss] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                         0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                         0.11119051722668724, 0.05061426814518813};

}  // namespace

// --- LineFunction ------------------------------------------------------------------

LineFunction::LineFunction(int cells) {
  if (cells < 8) throw InvalidInput("line grid needs at least 8 cells");
  const int M = cells;
  const double d = kPi / M;
  x_.resize(M + 1);
  w_.assign(M + 1, 0.0);
  stiff_.resize(M);
  for (int j = 0; j <= M; ++j) x_[j] = -std::cos(j * d);
  for (int k = 0; k < M; ++k) {
    const double a = k * d, b = (k + 1) * d;
    // hat functions against sin(theta)
    w_[k] += std::cos(a) + (std::sin(a) - std::sin(b)) / d;
    w_[k + 1] += -std::cos(b) + (std::sin(b) - std::sin(a)) / d;
    stiff_[k] = (std::cos(a) - std::cos(b)) / (d * d);
  }
  g_.assign(M + 1, 0.0);
}

LineFunction LineFunction::sample(const std::function<double(double)>& g, int cells) {
  LineFunction f(cells);
  for (std::size_t j = 0; j < f.x_.size(); ++j) f.g_[j] = g(f.x_[j]);
  return f;
}

double LineFunction::dirichlet() const {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < g_.size(); ++k) {
    const double dg = g_[k + 1] - g_[k];
    s += stiff_[k] * dg * dg;
  }
  return s;
}

double LineFunction::integral() const {
  double s = 0.0;
  for (std::size_t j = 0; j < g_.size(); ++j) s += w_[j] * g_[j];
  return s;
}

namespace {

// Exponential moments of a theta-piecewise-linear g, cell by cell with Gauss points:
//   E = int e^{2(g - shift)} dx, X = int e^{2(g - shift)} x dx, optional dE/dg_j.
struct ExpMoments {
  double shift = 0.0;
  double E = 0.0;
  double X = 0.0;
  double XX = 0.0;
  std::vector<double> dE;
};

ExpMoments exp_moments(const std::vector<double>& g, double tilt, bool gradient) {
  const int M = int(g.size()) - 1;
  const double d = kPi / M;
  ExpMoments m;
  double top = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= M; ++j) top = std::max(top, g[j] - tilt * std::cos(j * d));
  m.shift = top;
  if (gradient) m.dE.assign(M + 1, 0.0);
  for (int k = 0; k < M; ++k) {
    for (int q = 0; q < kGauss; ++q) {
      const double t = kGaussNode[q];
      const double th = (k + t) * d;
      const double x = -std::cos(th);
      const double xk = -std::cos(k * d), xk1 = -std::cos((k + 1) * d);
      const double gv = (1.0 - t) * (g[k] + tilt * xk) + t * (g[k + 1] + tilt * xk1);
      const double e = kGaussWeight[q] * d * std::sin(th) * std::exp(2.0 * (gv - top));
      m.E += e;
      m.X += e * x;
      m.XX += e * x * ((1.0 - t) * xk + t * xk1);
      if (gradient) {
        m.dE[k] += 2.0 * e * (1.0 - t);
        m.dE[k + 1] += 2.0 * e * t;
      }
    }
  }
  return m;
}

}  // namespace

double LineFunction::constraint_residual() const {
  ExpMoments m = exp_moments(g_, 0.0, false);
  return m.X / m.E;
}

double LineFunction::project() {
  // mean(a) = X/E is increasing in the tilt a; safeguarded Newton inside a sign bracket.
  auto mean_at = [&](double a, double* var) {
    ExpMoments m = exp_moments(g_, a, false);
    const double mean = m.X / m.E;
    if (var) *var = m.XX / m.E - mean * mean;
    return mean;
  };
  double var = 0.0;
  double a = 0.0, f = mean_at(0.0, &var);
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200 && std::abs(f) > 1e-13; ++it) {
    if (f > 0.0) hi = a;
    else lo = a;
    double next = var > 0.0 ? a - f / (2.0 * var) : a - f;
    if (!(next > lo && next < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi)) next = 0.5 * (lo + hi);
      else next = std::isfinite(lo) ? lo + std::max(1.0, std::abs(lo)) : hi - std::max(1.0, std::abs(hi));
    }
    a = next;
    f = mean_at(a, &var);
  }
  for (std::size_t j = 0; j < g_.size(); ++j) g_[j] += a * x_[j];
  const double r = constraint_residual();
  if (!(std::abs(r) <= 1e-8)) throw NumericalFailure("constraint projection did not converge");
  return a;
}

void LineFunction::write_csv(std::ostream& os) const {
  os << "x,g\n";
  os.precision(17);
  for (std::size_t j = 0; j < g_.size(); ++j) os << x_[j] << ',' << g_[j] << '\n';
}

double I_alpha(const LineFunction& g, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  const double D = g.dirichlet();
  if (!std::isfinite(D)) throw InvalidInput("Dirichlet seminorm is not finite");
  ExpMoments m = exp_moments(g.values(), 0.0, false);
  return 0.5 * alpha * D + g.integral() - (std::log(0.5 * m.E) + 2.0 * m.shift);
}

double I_alpha(const std::function<double(double)>& g, const std::function<double(double)>& dg, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  Integral D = integrate([&](double x) { return (1.0 - x * x) * dg(x) * dg(x); }, -1.0, 1.0);
  Integral G = integrate(g, -1.0, 1.0);
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200; ++i) top = std::max(top, g(std::cos(kPi * i / 200.0)));
  Integral E = integrate([&](double x) { return std::exp(2.0 * (g(x) - top)); }, -1.0, 1.0);
  return 0.5 * alpha * D.value + G.value - (std::log(0.5 * E.value) + 2.0 * top);
}

double blowup_value(double alpha, double L) {
  if (!(L > 0.0)) throw InvalidInput("blow-up parameter must be positive");
  const double eps = std::exp(-L);
  const double a = 1.0 - eps;
  const double lt = std::log(2.0 - eps);            // log(1 + a)
  const double at = 0.5 * (lt + L);                 // atanh(a)
  const double one_m_a2 = eps * (2.0 - eps);        // 1 - a^2
  const double log_one_m_a2 = -L + lt;
  const double dirichlet = -12.0 + 4.0 * (3.0 - a * a) * at / a;
  // int ln(1 - a^2 x^2) dx = (2/a) [(1+a) ln(1+a) - (1-a) ln(1-a) - 2a]
  const double log_int = 2.0 / a * ((1.0 + a) * lt + eps * L - 2.0 * a);
  const double g_int = 2.0 * log_one_m_a2 - log_int;
  // 1/2 int e^{2g} = (1/2)(1-a^2)^2 [1/(1-a^2) + atanh(a)/a]
  const double log_term = log_one_m_a2 + std::log(0.5 * (1.0 + one_m_a2 * at / a));
  return 0.5 * alpha * dirichlet + g_int - log_term;
}

// --- descent -----------------------------------------------------------------------

namespace {

struct Evaluation {
  double value = 0.0;
  std::vector<double> grad;
};

Evaluation evaluate(const LineFunction& f, const std::vector<double>& stiff, double alpha) {
  const auto& g = f.values();
  const auto& w = f.weights();
  const std::size_t N = g.size();
  ExpMoments m = exp_moments(g, 0.0, true);
  Evaluation ev;
  ev.value = 0.5 * alpha * f.dirichlet() + f.integral() - (std::log(0.5 * m.E) + 2.0 * m.shift);
  ev.grad.assign(N, 0.0);
  for (std::size_t k = 0; k + 1 < N; ++k) {
    const double s = alpha * stiff[k] * (g[k + 1] - g[k]);
    ev.grad[k] -= s;
    ev.grad[k + 1] += s;
  }
  for (std::size_t j = 0; j < N; ++j) ev.grad[j] += w[j] - m.dE[j] / m.E;
  return ev;
}

// Solve (alpha K + diag(w)) d = r; K is the tridiagonal stiffness matrix.
std::vector<double> precondition(const std::vector<double>& stiff, const std::vector<double>& w, double alpha,
                                 const std::vector<double>& r) {
  const std::size_t N = r.size();
  std::vector<double> diag(N), off(N - 1);
  for (std::size_t j = 0; j < N; ++j) diag[j] = w[j];
  for (std::size_t k = 0; k + 1 < N; ++k) {
    diag[k] += alpha * stiff[k];
    diag[k + 1] += alpha * stiff[k];
    off[k] = -alpha * stiff[k];
  }
  std::vector<double> c(N - 1), d(N);
  c[0] = off[0] / diag[0];
  d[0] = r[0] / diag[0];
  for (std::size_t j = 1; j < N; ++j) {
    const double den = diag[j] - off[j - 1] * c[j - 1];
    if (j + 1 < N) c[j] = off[j] / den;
    d[j] = (r[j] - off[j - 1] * d[j - 1]) / den;
  }
  for (std::size_t j = N - 1; j-- > 0;) d[j] -= c[j] * d[j + 1];
  return d;
}

}  // namespace

class MoserDescent {
 public:
  static const std::vector<double>& stiffness(const LineFunction& f) { return f.stiff_; }
};

MoserResult descend_I_alpha(LineFunction g, double alpha, const MoserOptions& opt) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  MoserResult res;
  g.project();
  const auto& stiff = MoserDescent::stiffness(g);
  Evaluation ev = evaluate(g, stiff, alpha);
  double tau = 1.0;
  res.trace.push_back({0, 0.0, ev.value, g.constraint_residual()});
  bool converged = false;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    std::vector<double> d = precondition(stiff, g.weights(), alpha, ev.grad);
    double slope = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) slope += d[j] * ev.grad[j];
    if (slope <= opt.tol) {
      converged = true;
      break;
    }
    bool accepted = false;
    LineFunction trial = g;
    Evaluation tev;
    for (int bt = 0; bt < 60; ++bt) {
      trial = g;
      for (std::size_t j = 0; j < d.size(); ++j) trial.values()[j] -= tau * d[j];
      try {
        trial.project();
      } catch (const NumericalFailure&) {
        tau *= 0.5;
        continue;
      }
      tev = evaluate(trial, stiff, alpha);
      if (tev.value <= ev.value - 1e-4 * tau * slope) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      converged = std::abs(slope) < 1e-10;
      break;
    }
    const double drop = ev.value - tev.value;
    g = std::move(trial);
    ev = std::move(tev);
    res.trace.push_back({it, tau, ev.value, g.constraint_residual()});
    tau = std::min(1.0, 2.0 * tau);
    if (drop < opt.tol * std::max(1.0, std::abs(ev.value)) && slope < 1e-10) {
      converged = true;
      break;
    }
  }
  res.inf_estimate = ev.value;
  res.status = converged ? "converged" : "inconclusive";
  res.minimizer = std::move(g);
  return res;
}

MoserResult minimize_I_alpha(double alpha, const MoserOptions& opt) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  if (alpha >= 0.5) {
    LineFunction g0 = LineFunction::sample([](double x) { return 0.3 * x * x + 0.2 * x * x * x; }, opt.cells);
    return descend_I_alpha(std::move(g0), alpha, opt);
  }
  MoserResult res;
  res.minimizer = LineFunction(opt.cells);
  res.status = "inconclusive";
  res.inf_estimate = 0.0;
  int it = 0;
  for (double L = 1.0; L <= opt.blowup_max_L; L *= 2.0) {
    const double v = blowup_value(alpha, L);
    res.trace.push_back({it++, L, v, 0.0});
    res.inf_estimate = std::min(res.inf_estimate, v);
    if (v <= opt.blowup_target) {
      res.status = "divergent";
      break;
    }
  }
  return res;
}

// --- Ghigi -------------------------------------------------------------------------

ConvexFunction::ConvexFunction(std::vector<double> values) : u_(std::move(values)) {
  if (u_.size() < 3) throw InvalidInput("convex function needs at least 3 nodes");
  for (double v : u_)
    if (!std::isfinite(v)) throw InvalidInput("convex function must be bounded");
  for (std::size_t i = 1; i + 1 < u_.size(); ++i)
    if (u_[i + 1] - 2.0 * u_[i] + u_[i - 1] < -1e-10) throw InvalidInput("function is not convex");
}

ConvexFunction ConvexFunction::sample(const std::function<double(double)>& u, int nodes) {
  std::vector<double> v(nodes);
  for (int i = 0; i < nodes; ++i) v[i] = u(-1.0 + 2.0 * i / double(nodes - 1));
  return ConvexFunction(std::move(v));
}

double ConvexFunction::legendre(double y) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u_.size(); ++i) best = std::max(best, x(i) * y - u_[i]);
  return best;
}

double ghigi_phi(const ConvexFunction& u) {
  const auto& v = u.values();
  const std::size_t N = v.size();
  const double h = 2.0 / double(N - 1);
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i) integral += 0.5 * h * (v[i] + v[i + 1]);
  // u* = x_i y - u_i on [s_{i-1}, s_i], s_i the slope of cell i; logs of each piece.
  std::vector<double> s(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) s[i] = (v[i + 1] - v[i]) / h;
  for (std::size_t i = 1; i < s.size(); ++i) s[i] = std::max(s[i], s[i - 1]);
  std::vector<double> logs;
  logs.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double x = u.x(i);
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : s[i - 1];
    const double hi = i + 1 == N ? std::numeric_limits<double>::infinity() : s[i];
    const double width = hi - lo;
    if (width <= 0.0) continue;
    double lg;
    if (x == 0.0) {
      lg = 2.0 * v[i] + std::log(width);
    } else if (x > 0.0) {
      lg = 2.0 * v[i] - 2.0 * x * lo + std::log(-std::expm1(-2.0 * x * width) / (2.0 * x));
    } else {
      lg = 2.0 * v[i] - 2.0 * x * hi + std::log(std::expm1(2.0 * x * width) / (2.0 * x));
    }
    logs.push_back(lg);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - top);
  return integral - (std::log(0.5) + top + std::log(sum));
}

namespace {

struct FamilyCtx {
  int nodes;
};

double family_value(double a, double b, int nodes) {
  a = std::max(a, 0.0);
  b = std::max(b, 0.0);
  return ghigi_phi(ConvexFunction::sample([&](double x) { return a * x * x + b * std::abs(x); }, nodes));
}

double family_f(const gsl_vector* p, void* ctx) {
  auto* c = static_cast<FamilyCtx*>(ctx);
  return family_value(gsl_vector_get(p, 0), gsl_vector_get(p, 1), c->nodes);
}

struct ConvexCtx {
  int nodes;
};

// Nodes from (s0, log increments): slopes s0 + cumulative e^{z}.
std::vector<double> convex_nodes(const gsl_vector* p, int nodes) {
  const double h = 2.0 / (nodes - 1);
  std::vector<double> u(nodes, 0.0);
  double slope = gsl_vector_get(p, 0);
  for (int i = 1; i < nodes; ++i) {
    if (i > 1) slope += std::exp(std::clamp(gsl_vector_get(p, i - 1), -60.0, 40.0));
    u[i] = u[i - 1] + h * slope;
  }
  return u;
}

double convex_f(const gsl_vector* p, void* ctx) {
  auto* c = static_cast<ConvexCtx*>(ctx);
  return ghigi_phi(ConvexFunction(convex_nodes(p, c->nodes)));
}

void convex_df(const gsl_vector* p, void* ctx, gsl_vector* g) {
  gsl_vector* q = gsl_vector_alloc(p->size);
  gsl_vector_memcpy(q, p);
  for (std::size_t i = 0; i < p->size; ++i) {
    const double x = gsl_vector_get(p, i), e = 1e-6;
    gsl_vector_set(q, i, x + e);
    const double fp = convex_f(q, ctx);
    gsl_vector_set(q, i, x - e);
    const double fm = convex_f(q, ctx);
    gsl_vector_set(q, i, x);
    gsl_vector_set(g, i, (fp - fm) / (2.0 * e));
  }
  gsl_vector_free(q);
}

void convex_fdf(const gsl_vector* p, void* ctx, double* f, gsl_vector* g) {
  *f = convex_f(p, ctx);
  convex_df(p, ctx, g);
}

}  // namespace

GhigiSearch minimize_ghigi_family(int nodes) {
  GhigiSearch out;
  out.value = std::numeric_limits<double>::infinity();
  double a0 = 0.0, b0 = 0.0;
  for (double a : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0})
    for (double b : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double v = family_value(a, b, nodes);
      out.trace.push_back({a, b, v});
      if (v < out.value) {
        out.value = v;
        out.a = a0 = a;
        out.b = b0 = b;
      }
    }
  FamilyCtx ctx{nodes};
  gsl_multimin_function fn{&family_f, 2, &ctx};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, a0);
  gsl_vector_set(x, 1, b0);
  gsl_vector_set_all(step, 0.2);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  for (int it = 0; it < 400; ++it) {
    if (gsl_multimin_fminimizer_iterate(s)) break;
    const double a = std::max(0.0, gsl_vector_get(s->x, 0)), b = std::max(0.0, gsl_vector_get(s->x, 1));
    out.trace.push_back({a, b, s->fval});
    if (s->fval < out.value) {
      out.value = s->fval;
      out.a = a;
      out.b = b;
    }
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-7) == GSL_SUCCESS) break;
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(step);
  return out;
}

GhigiSearch minimize_ghigi_convex(int nodes, int iterations) {
  if (nodes < 5) throw InvalidInput("convex search needs at least 5 nodes");
  const std::size_t dim = std::size_t(nodes - 1);
  ConvexCtx ctx{nodes};
  gsl_multimin_function_fdf fn{&convex_f, &convex_df, &convex_fdf, dim, &ctx};
  gsl_vector* x = gsl_vector_alloc(dim);
  // start from a x^2 with a = 1
  gsl_vector_set(x, 0, -2.0 + 2.0 / (nodes - 1));
  for (std::size_t i = 1; i < dim; ++i) gsl_vector_set(x, i, std::log(2.0 * 2.0 / (nodes - 1)));
  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, dim);
  gsl_multimin_fdfminimizer_set(s, &fn, x, 0.1, 0.1);
  GhigiSearch out;
  out.value = convex_f(x, &ctx);
  for (int it = 0; it < iterations; ++it) {
    if (gsl_multimin_fdfminimizer_iterate(s)) break;
    out.value = std::min(out.value, s->f);
    out.trace.push_back({double(it), 0.0, s->f});
    if (gsl_multimin_test_gradient(s->gradient, 1e-9) == GSL_SUCCESS) break;
  }
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);
  return out;
}

// --- sphere ------------------------------------------------------------------------

double SphereFunction::measure_total() const {
  return integrate([](double t) { return 0.5 * std::sin(t); }, 0.0, kPi).value;
}

std::function<double(double)> SphereFunction::line_profile() const {
  auto f = u;
  return [f](double x) { return f(std::acos(std::clamp(x, -1.0, 1.0))); };
}

std::function<double(double)> SphereFunction::line_derivative() const {
  auto f = du;
  return [f](double x) {
    const double c = std::clamp(x, -1.0, 1.0);
    const double s = std::sqrt(1.0 - c * c);
    return s > 0.0 ? -f(std::acos(c)) / s : 0.0;
  };
}

double J_alpha_sphere(const SphereFunction& u, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  if (std::abs(u.measure_total() - 1.0) > 1e-10) throw NumericalFailure("sphere measure is not normalized");
  Integral D = integrate([&](double t) { return u.du(t) * u.du(t) * 0.5 * std::sin(t); }, 0.0, kPi);
  if (!std::isfinite(D.value)) throw InvalidInput("Dirichlet energy is not finite");
  Integral G = integrate([&](double t) { return u.u(t) * 0.5 * std::sin(t); }, 0.0, kPi);
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200; ++i) top = std::max(top, u.u(kPi * i / 200.0));
  Integral E = integrate([&](double t) { return std::exp(2.0 * (u.u(t) - top)) * 0.5 * std::sin(t); }, 0.0, kPi);
  return alpha * D.value + 2.0 * G.value - (std::log(E.value) + 2.0 * top);
}

SphereFunction stereographic_profile(double a) {
  if (!(std::abs(a) < 1.0)) throw InvalidInput("dilation parameter must lie in (-1, 1)");
  const double c = 0.5 * std::log1p(-a * a);
  return {[=](double t) { return c - std::log1p(-a * std::cos(t)); },
          [=](double t) { return -a * std::sin(t) / (1.0 - a * std::cos(t)); }};
}

SphereFunction random_axisymmetric(std::uint64_t seed, int modes, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> c(modes);
  for (int k = 0; k < modes; ++k) c[k] = scale * U(rng) / (k + 1);
  return {[c](double t) {
            double s = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::cos((k + 1) * t);
            return s;
          },
          [c](double t) {
            double s = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k) s -= c[k] * (k + 1) * std::sin((k + 1) * t);
            return s;
          }};
}

AubinProbe aubin_threshold_probe(double alpha, int starts, const MoserOptions& opt) {
  if (!(alpha >= 0.5 && alpha <= 1.0)) throw InvalidInput("Aubin probe needs 1/2 <= alpha <= 1");
  AubinProbe out;
  out.value = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int s = 0; s < starts; ++s) {
    std::vector<double> c(6);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 1.5 * U(rng) / (k + 1);
    LineFunction g0 = LineFunction::sample(
        [&](double x) {
          double t = std::acos(x), v = 0.0;
          for (std::size_t k = 0; k < c.size(); ++k) v += c[k] * std::cos((k + 1) * t);
          return v;
        },
        opt.cells);
    MoserResult r = descend_I_alpha(std::move(g0), alpha, opt);
    out.value = std::min(out.value, r.inf_estimate);
    out.trace.push_back({s, 0.0, out.value, r.minimizer.constraint_residual()});
    ++out.starts;
  }
  return out;
}

// --- singular Moser -----------------------------------------------------------------

double singular_moser_threshold(int n, double alpha) {
  if (n < 2) throw InvalidInput("dimension must be >= 2");
  if (!(alpha >= 0.0 && alpha < n)) throw InvalidInput("need 0 <= alpha < n");
  return (1.0 - alpha / n) * n * std::pow(sphere_area(n), 1.0 / (n - 1));
}

RadialTestFunction moser_sequence_profile(int n, int k) {
  if (n < 2 || k < 1) throw InvalidInput("Moser profile needs n >= 2 and k >= 1");
  const double c = std::pow(sphere_area(n), -1.0 / n);
  const double kk = double(k);
  const double rho = std::exp(-kk);
  const double top = c * std::pow(kk, (n - 1.0) / n);
  const double tail = c * std::pow(kk, -1.0 / n);
  return RadialTestFunction([=](double r) { return r <= rho ? top : -tail * std::log(r); },
                            [=](double r) { return r <= rho ? 0.0 : -tail / r; },
                            [=](double r) { return r <= rho ? 0.0 : tail / (r * r); }, 1.0, Smoothness::h1_0,
                            "moser_k" + std::to_string(k), {rho});
}

SingularMoserOutcome singular_moser_check(int n, double alpha, double beta, const RadialTestFunction& u) {
  SingularMoserOutcome out;
  out.beta_max = singular_moser_threshold(n, alpha);
  if (!(beta >= 0.0)) throw InvalidInput("beta must be nonnegative");
  if (u.support() > 1.0 + 1e-12) throw InvalidInput("profile must live in the unit ball");
  Integral grad = ball_integral(u, n, [&](double r) { return std::pow(std::abs(u.d1(r)), n); });
  out.gradient_norm = grad.value;
  const double scale = grad.value > 1.0 ? std::pow(grad.value, -1.0 / n) : 1.0;
  const double p = double(n) / (n - 1);
  try {
    Integral I = ball_integral(u, n, [&](double r) {
      return std::exp(beta * std::pow(std::abs(scale * u(r)), p)) * std::pow(r, -alpha);
    });
    out.value = I.value;
    out.error = I.error;
    out.pass = std::isfinite(I.value);
  } catch (const DivergentIntegral&) {
    out.value = std::numeric_limits<double>::infinity();
    out.pass = false;
  }
  if (scale != 1.0) out.note = "renormalised to unit gradient norm";
  if (beta > out.beta_max) {
    if (!out.note.empty()) out.note += "; ";
    out.note += "beta above threshold: no uniform bound";
  }
  return out;
}

}  // namespace fineq

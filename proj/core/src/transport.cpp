#include "fineq/transport.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fineq/error.hpp"
#include "fineq/weight_dsl.hpp"

namespace fineq {

// --- DensityGrid -----------------------------------------------------------------

DensityGrid::DensityGrid(double lo, double hi, std::vector<double> rho, Geometry geometry, int n)
    : lo_(lo), hi_(hi), rho_(std::move(rho)), geometry_(geometry), n_(geometry == Geometry::line ? 1 : n) {
  if (rho_.size() < 9) throw InvalidInput("density grid needs at least 9 nodes");
  if (!(hi_ > lo_) || !std::isfinite(lo_) || !std::isfinite(hi_)) throw InvalidInput("empty density support");
  if (geometry_ == Geometry::radial && (lo_ != 0.0 || n_ < 1))
    throw InvalidInput("radial densities live on [0, R] with n >= 1");
  for (double v : rho_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("density values must be finite and nonnegative");
  h_ = (hi_ - lo_) / double(rho_.size() - 1);
  build();
}

double DensityGrid::jacobian(double x) const {
  if (geometry_ == Geometry::line) return 1.0;
  return sphere_area(n_) * std::pow(x, n_ - 1);
}

void DensityGrid::build() {
  const std::size_t N = rho_.size();
  m_.resize(N);
  for (std::size_t i = 0; i < N; ++i) m_[i] = rho_[i] * jacobian(x(i));
  dm_ = gradient(m_);
  cumulative_.assign(N, 0.0);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    double cell = h_ / 2.0 * (m_[i] + m_[i + 1]) + h_ * h_ / 12.0 * (dm_[i] - dm_[i + 1]);
    cumulative_[i + 1] = cumulative_[i] + std::max(cell, 0.0);
  }
}

DensityGrid DensityGrid::from_function(const std::function<double(double)>& rho, double lo, double hi, int nodes,
                                       Geometry geometry, int n) {
  if (nodes < 9) throw InvalidInput("density grid needs at least 9 nodes");
  std::vector<double> v(nodes);
  const double h = (hi - lo) / (nodes - 1);
  for (int i = 0; i < nodes; ++i) v[i] = rho(lo + h * i);
  return DensityGrid(lo, hi, std::move(v), geometry, n).normalized();
}

DensityGrid DensityGrid::gaussian(double m, double s, int nodes, double width) {
  if (!(s > 0.0)) throw InvalidInput("Gaussian width must be positive");
  const double c = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
  return from_function([&](double x) { return c * std::exp(-0.5 * (x - m) * (x - m) / (s * s)); }, m - width * s,
                       m + width * s, nodes);
}

DensityGrid DensityGrid::read_csv(std::istream& is, Geometry geometry, int n) {
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (!(row >> a >> b)) {
      if (xs.empty()) continue;
      throw InvalidInput("malformed density row: " + line);
    }
    xs.push_back(a);
    vs.push_back(b);
  }
  if (xs.size() < 9) throw InvalidInput("density CSV needs at least 9 rows");
  const double h = (xs.back() - xs.front()) / double(xs.size() - 1);
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(xs.back())))
      throw InvalidInput("density CSV must be uniformly spaced");
  return DensityGrid(xs.front(), xs.back(), std::move(vs), geometry, n);
}

void DensityGrid::write_csv(std::ostream& os) const {
  os << "x,rho\n";
  os.precision(17);
  for (std::size_t i = 0; i < size(); ++i) os << x(i) << ',' << rho_[i] << '\n';
}

DensityGrid DensityGrid::normalized() const {
  const double M = mass();
  if (!(M > 0.0)) throw InvalidInput("density has zero mass");
  std::vector<double> v(rho_);
  for (double& r : v) r /= M;
  return DensityGrid(lo_, hi_, std::move(v), geometry_, n_);
}

double DensityGrid::barycenter() const {
  if (geometry_ == Geometry::radial) return 0.0;
  return integrate([](double x, double r) { return x * r; }) / mass();
}

DensityGrid DensityGrid::coarsened() const {
  std::size_t N = size();
  if ((N - 1) % 2 == 1) --N;
  std::vector<double> v;
  for (std::size_t i = 0; i < N; i += 2) v.push_back(rho_[i]);
  return DensityGrid(lo_, x(N - 1), std::move(v), geometry_, n_);
}

std::vector<double> DensityGrid::gradient(const std::vector<double>& f) const {
  const std::size_t N = f.size();
  std::vector<double> d(N);
  const double k = 1.0 / (12.0 * h_);
  for (std::size_t i = 2; i + 2 < N; ++i) d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * k;
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * k;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * k;
  d[N - 1] = (25.0 * f[N - 1] - 48.0 * f[N - 2] + 36.0 * f[N - 3] - 16.0 * f[N - 4] + 3.0 * f[N - 5]) * k;
  d[N - 2] = (3.0 * f[N - 1] + 10.0 * f[N - 2] - 18.0 * f[N - 3] + 6.0 * f[N - 4] - f[N - 5]) * k;
  return d;
}

double DensityGrid::integrate(const std::vector<double>& g) const {
  if (g.size() != size()) throw InvalidInput("node vector size mismatch");
  const std::size_t N = size();
  std::vector<double> f(N);
  for (std::size_t i = 0; i < N; ++i) f[i] = g[i] * jacobian(x(i));
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < N; ++i) s += f[i];
  std::vector<double> d = gradient(f);
  return h_ * s + h_ * h_ / 12.0 * (d.front() - d.back());
}

double DensityGrid::integrate(const std::function<double(double, double)>& g) const {
  std::vector<double> v(size());
  for (std::size_t i = 0; i < size(); ++i) v[i] = g(x(i), rho_[i]);
  return integrate(v);
}

double DensityGrid::cell_cdf(std::size_t i, double th) const {
  const double t2 = th * th, t3 = t2 * th, t4 = t3 * th;
  const double a00 = t4 / 2 - t3 + th, a10 = t4 / 4 - 2 * t3 / 3 + t2 / 2;
  const double a01 = -t4 / 2 + t3, a11 = t4 / 4 - t3 / 3;
  return h_ * (m_[i] * a00 + h_ * dm_[i] * a10 + m_[i + 1] * a01 + h_ * dm_[i + 1] * a11);
}

double DensityGrid::cdf(double xv) const {
  if (xv <= lo_) return 0.0;
  if (xv >= hi_) return 1.0;
  std::size_t i = std::min(size() - 2, std::size_t((xv - lo_) / h_));
  const double th = (xv - x(i)) / h_;
  const double full = cell_cdf(i, 1.0);
  const double frac = full > 0.0 ? std::clamp(cell_cdf(i, th) / full, 0.0, 1.0) : th;
  return (cumulative_[i] + (cumulative_[i + 1] - cumulative_[i]) * frac) / mass();
}

double DensityGrid::quantile(double t) const {
  const double target = std::clamp(t, 0.0, 1.0) * mass();
  if (target <= 0.0) return lo_;
  if (target >= mass()) return hi_;
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t i = std::size_t(it - cumulative_.begin());
  if (i == 0) return lo_;
  --i;
  const double span = cumulative_[i + 1] - cumulative_[i];
  const double want = span > 0.0 ? (target - cumulative_[i]) / span : 0.0;
  const double full = cell_cdf(i, 1.0);
  if (!(full > 0.0)) return x(i) + want * h_;
  double a = 0.0, b = 1.0;
  for (int k = 0; k < 60; ++k) {
    double m = 0.5 * (a + b);
    if (cell_cdf(i, m) / full < want) a = m;
    else b = m;
  }
  return x(i) + 0.5 * (a + b) * h_;
}

// --- Legendre transform ------------------------------------------------------------

namespace {

std::vector<std::size_t> lower_hull(const GridFunction& f) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull.back();
      double cross = (f.x[b] - f.x[a]) * (f.v[i] - f.v[a]) - (f.v[b] - f.v[a]) * (f.x[i] - f.x[a]);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  return hull;
}

void check_grid_function(const GridFunction& f) {
  if (f.x.empty()) throw InvalidInput("empty grid");
  if (f.x.size() != f.v.size()) throw InvalidInput("grid function size mismatch");
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    if (!std::isfinite(f.v[i]) || !std::isfinite(f.x[i])) throw InvalidInput("grid function must be finite");
    if (i > 0 && !(f.x[i] > f.x[i - 1])) throw InvalidInput("grid must be strictly increasing");
  }
}

}  // namespace

GridFunction legendre(const GridFunction& f, const std::vector<double>& y) {
  check_grid_function(f);
  std::vector<std::size_t> hull = lower_hull(f);
  std::vector<double> slopes;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k)
    slopes.push_back((f.v[hull[k + 1]] - f.v[hull[k]]) / (f.x[hull[k + 1]] - f.x[hull[k]]));
  GridFunction out;
  out.x = y;
  out.v.resize(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    std::size_t k = std::size_t(std::lower_bound(slopes.begin(), slopes.end(), y[j]) - slopes.begin());
    std::size_t i = hull[k];
    out.v[j] = f.x[i] * y[j] - f.v[i];
  }
  return out;
}

std::vector<double> dual_grid(const GridFunction& f, std::size_t points) {
  check_grid_function(f);
  if (points == 0) points = f.x.size();
  if (points < 2) points = 2;
  std::vector<std::size_t> hull = lower_hull(f);
  double lo = 0.0, hi = 0.0;
  if (hull.size() >= 2) {
    lo = (f.v[hull[1]] - f.v[hull[0]]) / (f.x[hull[1]] - f.x[hull[0]]);
    std::size_t k = hull.size() - 1;
    hi = (f.v[hull[k]] - f.v[hull[k - 1]]) / (f.x[hull[k]] - f.x[hull[k - 1]]);
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  std::vector<double> y(points);
  for (std::size_t j = 0; j < points; ++j) y[j] = lo + (hi - lo) * double(j) / double(points - 1);
  return y;
}

// --- Wasserstein -------------------------------------------------------------------

namespace {

void require_unit_mass(const DensityGrid& r) {
  if (std::abs(r.mass() - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "density mass " << r.mass() << " differs from 1; normalize first";
    throw InvalidInput(msg.str());
  }
}

double w2_squared(const DensityGrid& a, const DensityGrid& b) {
  std::vector<double> ts;
  ts.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ts.push_back(a.cdf(a.x(i)));
  for (std::size_t i = 0; i < b.size(); ++i) ts.push_back(b.cdf(b.x(i)));
  ts.push_back(0.0);
  ts.push_back(1.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  static const double g = std::sqrt(0.6) / 2.0;
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    double lo = ts[k], w = ts[k + 1] - ts[k];
    if (!(w > 0.0)) continue;
    double acc = 0.0;
    const double pts[3] = {0.5 - g, 0.5, 0.5 + g};
    const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    for (int q = 0; q < 3; ++q) {
      double t = lo + pts[q] * w;
      double d = a.quantile(t) - b.quantile(t);
      acc += wts[q] * d * d;
    }
    s += w * acc;
  }
  return s;
}

void require_same_geometry(const DensityGrid& a, const DensityGrid& b) {
  if (a.geometry() != b.geometry() || a.dimension() != b.dimension())
    throw InvalidInput("densities must share the geometry tag");
}

}  // namespace

Estimate wasserstein_1d(const DensityGrid& rho0, const DensityGrid& rho1) {
  require_same_geometry(rho0, rho1);
  require_unit_mass(rho0);
  require_unit_mass(rho1);
  double fine = std::sqrt(w2_squared(rho0, rho1));
  double coarse = std::sqrt(w2_squared(rho0.coarsened().normalized(), rho1.coarsened().normalized()));
  return {fine, std::abs(fine - coarse)};
}

std::function<double(double)> quantile_map(const DensityGrid& rho0, const DensityGrid& rho1) {
  require_same_geometry(rho0, rho1);
  return [a = rho0, b = rho1](double x) { return b.quantile(a.cdf(x)); };
}

PushForwardResidual push_forward_check(const std::function<double(double)>& s, const DensityGrid& rho0,
                                       const DensityGrid& rho1) {
  struct H {
    const char* label;
    double (*h)(double);
  };
  static const H family[] = {
      {"1", [](double) { return 1.0; }},
      {"y", [](double y) { return y; }},
      {"y^2", [](double y) { return y * y; }},
      {"y^3", [](double y) { return y * y * y; }},
      {"sin y", [](double y) { return std::sin(y); }},
      {"cos y", [](double y) { return std::cos(y); }},
      {"exp(-y^2)", [](double y) { return std::exp(-y * y); }},
      {"tanh y", [](double y) { return std::tanh(y); }},
      {"|y|", [](double y) { return std::abs(y); }},
      {"1/(1+y^2)", [](double y) { return 1.0 / (1.0 + y * y); }},
  };
  std::vector<double> sx(rho0.size());
  for (std::size_t i = 0; i < rho0.size(); ++i) sx[i] = s(rho0.x(i));
  PushForwardResidual out;
  for (const H& h : family) {
    double lhs = rho1.integrate([&](double y, double r) { return h.h(y) * r; });
    std::vector<double> v(rho0.size());
    for (std::size_t i = 0; i < rho0.size(); ++i) v[i] = h.h(sx[i]) * rho0.values()[i];
    double rhs = rho0.integrate(v);
    out.residuals.push_back(std::abs(lhs - rhs));
    out.labels.emplace_back(h.label);
    out.max_residual = std::max(out.max_residual, out.residuals.back());
  }
  return out;
}

// --- energies ------------------------------------------------------------------

ScalarFunction entropy_energy() {
  return {[](double x) { return x > 0.0 ? x * std::log(x) : 0.0; },
          [](double x) { return x > 0.0 ? std::log(x) + 1.0 : -std::numeric_limits<double>::infinity(); },
          [](double x) { return x > 0.0 ? 1.0 / x : std::numeric_limits<double>::infinity(); }, "x log x",
          "entropy"};
}

ScalarFunction power_energy(double g) {
  if (!(g > 0.0) || g == 1.0) throw InvalidInput("power energy needs gamma > 0, gamma != 1");
  std::ostringstream label;
  label << "x^" << g;
  return {[g](double x) { return x > 0.0 ? std::pow(x, g) : 0.0; },
          [g](double x) { return x > 0.0 ? g * std::pow(x, g - 1.0) : (g > 1.0 ? 0.0 : -HUGE_VAL); },
          [g](double x) { return x > 0.0 ? g * (g - 1.0) * std::pow(x, g - 2.0) : HUGE_VAL; }, label.str(), "power"};
}

ScalarFunction quadratic_potential(double k, double c) {
  std::ostringstream label;
  label << k << "(x-" << c << ")^2/2";
  return {[k, c](double x) { return 0.5 * k * (x - c) * (x - c); }, [k, c](double x) { return k * (x - c); },
          [k](double) { return k; }, label.str(), "quadratic"};
}

ScalarFunction zero_function() {
  auto z = [](double) { return 0.0; };
  return {z, z, z, "0", "zero"};
}

void EnergySpec::validate() const {
  for (int i = 1; i <= 50; ++i) {
    double x = 0.2 * i;
    double w = W(x), wm = W(-x);
    if (std::abs(w - wm) > 1e-12 * std::max(1.0, std::abs(w))) throw InvalidInput("interaction potential W must be even");
    double hstep = 1e-5 * x;
    double fd = (F(x + hstep) - F(x - hstep)) / (2.0 * hstep);
    double pf = x * fd - F(x);
    if (std::abs(pf - pressure(x)) > 1e-5 * std::max(1.0, std::abs(pressure(x))))
      throw InvalidInput("F' inconsistent with F (pressure check)");
  }
}

EnergySpec EnergySpec::gaussian(double k) {
  EnergySpec s;
  s.F = entropy_energy();
  s.V = quadratic_potential(k);
  s.mu = k;
  return s;
}

YoungPair YoungPair::quadratic(double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  YoungPair p;
  p.c = {[sigma](double x) { return x * x / (2.0 * sigma); }, [sigma](double x) { return x / sigma; },
         [sigma](double) { return 1.0 / sigma; }, "|x|^2/(2 sigma)", "quadratic"};
  p.cstar = {[sigma](double y) { return sigma * y * y / 2.0; }, [sigma](double y) { return sigma * y; },
             [sigma](double) { return sigma; }, "sigma |y|^2/2", "quadratic"};
  p.sigma = sigma;
  return p;
}

YoungPair YoungPair::power(double p) {
  if (!(p > 1.0)) throw InvalidInput("Young power must exceed 1");
  const double q = p / (p - 1.0);
  YoungPair y;
  auto make = [](double e, std::string label) {
    return ScalarFunction{[e](double x) { return std::pow(std::abs(x), e) / e; },
                          [e](double x) { return std::copysign(std::pow(std::abs(x), e - 1.0), x); },
                          [e](double x) { return (e - 1.0) * std::pow(std::abs(x), e - 2.0); }, std::move(label),
                          "power"};
  };
  y.c = make(p, "|x|^p/p");
  y.cstar = make(q, "|y|^q/q");
  if (p == 2.0) y.sigma = 1.0;
  return y;
}

double YoungPair::young_violation(const std::vector<double>& grid) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (double x : grid)
    for (double y : grid) worst = std::max(worst, x * y - c(x) - cstar(y));
  return worst;
}

namespace {

bool has_interaction(const EnergySpec& s) { return s.W.kind != "zero"; }

// (W' * rho)(x_i) or (K * rho)(x_i) by the trapezoid rule.
std::vector<double> convolve(const DensityGrid& rho, const std::function<double(double)>& K) {
  if (rho.geometry() != Geometry::line) throw InvalidInput("interaction terms are implemented on the line only");
  const std::size_t N = rho.size();
  std::vector<double> out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      double w = (j == 0 || j + 1 == N) ? 0.5 : 1.0;
      s += w * K(rho.x(i) - rho.x(j)) * rho.values()[j];
    }
    out[i] = s * rho.spacing();
  }
  return out;
}

FreeEnergy energy_terms(const DensityGrid& rho, const EnergySpec& spec) {
  FreeEnergy e;
  e.internal = rho.integrate([&](double, double r) { return spec.F(r); });
  e.potential = rho.integrate([&](double x, double r) { return r * spec.V(x); });
  if (has_interaction(spec)) {
    std::vector<double> c = convolve(rho, spec.W.f);
    std::vector<double> v(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) v[i] = 0.5 * c[i] * rho.values()[i];
    e.interaction = rho.integrate(v);
  }
  e.total = e.internal + e.potential + e.interaction;
  return e;
}

EntropyProduction production_terms(const DensityGrid& rho, const EnergySpec& spec, const YoungPair& young) {
  const std::size_t N = rho.size();
  const auto& r = rho.values();
  std::vector<double> phi(N);
  std::vector<bool> bad(N, false);
  for (std::size_t i = 0; i < N; ++i) {
    phi[i] = spec.F.df(r[i]);
    if (!(r[i] > 0.0) || !std::isfinite(phi[i])) {
      bad[i] = true;
      phi[i] = 0.0;
    }
  }
  std::vector<double> dphi = rho.gradient(phi);
  std::vector<double> dw;
  if (has_interaction(spec)) dw = convolve(rho, spec.W.df);
  EntropyProduction out;
  // Support cut by the grid: rho jumps to zero outside, so grad F'(rho) carries a delta.
  const double peak = *std::max_element(r.begin(), r.end());
  bool open_lo = rho.geometry() == Geometry::line && r.front() > 1e-8 * peak;
  bool open_hi = r.back() > 1e-8 * peak;
  bool vanishing_edge = false;
  if (spec.F.kind == "entropy")
    for (std::size_t i = 0; i + 1 < N; ++i) vanishing_edge |= bad[i] != bad[i + 1];
  if (open_lo || open_hi || vanishing_edge) {
    out.divergent = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<double> v(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t a = i >= 2 ? i - 2 : 0, b = std::min(N - 1, i + 4);
    bool masked = false;
    for (std::size_t j = a; j <= b && !masked; ++j) masked = bad[j];
    if (masked) {
      ++out.masked;
      continue;
    }
    double g = dphi[i] + spec.V.df(rho.x(i)) + (dw.empty() ? 0.0 : dw[i]);
    v[i] = r[i] * young.cstar(-g);
  }
  out.value = rho.integrate(v);
  return out;
}

}  // namespace

FreeEnergy free_energy(const DensityGrid& rho, const EnergySpec& spec) {
  if (rho.geometry() != Geometry::line && has_interaction(spec))
    throw InvalidInput("radial interaction energy is not implemented; use W = 0");
  FreeEnergy fine = energy_terms(rho, spec);
  FreeEnergy coarse = energy_terms(rho.coarsened(), spec);
  fine.error = std::abs(fine.total - coarse.total);
  return fine;
}

EntropyProduction entropy_production(const DensityGrid& rho, const EnergySpec& spec, const YoungPair& young) {
  EntropyProduction fine = production_terms(rho, spec, young);
  if (fine.divergent) return fine;
  EntropyProduction coarse = production_terms(rho.coarsened(), spec, young);
  fine.error = std::abs(fine.value - coarse.value);
  return fine;
}

namespace {

void require_master_family(const DensityGrid& rho0, const EnergySpec& spec, const YoungPair& young) {
  if (rho0.geometry() != Geometry::line) throw InvalidInput("unsupported: the master inequality is implemented on the line");
  if (spec.F.kind != "entropy" && spec.F.kind != "power")
    throw InvalidInput("unsupported: F must be x log x or x^gamma");
  if (spec.V.kind != "quadratic" && spec.V.kind != "zero") throw InvalidInput("unsupported: V must be quadratic");
  if (spec.W.kind != "quadratic" && spec.W.kind != "zero") throw InvalidInput("unsupported: W must be quadratic");
  if (!young.is_quadratic()) throw InvalidInput("unsupported: the Young function must be quadratic");
}

}  // namespace

CheckOutcome check_master_inequality(const DensityGrid& rho0, const DensityGrid& rho1, const EnergySpec& spec,
                                     const YoungPair& young, double lambda) {
  require_master_family(rho0, spec, young);
  spec.validate();
  const double n = 1.0;
  EnergySpec shifted = spec;
  shifted.V = {[&](double x) { return spec.V(x) + young.c(x); }, nullptr, nullptr, "V+c", "custom"};
  FreeEnergy h0 = free_energy(rho0, shifted);
  FreeEnergy h1 = free_energy(rho1, shifted);
  Estimate w = wasserstein_1d(rho0, rho1);
  const double db = rho0.barycenter() - rho1.barycenter();
  const double lhs =
      h0.total - h1.total + 0.5 * (lambda + spec.nu) * w.value * w.value - 0.5 * spec.nu * db * db;

  EnergySpec rhs_spec;
  rhs_spec.F = {[&](double x) { return -n * spec.pressure(x); }, nullptr, nullptr, "-n P_F", "custom"};
  rhs_spec.V = {[&](double x) { return young.c(x) + x * spec.V.df(x); }, nullptr, nullptr, "c + x V'", "custom"};
  if (has_interaction(spec))
    rhs_spec.W = {[&](double x) { return 2.0 * x * spec.W.df(x); }, nullptr, nullptr, "2 x W'", "custom"};
  FreeEnergy hr = free_energy(rho0, rhs_spec);
  EntropyProduction I = entropy_production(rho0, spec, young);
  const double rhs = hr.total + I.value;
  const double err = h0.error + h1.error + hr.error + I.error + std::abs(lambda + spec.nu) * w.value * w.error +
                     1e-9 * (std::abs(lhs) + std::abs(rhs));
  CheckOutcome c = make_outcome(rhs, lhs, err);
  c.note = "right-hand energy read literally: internal -n P_F, potential c + x V', kernel 2 x W'";
  return c;
}

double gaussian_log_sobolev_constant(int n, double sigma) {
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma);
}

CheckOutcome check_energy_entropy(const DensityGrid& rho, const ScalarFunction& F, const YoungPair& young,
                                  std::optional<double> K_c) {
  const int n = rho.dimension();
  std::string source = "supplied";
  if (!K_c) {
    if (F.kind != "entropy" || !young.is_quadratic())
      throw InvalidInput("unsupported: K_c must be supplied for this (F, c)");
    K_c = gaussian_log_sobolev_constant(n, young.sigma);
    source = "Gaussian log-Sobolev value -(n/2) log(2 pi sigma)";
  }
  EnergySpec spec;
  spec.F = F;
  auto guarded = [&](const DensityGrid& g) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      double r = g.values()[i];
      v[i] = r > 0.0 ? F(r) + n * (r * F.df(r) - F(r)) : 0.0;
    }
    return g.integrate(v);
  };
  double lhs = guarded(rho);
  double lhs_c = guarded(rho.coarsened());
  EntropyProduction I = entropy_production(rho, spec, young);
  CheckOutcome c = make_outcome(I.value + *K_c, lhs, std::abs(lhs - lhs_c) + I.error + 1e-9 * std::abs(lhs));
  c.note = "K_c source: " + source;
  return c;
}

// --- Sobolev duality ------------------------------------------------------------

double sobolev_sup_value(int n, double t) {
  if (n < 3) throw InvalidInput("Sobolev duality needs n >= 3");
  if (!(t > 0.0)) throw InvalidInput("profile scale must be positive");
  const double A = sphere_area(n);
  auto raw = [n, t](double r) { return std::pow(t, n) * std::pow(1.0 + t * t * r * r, -double(n)); };
  const double Z = A * integrate_half_line([&](double r) { return raw(r) * std::pow(r, n - 1); }).value;
  const double e = (n - 1.0) / n;
  const double a =
      A * integrate_half_line([&](double r) { return std::pow(raw(r) / Z, e) * std::pow(r, n - 1); }).value;
  const double b = A * integrate_half_line([&](double r) { return r * r * raw(r) / Z * std::pow(r, n - 1); }).value;
  return n * (n - 2.0) / (n - 1.0) * a - b;
}

double sobolev_inf_value(int n, double t, double amplitude) {
  if (n < 3) throw InvalidInput("Sobolev duality needs n >= 3");
  if (!(t > 0.0)) throw InvalidInput("profile scale must be positive");
  const double A = sphere_area(n);
  const double k = (n - 2.0) / 2.0, p = 2.0 * n / (n - 2.0);
  auto f = [&](double r) { return amplitude * std::pow(1.0 + t * t * r * r, -k); };
  auto df = [&](double r) { return -amplitude * k * 2.0 * t * t * r * std::pow(1.0 + t * t * r * r, -k - 1.0); };
  const double grad = A * integrate_half_line([&](double r) { return df(r) * df(r) * std::pow(r, n - 1); }).value;
  const double norm =
      A * integrate_half_line([&](double r) { return std::pow(std::abs(f(r)), p) * std::pow(r, n - 1); }).value;
  return grad / std::pow(norm, 2.0 / p);
}

double yamabe_residual(int n) {
  if (n < 3) throw InvalidInput("the Yamabe equation needs n >= 3");
  const double kappa = std::pow(n * (n - 2.0), (n - 2.0) / 4.0);
  const double e = (n + 2.0) / (n - 2.0);
  const Expr r = Expr::r();
  const Expr f = Expr::constant(kappa) * pow(Expr::constant(1.0) + r * r, -(n - 2.0) / 2.0);
  const Expr f1 = derivative(f);
  const Expr f2 = derivative(f1);
  const double scale = std::pow(kappa, e);
  double worst = 0.0;
  for (int i = 1; i <= 2000; ++i) {
    double x = 20.0 * i / 2000.0;
    double res = f2(x) + (n - 1.0) * f1(x) / x + std::pow(f(x), e);
    worst = std::max(worst, std::abs(res) / scale);
  }
  return worst;
}

namespace {

// Golden-section search for the maximum of g on [a, b] after a coarse scan.
std::pair<double, double> maximize(const std::function<double(double)>& g, double a, double b) {
  const int scan = 16;
  double best_t = a, best = -HUGE_VAL;
  std::vector<double> ts(scan);
  for (int i = 0; i < scan; ++i) {
    ts[i] = a * std::pow(b / a, double(i) / (scan - 1));
    double v = g(ts[i]);
    if (v > best) {
      best = v;
      best_t = ts[i];
    }
  }
  auto idx = std::size_t(std::find(ts.begin(), ts.end(), best_t) - ts.begin());
  double lo = ts[idx == 0 ? 0 : idx - 1], hi = ts[std::min<std::size_t>(idx + 1, scan - 1)];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  double gc = g(c), gd = g(d);
  while (hi - lo > 1e-7 * hi) {
    if (gc > gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - phi * (hi - lo);
      gc = g(c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + phi * (hi - lo);
      gd = g(d);
    }
  }
  double t = gc > gd ? c : d, v = std::max(gc, gd);
  if (best > v) return {best_t, best};
  return {t, v};
}

}  // namespace

DualityGap sobolev_duality_gap(int n, double t_lo, double t_hi) {
  if (n < 3) throw InvalidInput("Sobolev duality needs n >= 3");
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw InvalidInput("invalid profile scale range");
  DualityGap d;
  auto [ts, vs] = maximize([n](double t) { return sobolev_sup_value(n, t); }, t_lo, t_hi);
  auto [ti, vi] = maximize([n](double t) { return -sobolev_inf_value(n, t); }, t_lo, t_hi);
  d.sup_side = vs;
  d.sup_t = ts;
  d.inf_side = -vi;
  d.inf_t = ti;
  d.gap = d.inf_side - d.sup_side;
  d.yamabe_residual = yamabe_residual(n);
  return d;
}

// --- HWBI family --------------------------------------------------------------

HwbiMode hwbi_mode_from_string(const std::string& s) {
  if (s == "hwbi") return HwbiMode::hwbi;
  if (s == "hwi") return HwbiMode::hwi;
  if (s == "talagrand") return HwbiMode::talagrand;
  if (s == "log_sobolev" || s == "log-sobolev") return HwbiMode::log_sobolev;
  throw InvalidInput("unknown mode '" + s + "' (hwbi | hwi | talagrand | log_sobolev)");
}

CheckOutcome check_hwbi(const DensityGrid& rho0, const DensityGrid& rho1, const EnergySpec& spec, HwbiMode mode) {
  if (rho0.geometry() != Geometry::line) throw InvalidInput("HWBI checks are implemented on the line");
  spec.validate();
  FreeEnergy h0 = free_energy(rho0, spec);
  FreeEnergy h1 = free_energy(rho1, spec);
  const double H = h0.total - h1.total;
  const double Herr = h0.error + h1.error;
  Estimate w = wasserstein_1d(rho0, rho1);
  const double W = w.value;
  CheckOutcome c;
  switch (mode) {
    case HwbiMode::hwbi:
    case HwbiMode::hwi: {
      EntropyProduction I = entropy_production(rho0, spec, YoungPair::quadratic(2.0));
      const double sqI = std::sqrt(std::max(I.value, 0.0));
      const double nu = mode == HwbiMode::hwbi ? spec.nu : 0.0;
      const double db = mode == HwbiMode::hwbi ? rho0.barycenter() - rho1.barycenter() : 0.0;
      const double rhs = I.divergent ? HUGE_VAL : W * sqI - 0.5 * (spec.mu + nu) * W * W + 0.5 * nu * db * db;
      const double err = Herr + w.error * (sqI + std::abs(spec.mu + nu) * W) +
                         (sqI > 0 ? W * I.error / (2.0 * sqI) : std::sqrt(I.error) * W) +
                         1e-9 * (std::abs(H) + std::abs(rhs));
      c = make_outcome(rhs, H, err);
      if (spec.mu + nu <= 0.0) c.note = "mu + nu <= 0: the inequality may be vacuous";
      break;
    }
    case HwbiMode::talagrand: {
      if (!(spec.mu > 0.0)) throw InvalidInput("Talagrand mode needs mu > 0");
      c = make_outcome(2.0 / spec.mu * H, W * W,
                       2.0 / spec.mu * Herr + 2.0 * W * w.error + 1e-9 * (std::abs(H) + W * W));
      break;
    }
    case HwbiMode::log_sobolev: {
      if (!(spec.mu > 0.0)) throw InvalidInput("log-Sobolev mode needs mu > 0");
      EntropyProduction I = entropy_production(rho0, spec, YoungPair::quadratic(2.0));
      c = make_outcome(I.value / (2.0 * spec.mu), H,
                       I.error / (2.0 * spec.mu) + Herr + 1e-9 * (std::abs(H) + std::abs(I.value)));
      break;
    }
  }
  return c;
}

}  // namespace fineq

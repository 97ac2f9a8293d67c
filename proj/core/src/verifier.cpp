#include "fineq/verifier.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "fineq/error.hpp"

namespace fineq {

const char* to_string(Smoothness s) {
  switch (s) {
    case Smoothness::h1_0:
      return "H1_0";
    case Smoothness::h1:
      return "H1";
    case Smoothness::h2:
      return "H2";
  }
  return "H1";
}

RadialTestFunction::RadialTestFunction(Fn u, Fn du, Fn d2u, double R, Smoothness tag, std::string label,
                                       std::vector<double> knots)
    : u_(std::move(u)),
      du_(std::move(du)),
      d2u_(std::move(d2u)),
      R_(R),
      tag_(tag),
      label_(std::move(label)),
      knots_(std::move(knots)) {
  if (!(R_ > 0.0) || !std::isfinite(R_)) throw InvalidInput("profile support must be positive and finite");
}

RadialTestFunction RadialTestFunction::symbolic(const Expr& u, double R, Smoothness tag, std::string label) {
  Expr du = derivative(u);
  Expr d2u = derivative(du);
  if (label.empty()) label = u.str();
  return RadialTestFunction([u](double r) { return u(r); }, [du](double r) { return du(r); },
                            [d2u](double r) { return d2u(r); }, R, tag, std::move(label));
}

RadialTestFunction RadialTestFunction::spline(const std::vector<double>& values, double R, double slope_left,
                                              double slope_right, Smoothness tag, std::string label) {
  if (values.size() < 4) throw InvalidInput("spline needs at least 4 nodes");
  const double h = R / double(values.size() - 1);
  auto s = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(values.begin(), values.end(), 0.0, h,
                                                                          slope_left, slope_right);
  std::vector<double> knots;
  for (std::size_t j = 1; j + 1 < values.size(); ++j) knots.push_back(j * h);
  auto clamp = [R](double r) { return std::clamp(r, 0.0, R); };
  return RadialTestFunction([s, clamp](double r) { return (*s)(clamp(r)); },
                            [s, clamp](double r) { return s->prime(clamp(r)); },
                            [s, clamp](double r) { return s->double_prime(clamp(r)); }, R, tag, std::move(label),
                            std::move(knots));
}

RadialTestFunction RadialTestFunction::ode_profile(const SolutionTrace& trace, double cut, std::string label) {
  if (trace.size() < 2) throw InvalidInput("empty solution trace");
  if (!(cut > trace.start_radius()) || cut > trace.radii().back())
    throw InvalidInput("truncation radius outside the solution trace");
  auto tr = std::make_shared<SolutionTrace>(trace);
  const double r0 = trace.start_radius();
  const double y0 = trace.values().front();
  const double s = trace.start().exponent;
  auto eval = [tr, r0, y0, s, cut](double r, int k) -> double {
    if (r >= cut) return 0.0;
    if (r <= r0) {
      double y = y0 * std::pow(r / r0, s);
      return k == 0 ? y : k == 1 ? s * y / r : s * (s - 1.0) * y / (r * r);
    }
    auto [y, dy] = tr->sample(r);
    if (k == 0) return y;
    if (k == 1) return dy;
    const auto& c = tr->coefficients();
    return -c.a(r) * dy - c.b(r) * y;
  };
  if (label.empty()) label = "ode_profile";
  std::vector<double> knots = {r0, cut};
  return RadialTestFunction([eval](double r) { return eval(r, 0); }, [eval](double r) { return eval(r, 1); },
                            [eval](double r) { return eval(r, 2); }, cut, Smoothness::h1_0, std::move(label),
                            std::move(knots));
}

RadialTestFunction RadialTestFunction::zero(double R) {
  auto z = [](double) { return 0.0; };
  return RadialTestFunction(z, z, z, R, Smoothness::h2, "zero");
}

RadialTestFunction RadialTestFunction::read_csv(std::istream& is, Smoothness tag, std::string label) {
  std::vector<double> rs, us;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double r, u;
    if (!(row >> r >> u)) {
      if (rs.empty()) continue;  // header
      throw InvalidInput("malformed profile row: " + line);
    }
    rs.push_back(r);
    us.push_back(u);
  }
  if (rs.size() < 4) throw InvalidInput("profile CSV needs at least 4 rows");
  if (rs.front() != 0.0) throw InvalidInput("profile CSV must start at r = 0");
  const double h = rs[1] - rs[0];
  for (std::size_t i = 1; i < rs.size(); ++i)
    if (std::abs(rs[i] - rs[i - 1] - h) > 1e-9 * rs.back()) throw InvalidInput("profile CSV must be uniformly spaced");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return spline(us, rs.back(), nan, nan, tag, std::move(label));
}

RadialTestFunction RadialTestFunction::scaled(double c) const {
  auto u = u_, du = du_, d2u = d2u_;
  return RadialTestFunction([u, c](double r) { return c * u(r); }, [du, c](double r) { return c * du(r); },
                            [d2u, c](double r) { return c * d2u(r); }, R_, tag_, label_, knots_);
}

void RadialTestFunction::write_csv(std::ostream& os, int points) const {
  os << "r,u\n";
  os.precision(17);
  for (int i = 0; i < points; ++i) {
    double r = R_ * i / (points - 1);
    os << r << ',' << u_(r) << '\n';
  }
}

// --- profile family ---------------------------------------------------------------

namespace {

// f(s) (1 - s^2)^2 with s = r/R, from f and its derivatives in s.
RadialTestFunction damped(std::function<double(double, int)> f, double R, std::string label) {
  auto eval = [f, R](double r, int k) {
    double s = r / R, q = 1.0 - s * s;
    double g = q * q, g1 = -4.0 * s * q, g2 = -4.0 + 12.0 * s * s;
    double f0 = f(s, 0), f1 = f(s, 1), f2 = f(s, 2);
    if (k == 0) return f0 * g;
    if (k == 1) return (f1 * g + f0 * g1) / R;
    return (f2 * g + 2.0 * f1 * g1 + f0 * g2) / (R * R);
  };
  return RadialTestFunction([eval](double r) { return eval(r, 0); }, [eval](double r) { return eval(r, 1); },
                            [eval](double r) { return eval(r, 2); }, R, Smoothness::h2, std::move(label));
}

double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<RadialTestFunction> profile_family(double R, std::uint64_t seed) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("family radius must be positive and finite");
  std::vector<RadialTestFunction> fam;
  fam.reserve(50);
  const Expr s = Expr::r() / Expr::constant(R);
  const Expr q = Expr::constant(1.0) - s * s;
  const Expr one = Expr::constant(1.0);

  for (int p = 2; p <= 6; ++p)
    fam.push_back(RadialTestFunction::symbolic(pow(q, p), R, Smoothness::h2, "bump_p" + std::to_string(p)));
  fam.push_back(RadialTestFunction::symbolic(pow(s, 2) * pow(q, 2), R, Smoothness::h2, "bump_s2q2"));
  fam.push_back(RadialTestFunction::symbolic(pow(s, 4) * pow(q, 2), R, Smoothness::h2, "bump_s4q2"));
  fam.push_back(RadialTestFunction::symbolic(pow(q, 2) * (one + Expr::constant(2.0) * pow(s, 2)), R,
                                             Smoothness::h2, "bump_q2_rise"));
  fam.push_back(RadialTestFunction::symbolic(pow(q, 2) * (one - Expr::constant(0.5) * pow(s, 2)), R,
                                             Smoothness::h2, "bump_q2_fall"));
  fam.push_back(RadialTestFunction::symbolic(pow(s, 2) * pow(q, 3), R, Smoothness::h2, "bump_s2q3"));

  // Near-extremal: ((eps + s^2)^{-1/4} - (eps + 1)^{-1/4}) (1 - s^2) ~ r^{-1/2}.
  for (int k = 1; k <= 5; ++k) {
    double eps = std::pow(10.0, -k);
    Expr e = (pow(Expr::constant(eps) + s * s, -0.25) - Expr::constant(std::pow(eps + 1.0, -0.25))) * q;
    fam.push_back(RadialTestFunction::symbolic(e, R, Smoothness::h2, "near_extremal_" + std::to_string(k)));
  }

  // Bessel-type: J0(w s) (1 - s^2)^2.
  for (int i = 0; i < 10; ++i) {
    double w = 2.404825557695773 * (0.4 + 0.15 * i);
    auto f = [w](double x, int k) {
      double z = w * x;
      if (k == 0) return std::cyl_bessel_j(0.0, z);
      if (k == 1) return -w * std::cyl_bessel_j(1.0, z);
      double j1_over_z = z < 1e-8 ? 0.5 : std::cyl_bessel_j(1.0, z) / z;
      return w * w * (-std::cyl_bessel_j(0.0, z) + j1_over_z);
    };
    fam.push_back(damped(f, R, "bessel_" + std::to_string(i)));
  }

  std::mt19937_64 gen(seed);
  for (int i = 0; i < 25; ++i) {
    int nodes = 6 + int(uniform01(gen) * 10.0);
    std::vector<double> v(nodes);
    double level = 0.2 + 0.8 * uniform01(gen);
    for (int j = 0; j + 1 < nodes; ++j) v[j] = level * (0.25 + uniform01(gen)) * (1.0 - double(j) / (nodes - 1));
    v.back() = 0.0;
    fam.push_back(RadialTestFunction::spline(v, R, 0.0, 0.0, Smoothness::h2, "spline_" + std::to_string(i)));
  }
  return fam;
}

std::vector<RadialTestFunction> interval_family(std::uint64_t seed) {
  std::vector<RadialTestFunction> out;
  for (const auto& u : profile_family(1.0, seed)) {
    out.emplace_back([u](double x) { return x * u(x); }, [u](double x) { return u(x) + x * u.d1(x); },
                     [u](double x) { return 2.0 * u.d1(x) + x * u.d2(x); }, 1.0, u.tag(), "x*" + u.label(),
                     u.knots());
  }
  return out;
}

// --- integrals ------------------------------------------------------------------

Integral ball_integral(const RadialTestFunction& u, int n, const std::function<double(double)>& integrand) {
  if (n < 1) throw InvalidInput("dimension must be >= 1");
  const double area = sphere_area(n);
  Integral I = integrate_from_origin([&](double r) { return integrand(r) * std::pow(r, n - 1); }, u.support(),
                                     u.knots());
  return {area * I.value, area * I.error};
}

WeightedIntegrals weighted_integrals(const RadialTestFunction& u, const WeightExpr& V, int n) {
  WeightedIntegrals out;
  out.gradient = ball_integral(u, n, [&](double r) { return V(r) * u.d1(r) * u.d1(r); });
  out.mass = ball_integral(u, n, [&](double r) { return V(r) * u(r) * u(r); });
  out.laplacian = ball_integral(u, n, [&](double r) {
    double L = u.laplacian(r, n);
    return V(r) * L * L;
  });
  return out;
}

CheckOutcome make_outcome(double lhs, double rhs, double error) {
  CheckOutcome c;
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = lhs - rhs;
  c.error = error;
  c.pass = c.margin >= -error;
  return c;
}

namespace {

void require_support(const RadialTestFunction& u, double R) {
  if (!(R > 0.0)) throw InvalidInput("radius must be positive");
  if (u.support() > R * (1.0 + 1e-12)) throw InvalidInput("profile support exceeds the ball radius");
}

void require_vanishing(const RadialTestFunction& u) {
  double scale = 0.0;
  for (int i = 0; i <= 16; ++i) scale = std::max(scale, std::abs(u(u.support() * i / 16.0)));
  if (std::abs(u.boundary_value()) > 1e-10 * std::max(scale, 1e-300))
    throw InvalidInput("profile must vanish at the boundary (H1_0-like)");
}

}  // namespace

CheckOutcome check_improved_hardy(const WeightExpr& P, const RadialTestFunction& u, int n, double R) {
  require_support(u, R);
  require_vanishing(u);
  const double h = (n - 2.0) * (n - 2.0) / 4.0;
  Integral grad = ball_integral(u, n, [&](double r) { return u.d1(r) * u.d1(r); });
  Integral hardy =
      h == 0.0 ? Integral{} : ball_integral(u, n, [&](double r) { return u(r) * u(r) / (r * r); });
  Integral pot = P.is_zero() ? Integral{} : ball_integral(u, n, [&](double r) { return P(r) * u(r) * u(r); });
  return make_outcome(grad.value - h * hardy.value, pot.value, grad.error + h * hardy.error + pot.error);
}

CheckOutcome check_hardy_rellich_radial(const WeightExpr& V, const WeightExpr& W, const RadialTestFunction& u,
                                        int n, double R) {
  require_support(u, R);
  if (u.tag() != Smoothness::h2) throw InvalidInput("Hardy-Rellich check needs an H2-like profile");
  require_vanishing(u);
  const Expr dV = derivative(V.expr());
  Integral lap = ball_integral(u, n, [&](double r) {
    double L = u.laplacian(r, n);
    return V(r) * L * L;
  });
  Integral rhs = ball_integral(u, n, [&](double r) {
    double g = u.d1(r);
    return (W(r) + (n - 1.0) * (V(r) / (r * r) - dV(r) / r)) * g * g;
  });
  return make_outcome(lap.value, rhs.value, lap.error + rhs.error);
}

CheckOutcome check_boundary_terms(const WeightExpr& V, const WeightExpr& W, const RadialTestFunction& u, int n,
                                  double R, BoundaryForm form) {
  require_support(u, R);
  const double surface = sphere_area(n) * std::pow(R, n - 1);
  const double uR = std::abs(u.support() - R) <= 1e-12 * R ? u.boundary_value() : 0.0;
  const double gR = std::abs(u.support() - R) <= 1e-12 * R ? u.boundary_slope() : 0.0;
  CheckOutcome c;
  if (form == BoundaryForm::first_order) {
    Integral grad = ball_integral(u, n, [&](double r) { return V(r) * u.d1(r) * u.d1(r); });
    Integral mass = ball_integral(u, n, [&](double r) { return W(r) * u(r) * u(r); });
    const double boundary = surface * uR * uR;
    const double deficit = mass.value - grad.value;
    const double err = grad.error + mass.error;
    double theta = 0.0;
    if (deficit > err) {
      if (boundary <= 0.0) {
        c = make_outcome(grad.value, mass.value, err);
        c.note = "no finite theta: the boundary term vanishes on this profile";
        return c;
      }
      theta = deficit / boundary;
    }
    c = make_outcome(grad.value, mass.value - theta * boundary, err);
    c.theta = theta;
    return c;
  }
  if (u.tag() != Smoothness::h2) throw InvalidInput("second-order boundary form needs an H2-like profile");
  const Expr dV = derivative(V.expr());
  Integral lap = ball_integral(u, n, [&](double r) {
    double L = u.laplacian(r, n);
    return V(r) * L * L;
  });
  Integral rhs = ball_integral(u, n, [&](double r) {
    double g = u.d1(r);
    return (W(r) + (n - 1.0) * (V(r) / (r * r) - dV(r) / r)) * g * g;
  });
  const double boundary = V(R) * surface * gR * gR;
  const double err = lap.error + rhs.error;
  double theta = 0.0;
  const double need = rhs.value + (n - 1.0) * boundary - lap.value;
  if (need > err) {
    if (boundary <= 0.0) {
      c = make_outcome(lap.value, rhs.value + (n - 1.0) * boundary, err);
      c.note = "no finite theta: the boundary term vanishes on this profile";
      return c;
    }
    theta = need / boundary;
  }
  c = make_outcome(lap.value, rhs.value + ((n - 1.0) - theta) * boundary, err);
  c.theta = theta;
  c.note = "boundary coefficient read as ((n-1) - theta) V(R)";
  return c;
}

CheckOutcome check_E_weight(const WeightExpr& E, EWeightMode mode, const RadialTestFunction& u, int n) {
  const double R = u.support();
  require_vanishing(u);
  const Expr dE = derivative(E.expr());
  const Expr d2E = derivative(dE);
  for (int i = 1; i < 1000; ++i) {
    double r = R * std::pow(1e-8, 1.0 - i / 1000.0);
    if (!(E(r) > 0.0)) throw InvalidInput("E must be positive inside the ball");
  }
  if (mode == EWeightMode::interior) {
    double near = E(1e-10 * R), mid = E(0.5 * R);
    if (!(near > 1e3 * std::abs(mid))) throw InvalidInput("interior mode needs E -> +inf at the origin");
  } else {
    double scale = std::abs(E(0.5 * R));
    if (std::abs(E(R)) > 1e-10 * scale) throw InvalidInput("boundary mode needs E = 0 on the boundary");
    for (int i = 1; i < 1000; ++i) {
      double r = R * i / 1000.0;
      double lap = d2E(r) + (n - 1.0) * dE(r) / r;
      if (lap > 1e-10 * std::max(1.0, std::abs(d2E(r)))) throw InvalidInput("-Delta E must be nonnegative");
    }
  }
  Integral grad = ball_integral(u, n, [&](double r) { return u.d1(r) * u.d1(r); });
  Integral weight = ball_integral(u, n, [&](double r) {
    double q = dE(r) / E(r);
    return 0.25 * q * q * u(r) * u(r);
  });
  Integral extra;
  if (mode == EWeightMode::boundary) {
    extra = ball_integral(u, n, [&](double r) {
      double mu = -(d2E(r) + (n - 1.0) * dE(r) / r);
      return 0.5 * u(r) * u(r) / E(r) * mu;
    });
  }
  return make_outcome(grad.value, weight.value + extra.value, grad.error + weight.error + extra.error);
}

CheckOutcome check_distance_hardy(int k, const RadialTestFunction& u, int n, double R) {
  if (k == 2) throw InvalidInput("co-dimension k = 2 is excluded");
  if (k != n) throw InvalidInput("the radial reduction covers M = {0} only, i.e. k = n");
  require_support(u, R);
  require_vanishing(u);
  const double c = (k - 2.0) * (k - 2.0) / 4.0;
  Integral grad = ball_integral(u, n, [&](double r) { return u.d1(r) * u.d1(r); });
  Integral dist = ball_integral(u, n, [&](double r) { return u(r) * u(r) / (r * r); });
  return make_outcome(grad.value, c * dist.value, grad.error + c * dist.error);
}

CheckOutcome check_distance_hardy_interval(const RadialTestFunction& u) {
  if (std::abs(u.support() - 1.0) > 1e-12) throw InvalidInput("interval form is posed on (0, 1)");
  if (std::abs(u(0.0)) > 1e-12 || std::abs(u(1.0)) > 1e-12) throw InvalidInput("u must vanish at 0 and 1");
  Integral a = integrate([&](double x) { return u.d1(x) * u.d1(x); }, 0.0, 0.5);
  Integral b = integrate([&](double x) { return u.d1(x) * u.d1(x); }, 0.5, 1.0);
  Integral c = integrate([&](double x) { return u(x) * u(x) / (x * x); }, 0.0, 0.5);
  Integral d = integrate([&](double x) { return u(x) * u(x) / ((1 - x) * (1 - x)); }, 0.5, 1.0);
  return make_outcome(a.value + b.value, 0.25 * (c.value + d.value), a.error + b.error + 0.25 * (c.error + d.error));
}

}  // namespace fineq

#include "fineq/weight_dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fineq/error.hpp"

namespace fineq {

struct Expr::Node {
  Kind kind;
  double value;
  Expr a;
  Expr b;
};

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double v) {
  return Expr(std::make_shared<const Node>(Node{Kind::constant, v, Expr(nullptr), Expr(nullptr)}));
}
Expr Expr::e() {
  return Expr(std::make_shared<const Node>(Node{Kind::named, std::numbers::e, Expr(nullptr), Expr(nullptr)}));
}
Expr Expr::pi() {
  return Expr(std::make_shared<const Node>(Node{Kind::named, std::numbers::pi, Expr(nullptr), Expr(nullptr)}));
}
Expr Expr::r() {
  return Expr(std::make_shared<const Node>(Node{Kind::variable, 0.0, Expr(nullptr), Expr(nullptr)}));
}

Expr Expr::binary(Kind k, const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Node>(Node{k, 0.0, a, b}));
}
Expr Expr::unary(Kind k, const Expr& a, double v) {
  return Expr(std::make_shared<const Node>(Node{k, v, a, Expr(nullptr)}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

bool Expr::is_constant(double v) const { return kind() == Kind::constant && value() == v; }

bool Expr::depends_on_r() const {
  switch (kind()) {
    case Kind::constant:
    case Kind::named:
      return false;
    case Kind::variable:
      return true;
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div:
      return lhs().depends_on_r() || rhs().depends_on_r();
    default:
      return lhs().depends_on_r();
  }
}

double Expr::operator()(double r) const {
  switch (kind()) {
    case Kind::constant:
    case Kind::named:
      return value();
    case Kind::variable:
      return r;
    case Kind::add:
      return lhs()(r) + rhs()(r);
    case Kind::sub:
      return lhs()(r) - rhs()(r);
    case Kind::mul:
      return lhs()(r) * rhs()(r);
    case Kind::div:
      return lhs()(r) / rhs()(r);
    case Kind::neg:
      return -lhs()(r);
    case Kind::pow:
      return std::pow(lhs()(r), value());
    case Kind::log:
      return std::log(lhs()(r));
    case Kind::exp:
      return std::exp(lhs()(r));
  }
  return 0.0;
}

bool Expr::operator==(const Expr& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::constant:
    case Kind::named:
      return value() == o.value();
    case Kind::variable:
      return true;
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div:
      return lhs() == o.lhs() && rhs() == o.rhs();
    case Kind::pow:
      return value() == o.value() && lhs() == o.lhs();
    default:
      return lhs() == o.lhs();
  }
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::add:
    case Expr::Kind::sub:
      return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div:
      return 2;
    case Expr::Kind::neg:
      return 3;
    case Expr::Kind::constant:
      return e.value() < 0 || std::signbit(e.value()) ? 3 : 4;
    default:
      return 4;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::constant:
      out += format_number(e.value());
      return;
    case K::named:
      out += e.value() == std::numbers::e ? "e" : "pi";
      return;
    case K::variable:
      out += 'r';
      return;
    case K::add:
    case K::sub:
    case K::mul:
    case K::div: {
      int p = precedence(e);
      print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      out += e.kind() == K::add ? " + " : e.kind() == K::sub ? " - " : e.kind() == K::mul ? "*" : "/";
      print_wrapped(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
    case K::neg:
      out += '-';
      print_wrapped(e.arg(), precedence(e.arg()) < 3 || e.arg().kind() == K::constant, out);
      return;
    case K::pow:
      out += "pow(";
      print(e.arg(), out);
      out += ',';
      out += format_number(e.value());
      out += ')';
      return;
    case K::log:
    case K::exp:
      out += e.kind() == K::log ? "log(" : "exp(";
      print(e.arg(), out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }

  Expr unary() {
    if (accept('-')) {
      skip();
      if (starts_number()) return Expr::constant(-number());
      return -unary();
    }
    return factor();
  }

  bool starts_number() const {
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '.' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]));
  }

  double number() {
    skip();
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        digits();
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  double signed_number() {
    skip();
    bool neg = accept('-');
    if (!neg) accept('+');
    skip();
    if (!starts_number()) fail("expected number");
    double v = number();
    return neg ? -v : v;
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Expr factor() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (starts_number()) return Expr::constant(number());
    if (accept('(')) {
      Expr e = expr();
      expect(')');
      return e;
    }
    std::size_t start = pos_;
    std::string id = identifier();
    if (id == "r") return Expr::r();
    if (id == "e") return Expr::e();
    if (id == "pi") return Expr::pi();
    if (id == "pow") {
      expect('(');
      Expr base = expr();
      expect(',');
      double k = signed_number();
      expect(')');
      return pow(base, k);
    }
    if (id == "log" || id == "exp") {
      expect('(');
      Expr a = expr();
      expect(')');
      return id == "log" ? log(a) : exp(a);
    }
    pos_ = start;
    if (id.empty()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    fail("unknown identifier '" + id + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// Simplifying constructors used only while building derivatives.
Expr s_neg(const Expr& a) {
  if (a.kind() == Expr::Kind::constant) return Expr::constant(-a.value());
  if (a.kind() == Expr::Kind::neg) return a.arg();
  return -a;
}
Expr s_add(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (a.kind() == Expr::Kind::constant && b.kind() == Expr::Kind::constant)
    return Expr::constant(a.value() + b.value());
  return a + b;
}
Expr s_sub(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return s_neg(b);
  if (a.kind() == Expr::Kind::constant && b.kind() == Expr::Kind::constant)
    return Expr::constant(a.value() - b.value());
  return a - b;
}
Expr s_mul(const Expr& a, const Expr& b) {
  using K = Expr::Kind;
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.kind() == K::constant && b.kind() == K::constant) return Expr::constant(a.value() * b.value());
  if (a.kind() == K::constant && b.kind() == K::mul && b.lhs().kind() == K::constant)
    return s_mul(Expr::constant(a.value() * b.lhs().value()), b.rhs());
  if (b.kind() == K::constant) return s_mul(b, a);
  return a * b;
}
Expr s_div(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  if (a.kind() == Expr::Kind::constant && b.kind() == Expr::Kind::constant)
    return Expr::constant(a.value() / b.value());
  return a / b;
}
Expr s_pow(const Expr& a, double k) {
  if (k == 0.0) return Expr::constant(1.0);
  if (k == 1.0) return a;
  if (a.kind() == Expr::Kind::constant) return Expr::constant(std::pow(a.value(), k));
  return pow(a, k);
}

// --- asymptotics -----------------------------------------------------------

Asymptotic unknown() { return Asymptotic{}; }

Asymptotic leading_constant(double c) {
  Asymptotic a;
  a.exact = true;
  a.vanishes = c == 0.0;
  a.coeff = c;
  return a;
}

bool is_bounded_constant(const Asymptotic& a) {
  return a.power == 0.0 && a.log_power == 0.0 && a.loglog_power == 0.0;
}

// +1 if x grows faster than y as r -> 0, -1 if slower, 0 if same order.
int compare_growth(const Asymptotic& x, const Asymptotic& y) {
  std::array<double, 3> gx{-x.power, x.log_power, x.loglog_power};
  std::array<double, 3> gy{-y.power, y.log_power, y.loglog_power};
  for (int i = 0; i < 3; ++i) {
    if (gx[i] > gy[i]) return 1;
    if (gx[i] < gy[i]) return -1;
  }
  return 0;
}

Asymptotic analyse(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::constant:
    case K::named:
      return leading_constant(e.value());
    case K::variable: {
      Asymptotic a = leading_constant(1.0);
      a.power = 1.0;
      return a;
    }
    case K::neg: {
      Asymptotic a = analyse(e.arg());
      a.coeff = -a.coeff;
      return a;
    }
    case K::add:
    case K::sub: {
      Asymptotic x = analyse(e.lhs());
      Asymptotic y = analyse(e.rhs());
      if (!x.exact || !y.exact) return unknown();
      if (e.kind() == K::sub) y.coeff = -y.coeff;
      if (x.vanishes) return y;
      if (y.vanishes) return x;
      int c = compare_growth(x, y);
      if (c > 0) return x;
      if (c < 0) return y;
      double sum = x.coeff + y.coeff;
      if (std::abs(sum) <= 1e-14 * (std::abs(x.coeff) + std::abs(y.coeff))) return unknown();
      x.coeff = sum;
      return x;
    }
    case K::mul:
    case K::div: {
      Asymptotic x = analyse(e.lhs());
      Asymptotic y = analyse(e.rhs());
      if (!x.exact || !y.exact) return unknown();
      if (x.vanishes) return x;
      if (y.vanishes) return e.kind() == K::mul ? y : unknown();
      double s = e.kind() == K::mul ? 1.0 : -1.0;
      x.coeff = e.kind() == K::mul ? x.coeff * y.coeff : x.coeff / y.coeff;
      x.power += s * y.power;
      x.log_power += s * y.log_power;
      x.loglog_power += s * y.loglog_power;
      return x;
    }
    case K::pow: {
      Asymptotic x = analyse(e.arg());
      double k = e.value();
      if (!x.exact) return unknown();
      if (x.vanishes) return k > 0 ? x : unknown();
      if (x.coeff < 0 && k != std::round(k)) return unknown();
      x.coeff = std::pow(x.coeff, k);
      x.power *= k;
      x.log_power *= k;
      x.loglog_power *= k;
      return x;
    }
    case K::log: {
      Asymptotic x = analyse(e.arg());
      if (!x.exact || x.vanishes || x.coeff <= 0) return unknown();
      Asymptotic a = leading_constant(1.0);
      if (x.power != 0.0) {
        // log(c r^p ...) ~ -p L
        a.coeff = -x.power;
        a.log_power = 1.0;
        return a;
      }
      if (x.log_power != 0.0) {
        a.coeff = x.log_power;
        a.loglog_power = 1.0;
        return a;
      }
      if (x.loglog_power != 0.0 || x.coeff == 1.0) return unknown();
      return leading_constant(std::log(x.coeff));
    }
    case K::exp: {
      Asymptotic x = analyse(e.arg());
      if (!x.exact) return unknown();
      if (x.vanishes) return leading_constant(1.0);
      int c = compare_growth(x, leading_constant(1.0));
      if (c < 0) return leading_constant(1.0);
      if (c == 0 && is_bounded_constant(x)) return leading_constant(std::exp(x.coeff));
      return unknown();
    }
  }
  return unknown();
}

double fit_singular_order(const Expr& e, double scale) {
  // Least-squares slope of log|f| against log(1/r) on [1e-8, 1e-4]*scale.
  const int m = 21;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (int i = 0; i < m; ++i) {
    double r = scale * std::pow(10.0, -8.0 + 4.0 * i / (m - 1));
    double f = std::abs(e(r));
    if (!std::isfinite(f) || f == 0.0) continue;
    double x = -std::log(r);
    double y = std::log(f);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 3) return 0.0;
  double d = used * sxx - sx * sx;
  return d == 0.0 ? 0.0 : (used * sxy - sx * sy) / d;
}

void collect(const Expr& e, Expr::Kind k, std::vector<Expr>& out) {
  if (e.kind() == k) out.push_back(e);
  switch (e.kind()) {
    case Expr::Kind::constant:
    case Expr::Kind::named:
    case Expr::Kind::variable:
      return;
    case Expr::Kind::add:
    case Expr::Kind::sub:
    case Expr::Kind::mul:
    case Expr::Kind::div:
      collect(e.lhs(), k, out);
      collect(e.rhs(), k, out);
      return;
    default:
      collect(e.arg(), k, out);
  }
}

template <class Pred>
double first_failure(Pred ok, double lo, double hi) {
  // ok(lo) holds and ok(hi) fails; geometric bisection for the transition.
  for (int i = 0; i < 200 && hi / lo - 1.0 > 1e-15; ++i) {
    double mid = std::sqrt(lo * hi);
    if (ok(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

double infer_domain(const Expr& e) {
  const int samples = 4001;
  auto radius = [](int i) { return std::pow(10.0, -12.0 + 18.0 * i / (samples - 1)); };
  double bound = kInf;

  auto finite = [&](double r) { return std::isfinite(e(r)); };
  if (!finite(radius(0))) return 0.0;
  for (int i = 1; i < samples; ++i) {
    if (!finite(radius(i))) {
      bound = first_failure(finite, radius(i - 1), radius(i));
      break;
    }
  }

  std::vector<Expr> denominators;
  collect(e, Expr::Kind::div, denominators);
  for (const Expr& d : denominators) {
    const Expr& den = d.rhs();
    if (!den.depends_on_r()) continue;
    double s0 = den(radius(0));
    for (int i = 1; i < samples && radius(i) < bound; ++i) {
      double s = den(radius(i));
      if (std::isfinite(s) && std::isfinite(s0) && (s > 0) != (s0 > 0) && s != 0.0) {
        auto same = [&](double r) { return (den(r) > 0) == (s0 > 0) && den(r) != 0.0; };
        bound = std::min(bound, first_failure(same, radius(i - 1), radius(i)));
        break;
      }
    }
  }

  // Logarithms whose argument blows up at the origin are kept at or above e.
  std::vector<Expr> logs;
  collect(e, Expr::Kind::log, logs);
  for (const Expr& l : logs) {
    Asymptotic a = analyse(l.arg());
    if (!a.exact || compare_growth(a, leading_constant(1.0)) <= 0) continue;
    const Expr& arg = l.arg();
    auto above = [&](double r) { return arg(r) >= std::numbers::e; };
    if (!above(radius(0))) {
      bound = 0.0;
      continue;
    }
    for (int i = 1; i < samples && radius(i) < bound; ++i) {
      if (!above(radius(i))) {
        bound = std::min(bound, first_failure(above, radius(i - 1), radius(i)));
        break;
      }
    }
  }
  return bound;
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, out);
  return out;
}

Asymptotic asymptotic(const Expr& e) { return analyse(e); }

WeightExpr::WeightExpr() : WeightExpr(Expr::constant(0.0), kInf, "zero") {}

WeightExpr::WeightExpr(Expr e, double r_max, std::string label)
    : expr_(std::move(e)), label_(std::move(label)) {
  r_max_ = r_max < 0 ? infer_domain(expr_) : r_max;
  leading_ = analyse(expr_);
  if (leading_.exact) {
    order_.order = leading_.vanishes ? 0.0 : 0.0 - leading_.power;
    order_.log_power = leading_.vanishes ? 0.0 : leading_.log_power + 0.0;
    order_.symbolic = true;
  } else {
    double scale = std::isfinite(r_max_) && r_max_ > 0 ? std::min(1.0, r_max_) : 1.0;
    order_.order = fit_singular_order(expr_, scale);
    order_.symbolic = false;
  }
  if (label_.empty()) label_ = expr_.str();
}

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

WeightExpr parse_weight(std::string_view text) {
  return WeightExpr(parse_expr(text), -1.0, std::string(text));
}

void require_potential(const WeightExpr& P, double R) {
  const SingularOrder& o = P.singular_order();
  bool too_singular = o.symbolic ? (o.order > 2.0 || (o.order == 2.0 && o.log_power >= 0.0))
                                 : o.order > 2.0 - 0.02;
  if (too_singular) {
    std::ostringstream msg;
    msg << "potential singular order a = " << o.order << " at the origin; a must satisfy 0 <= a < 2";
    throw InvalidInput(msg.str());
  }
  double top = std::min(R, P.r_max());
  if (!(top > 0)) return;
  const int samples = 1000;
  for (int i = 0; i < samples; ++i) {
    double r = top * std::pow(10.0, -8.0 * (1.0 - double(i) / samples));
    double v = P(r);
    if (v < 0) {
      std::ostringstream msg;
      msg << "negative-valued weight " << v << " at r = " << r << " rejected for potential role";
      throw InvalidInput(msg.str());
    }
  }
}

WeightExpr parse_weight(std::string_view text, WeightRole role, double R) {
  WeightExpr w = parse_weight(text);
  if (role == WeightRole::potential) require_potential(w, std::isnan(R) ? std::min(w.r_max(), 1.0) : R);
  return w;
}

Expr derivative(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::constant:
    case K::named:
      return Expr::constant(0.0);
    case K::variable:
      return Expr::constant(1.0);
    case K::add:
      return s_add(derivative(e.lhs()), derivative(e.rhs()));
    case K::sub:
      return s_sub(derivative(e.lhs()), derivative(e.rhs()));
    case K::neg:
      return s_neg(derivative(e.arg()));
    case K::mul:
      return s_add(s_mul(derivative(e.lhs()), e.rhs()), s_mul(e.lhs(), derivative(e.rhs())));
    case K::div: {
      Expr num = s_sub(s_mul(derivative(e.lhs()), e.rhs()), s_mul(e.lhs(), derivative(e.rhs())));
      return s_div(num, s_pow(e.rhs(), 2.0));
    }
    case K::pow: {
      double k = e.value();
      return s_mul(s_mul(Expr::constant(k), s_pow(e.arg(), k - 1.0)), derivative(e.arg()));
    }
    case K::log:
      return s_div(derivative(e.arg()), e.arg());
    case K::exp:
      return s_mul(e, derivative(e.arg()));
  }
  return Expr::constant(0.0);
}

WeightExpr differentiate(const WeightExpr& w, int order) {
  if (order < 1 || order > 2) throw InvalidInput("derivative order must be 1 or 2");
  Expr d = derivative(w.expr());
  if (order == 2) d = derivative(d);
  return WeightExpr(d, w.r_max(), (order == 1 ? "d/dr " : "d2/dr2 ") + w.label());
}

double exp_tower(int k) {
  double t = 1.0;
  for (int i = 0; i < k; ++i) t = std::exp(t);
  return t;
}

namespace {

double param(const BuiltinParams& p, std::string_view key, std::string_view name) {
  auto it = p.find(key);
  if (it == p.end()) throw InvalidInput(std::string(name) + ": missing parameter '" + std::string(key) + "'");
  return it->second;
}

std::string describe(std::string_view name, const BuiltinParams& p) {
  std::string s(name);
  if (p.empty()) return s;
  s += '(';
  bool first = true;
  for (const auto& [k, v] : p) {
    if (!first) s += ',';
    first = false;
    s += k + "=" + format_number(v);
  }
  return s + ')';
}

}  // namespace

WeightExpr builtin(std::string_view name, const BuiltinParams& params) {
  const Expr r = Expr::r();
  std::string label = describe(name, params);
  if (name == "zero") return WeightExpr(Expr::constant(0.0), kInf, label);
  if (name == "one") return WeightExpr(Expr::constant(1.0), kBesselJ0FirstZero, label);
  if (name == "power") {
    double a = param(params, "a", name);
    if (!(a >= 0.0 && a < 2.0)) throw InvalidInput("power: a must satisfy 0 <= a < 2");
    double m = (2.0 - a) / 2.0;
    double rmax = std::pow(m * kBesselJ0FirstZero, 1.0 / m);
    return WeightExpr(a == 0.0 ? Expr::constant(1.0) : pow(r, -a), rmax, label);
  }
  if (name == "inv_sq_log") {
    double rho = param(params, "rho", name);
    if (!(rho > 0.0)) throw InvalidInput("inv_sq_log: rho must be positive");
    Expr e = Expr::constant(1.0) /
             (Expr::constant(4.0) * pow(r, 2.0) * pow(log(Expr::constant(rho) / r), 2.0));
    return WeightExpr(e, rho / std::numbers::e, label);
  }
  if (name == "iterlog") {
    double kd = param(params, "k", name);
    double rho = param(params, "rho", name);
    int k = static_cast<int>(kd);
    if (kd != k || k < 1 || k > 3) throw InvalidInput("iterlog: k must be an integer in [1, 3]");
    if (!(rho > 0.0)) throw InvalidInput("iterlog: rho must be positive");
    Expr sum = Expr::constant(0.0);
    Expr inner = Expr::constant(rho) / r;
    Expr product = Expr::constant(1.0);
    for (int j = 1; j <= k; ++j) {
      inner = log(inner);
      product = j == 1 ? inner : product * inner;
      Expr term = pow(product, -2.0);
      sum = j == 1 ? term : sum + term;
    }
    Expr e = sum / (Expr::constant(4.0) * pow(r, 2.0));
    return WeightExpr(e, rho / exp_tower(k), label);
  }
  if (name == "pair_shift") {
    double lambda = param(params, "lambda", name);
    double n = param(params, "n", name);
    if (n != std::round(n)) throw InvalidInput("pair_shift: n must be an integer");
    return pair_shift(lambda, static_cast<int>(n), builtin("zero")).W;
  }
  throw InvalidInput("unknown builtin '" + std::string(name) + "'");
}

PairWeights pair_shift(double lambda, int n, const WeightExpr& P) {
  if (n < 1) throw InvalidInput("pair_shift: dimension must be >= 1");
  if (!(lambda >= 0.0 && lambda <= n - 2.0))
    throw InvalidInput("pair_shift: lambda must satisfy 0 <= lambda <= n-2");
  const Expr r = Expr::r();
  Expr V = lambda == 0.0 ? Expr::constant(1.0) : pow(r, -lambda);
  double c = (n - lambda - 2.0) / 2.0;
  c *= c;
  Expr W = Expr::constant(0.0);
  bool have = false;
  if (c != 0.0) {
    W = Expr::constant(c) * pow(r, -lambda - 2.0);
    have = true;
  }
  if (!P.is_zero()) {
    Expr vp = lambda == 0.0 ? P.expr() : V * P.expr();
    W = have ? W + vp : vp;
  }
  std::string tag = "shift(lambda=" + format_number(lambda) + ",n=" + std::to_string(n) + ")";
  return {WeightExpr(V, kInf, "V:" + tag), WeightExpr(W, P.r_max(), "W:" + tag + "[" + P.label() + "]")};
}

}  // namespace fineq

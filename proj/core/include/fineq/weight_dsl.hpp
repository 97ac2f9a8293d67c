#pragma once

#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace fineq {

inline constexpr double kBesselJ0FirstZero = 2.404825557695773;

// Immutable expression tree over the single variable r.
class Expr {
 public:
  enum class Kind { constant, named, variable, add, sub, mul, div, neg, pow, log, exp };

  Expr();  // the constant 0
  static Expr constant(double v);
  static Expr e();
  static Expr pi();
  static Expr r();

  Kind kind() const;
  // Constant or named value; exponent for pow nodes.
  double value() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  const Expr& arg() const { return lhs(); }
  bool is_constant(double v) const;
  bool depends_on_r() const;

  double operator()(double r) const;
  std::string str() const;
  bool operator==(const Expr& other) const;

  friend Expr operator+(const Expr& a, const Expr& b) { return binary(Kind::add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return binary(Kind::sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return binary(Kind::mul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return binary(Kind::div, a, b); }
  friend Expr operator-(const Expr& a) { return unary(Kind::neg, a, 0.0); }
  friend Expr pow(const Expr& a, double k) { return unary(Kind::pow, a, k); }
  friend Expr log(const Expr& a) { return unary(Kind::log, a, 0.0); }
  friend Expr exp(const Expr& a) { return unary(Kind::exp, a, 0.0); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  static Expr binary(Kind k, const Expr& a, const Expr& b);
  static Expr unary(Kind k, const Expr& a, double v);
  std::shared_ptr<const Node> node_;
};

// Leading behaviour f ~ coeff * r^power * L^log_power * (log L)^loglog_power as r -> 0,
// with L = log(1/r). `exact` is false when the tree is outside the recognised shapes.
struct Asymptotic {
  bool exact = false;
  bool vanishes = false;
  double coeff = 0.0;
  double power = 0.0;
  double log_power = 0.0;
  double loglog_power = 0.0;
};

Asymptotic asymptotic(const Expr& e);

struct SingularOrder {
  double order = 0.0;      // a in f ~ C r^{-a}
  double log_power = 0.0;  // exponent of log(1/r) riding on r^{-a}
  bool symbolic = true;
};

class WeightExpr {
 public:
  WeightExpr();
  // r_max < 0 requests inference of the domain from the expression.
  explicit WeightExpr(Expr e, double r_max = -1.0, std::string label = {});

  const Expr& expr() const { return expr_; }
  double operator()(double r) const { return expr_(r); }
  double r_max() const { return r_max_; }
  const SingularOrder& singular_order() const { return order_; }
  const Asymptotic& leading() const { return leading_; }
  const std::string& label() const { return label_; }
  std::string text() const { return expr_.str(); }
  bool is_zero() const { return expr_.is_constant(0.0); }

 private:
  Expr expr_;
  double r_max_ = std::numeric_limits<double>::infinity();
  SingularOrder order_;
  Asymptotic leading_;
  std::string label_;
};

enum class WeightRole { generic, potential };

WeightExpr parse_weight(std::string_view text);
// Potential role also screens sign on (0, R) and rejects singular order >= 2
// (log-damped r^-2 potentials stay admissible). A NaN R screens (0, min(R_max, 1)].
WeightExpr parse_weight(std::string_view text, WeightRole role,
                        double R = std::numeric_limits<double>::quiet_NaN());
void require_potential(const WeightExpr& P, double R);

Expr parse_expr(std::string_view text);
Expr derivative(const Expr& e);
WeightExpr differentiate(const WeightExpr& w, int order);

// e, e^e, e^{e^e} for k = 1, 2, 3.
double exp_tower(int k);

using BuiltinParams = std::map<std::string, double, std::less<>>;
WeightExpr builtin(std::string_view name, const BuiltinParams& params = {});

struct PairWeights {
  WeightExpr V;
  WeightExpr W;
};
// (r^-l, ((n-l-2)/2)^2 r^{-l-2} + r^-l P), 0 <= l <= n-2.
PairWeights pair_shift(double lambda, int n, const WeightExpr& P);

}  // namespace fineq

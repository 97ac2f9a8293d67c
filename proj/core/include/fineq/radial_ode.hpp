#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fineq/weight_dsl.hpp"

namespace fineq {

// y'' + a(r) y' + b(r) y = 0 on (0, R).
struct RadialCoefficients {
  WeightExpr a;
  WeightExpr b;
  int dimension = 2;
  double radius = 1.0;

  static RadialCoefficients hardy(const WeightExpr& P, double R);
  static RadialCoefficients euclidean(int n, const WeightExpr& b, double R);
  void validate() const;
};

// Indicial data at the regular singular point r = 0.
struct FrobeniusStart {
  double r0 = 0.0;
  double kappa = 0.0;     // lim r a(r)
  double B = 0.0;         // lim r^2 b(r)
  double exponent = 0.0;  // principal indicial root (real part when oscillatory)
  double w0 = 0.0;        // r y'/y at r0
  bool oscillatory = false;
};

FrobeniusStart frobenius_start(const RadialCoefficients& c);

class SolutionTrace {
 public:
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& derivatives() const { return dy_; }
  const std::vector<double>& local_errors() const { return err_; }
  double start_radius() const { return r_.front(); }
  double tolerance() const { return tol_; }
  const FrobeniusStart& start() const { return start_; }
  const RadialCoefficients& coefficients() const { return coeffs_; }
  std::size_t size() const { return r_.size(); }
  bool truncated() const { return truncated_; }

  // (y, y') at r in [r0, last radius]; one embedded step from the nearest node.
  std::pair<double, double> sample(double r) const;
  void write_csv(std::ostream& os) const;

 private:
  friend SolutionTrace integrate_singular_ode(const RadialCoefficients&, double, bool);
  friend std::optional<double> first_zero(const SolutionTrace&);
  std::optional<double> refine_zero(std::size_t i) const;

  RadialCoefficients coeffs_;
  FrobeniusStart start_;
  double tol_ = 0.0;
  bool truncated_ = false;
  std::vector<double> t_, r_, y_, dy_, err_;
  std::vector<double> w_;  // r y'
};

// With stop_at_sign_change the trace ends at the first accepted step with y <= 0.
SolutionTrace integrate_singular_ode(const RadialCoefficients& coeffs, double tol,
                                     bool stop_at_sign_change = false);
std::optional<double> first_zero(const SolutionTrace& trace);

enum class CertificateStatus { positive, first_zero, inconclusive };
const char* to_string(CertificateStatus s);

struct PositivityCertificate {
  CertificateStatus status = CertificateStatus::inconclusive;
  std::optional<double> zero;
  double tolerance = 0.0;
  double radius = 0.0;
  double start_radius = 0.0;
  double min_value = 0.0;
  std::size_t steps = 0;
  bool endpoint_zero = false;
  bool origin_oscillatory = false;
  std::string settings_hash;
  std::string note;

  bool positive() const { return status == CertificateStatus::positive; }
};

PositivityCertificate certify_positive(const RadialCoefficients& coeffs, double tol);

std::string fnv1a_hex(const std::string& text);

}  // namespace fineq

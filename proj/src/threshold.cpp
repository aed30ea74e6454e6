#include "specbound/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specbound/common.hpp"

namespace specbound {

namespace {

void require_nonnegative(double v, const char* name) {
  if (std::isnan(v) || v < 0.0)
    throw InputError(std::string("threshold input ") + name + " must be a nonnegative number");
}

}  // namespace

std::string to_string(SplitChoice s) {
  switch (s) {
    case SplitChoice::V2_carries_all:
      return "0";
    case SplitChoice::V1_carries_all:
      return "1";
    case SplitChoice::Constant:
      return "constant";
  }
  return "?";
}

double ThresholdReport::split_parameter() const {
  switch (split) {
    case SplitChoice::V2_carries_all:
      return 0.0;
    case SplitChoice::V1_carries_all:
      return 1.0;
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

double compute_lambda(double beta, double omega1, double omega2) {
  require_nonnegative(beta, "beta");
  require_nonnegative(omega1, "omega1");
  require_nonnegative(omega2, "omega2");
  if (std::isinf(beta) || std::isinf(omega1) || std::isinf(omega2)) return kInf;
  // Expanded square: exact for (0,0,w) -> w/2.
  const double s = beta + omega1;
  return 0.5 * (s * s + omega2 + s * std::sqrt(s * s + 2.0 * omega2));
}

double bang_bang_g(double b, double c, double s) {
  const double bs = b + s;
  return bs + std::sqrt(bs * bs + 2.0 * c * (1.0 - s));
}

ThresholdReport optimize_split(double beta, double omega1, double omega2) {
  ThresholdReport r;
  r.beta = beta;
  r.omega1 = omega1;
  r.omega2 = omega2;
  r.lambda_v1 = compute_lambda(beta, omega1, 0.0);
  r.lambda_v2 = compute_lambda(beta, 0.0, omega2);
  const double a = r.lambda_v1, b = r.lambda_v2;
  if (std::isinf(a) && std::isinf(b)) {
    r.lambda = kInf;
    r.split = SplitChoice::Constant;
    return r;
  }
  if (std::fabs(a - b) <= 1e-12 * std::max(1.0, std::max(std::fabs(a), std::fabs(b)))) {
    r.lambda = std::min(a, b);
    r.split = SplitChoice::Constant;
  } else if (b < a) {
    r.lambda = b;
    r.split = SplitChoice::V2_carries_all;
  } else {
    r.lambda = a;
    r.split = SplitChoice::V1_carries_all;
  }
  if (std::isfinite(a) && std::isfinite(b)) {
    const double crit = 2.0 * omega1 * (beta + omega1);
    const double tol = 1e-12 * std::max(1.0, std::max(omega2, crit));
    if (r.split == SplitChoice::V2_carries_all)
      r.branch_condition_agrees = omega2 < crit + tol;
    else if (r.split == SplitChoice::V1_carries_all)
      r.branch_condition_agrees = omega2 > crit - tol;
    else
      r.branch_condition_agrees = std::fabs(omega2 - crit) <= 1e-9 * std::max(1.0, crit);
  }
  return r;
}

double pauli_threshold(double beta, double omega) {
  require_nonnegative(beta, "beta");
  require_nonnegative(omega, "omega");
  return std::min(4.0 * beta * beta, compute_lambda(beta, omega, omega));
}

std::pair<double, double> dirac_window(double beta, double omega, double m) {
  require_nonnegative(m, "m");
  const double e = std::sqrt(pauli_threshold(beta, omega) + m * m);
  return {-e, e};
}

double aharonov_bohm_threshold(double omega1, double omega2) {
  return compute_lambda(0.0, omega1, omega2);
}

}  // namespace specbound

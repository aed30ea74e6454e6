#pragma once

#include <string>
#include <utility>

namespace specbound {

enum class SplitChoice { V2_carries_all, V1_carries_all, Constant };

std::string to_string(SplitChoice s);

struct ThresholdReport {
  double beta = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double lambda = 0.0;
  // Endpoint evaluations: V1 = V uses (beta, omega1, 0); V2 = V uses (beta, 0, omega2).
  double lambda_v1 = 0.0;
  double lambda_v2 = 0.0;
  SplitChoice split = SplitChoice::V2_carries_all;
  // True when the chosen endpoint agrees with omega2 vs 2*omega1*(beta+omega1).
  bool branch_condition_agrees = true;
  std::string provenance_beta = "manual";
  std::string provenance_omega1 = "manual";
  std::string provenance_omega2 = "manual";

  // s* in {0, 1}; NaN for the constant case.
  double split_parameter() const;
};

// Lambda = (beta + omega1 + sqrt((beta+omega1)^2 + 2 omega2))^2 / 4. Infinite input gives +inf.
double compute_lambda(double beta, double omega1, double omega2);

// g(s) = b + s + sqrt((b+s)^2 + 2c(1-s)).
double bang_bang_g(double b, double c, double s);

ThresholdReport optimize_split(double beta, double omega1, double omega2);

// min{4 beta^2, Lambda(beta, omega, omega)}.
double pauli_threshold(double beta, double omega);

// Eigenvalues of the Dirac operator lie inside [-sqrt(Lambda_P+m^2), sqrt(Lambda_P+m^2)].
std::pair<double, double> dirac_window(double beta, double omega, double m);

double aharonov_bohm_threshold(double omega1, double omega2);

}  // namespace specbound

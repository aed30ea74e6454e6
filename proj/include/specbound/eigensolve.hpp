#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "specbound/channels.hpp"

namespace specbound {

// Symmetric tridiagonal matrix with diagonal 2/h^2 + W(r_i) and constant
// off-diagonal -1/h^2, nodes r_i = i h for i = 1..N, h = R_max/(N+1).
struct TridiagonalOperator {
  std::vector<double> diagonal;
  double offdiagonal = 0.0;
  double h = 0.0;
  double R_max = 0.0;
  std::size_t N = 0;

  double node(std::size_t i) const { return static_cast<double>(i + 1) * h; }
  std::pair<double, double> gershgorin() const;
};

TridiagonalOperator discretize(const RadialChannel& channel, double R_max, std::size_t N);

// Number of eigenvalues strictly below x.
std::size_t sturm_count(const TridiagonalOperator& T, double x);

// Eigenvalues in (a, b) to absolute accuracy tol, ascending.
std::vector<double> eigen_in_window(const TridiagonalOperator& T, std::pair<double, double> window,
                                    double tol);

// Unit eigenvector by inverse iteration from a seeded random start; sign fixed so
// the first non-negligible component is positive.
std::vector<double> eigenvector(const TridiagonalOperator& T, double lambda,
                                std::uint64_t seed = 42);

struct SpuriousPolicy {
  double drift_factor = 100.0;   // spurious when drift > drift_factor * tol
  double outer_fraction = 0.1;   // outer part of the box used for the mass ratio
  double outer_mass_limit = 0.1; // spurious when the outer mass exceeds this
  std::uint64_t seed = 42;        // inverse-iteration start vector
};

struct SpectralReport {
  std::pair<double, double> window{0.0, 0.0};
  double R_max = 0.0;
  std::size_t N = 0;
  double tol = 0.0;
  std::vector<double> eigenvalues;
  std::vector<double> localization_ratio;
  std::vector<double> drift;
  std::vector<bool> spurious;
  std::size_t sturm_count_difference = 0;
  std::optional<double> threshold;
  // No non-spurious eigenvalue above the threshold (true when no threshold is set).
  bool threshold_consistent = true;

  std::vector<double> genuine() const;
};

// Solves at R_max and at 2 R_max with the same spacing and flags box states.
SpectralReport classify_spurious(const RadialChannel& channel, std::pair<double, double> window,
                                 double R_max, std::size_t N, double tol,
                                 std::optional<double> threshold = std::nullopt,
                                 const SpuriousPolicy& policy = {});

// Counts sign changes of v, ignoring entries below a small relative floor.
int sign_changes(const std::vector<double>& v);

}  // namespace specbound

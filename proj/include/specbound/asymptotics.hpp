#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "specbound/common.hpp"
#include "specbound/fields.hpp"

namespace specbound {

using ScalarField = std::function<double(const Point&)>;

struct AsymptoticEstimate {
  std::vector<double> radii;
  std::vector<double> values;  // monotone envelope of tail suprema
  double limit = kInf;
  bool stabilized = false;
  std::string rule;  // which stabilization rule decided the limit
};

struct ShellSampling {
  int dimension = 3;
  int samples_per_shell = 16;
  double shell_width = 0.16;         // radial step is shell_width / samples_per_shell
  double cutoff_factor = 10.0;       // outer cutoff = cutoff_factor * max(radii)
  double extension_density = 0.125;  // relative density on [cutoff, 2 cutoff]
  double agreement_tol = 1e-3;
  double decay_slope = -0.5;  // log-log slope at or below which the limit is 0
};

// Generic tail-sup estimator: value(R_j) = sup of q over samples with R_j <= |x| <= cutoff.
AsymptoticEstimate tail_sup_estimate(const ScalarField& q, const std::vector<double>& radii,
                                     const ShellSampling& sampling);

AsymptoticEstimate beta_estimate(const FieldSpec& field, const std::vector<double>& radii,
                                 int samples_per_shell, ShellSampling sampling = {});
AsymptoticEstimate omega1_estimate(const ScalarField& V1, const std::vector<double>& radii,
                                   int samples_per_shell, ShellSampling sampling = {});
// Positive part of x . grad V2; central differences when no virial is supplied.
AsymptoticEstimate omega2_estimate(const PotentialSpec& V2, const std::vector<double>& radii,
                                   int samples_per_shell, ShellSampling sampling = {});

// x . grad V by central differences with step 1e-5 (1 + |x|).
double numerical_virial(const ScalarField& V, const Point& x, int dim);

struct KatoNormReport {
  int dimension = 3;
  double norm = 0.0;
  std::vector<std::pair<double, double>> alpha_profile;  // ascending alpha
  bool stabilized = true;
  bool in_class = true;
};

// Kato kernel: |z|^{2-d} for d = 3 (radius 1), |ln|z|| for d = 2 (radius 1/2).
double kato_kernel(double r, int d);

std::vector<Point> cubic_lattice(int dim, double half_width, double spacing);

KatoNormReport kato_norm(const ScalarField& V, int d, int quad_nodes,
                         const std::vector<Point>& centers = {Point{0.0, 0.0, 0.0}});

// sup over centers of (int_{|x-y|<=1} |V|^p)^{1/p}, unnormalized; +inf on divergence.
double lp_locunif_norm(const ScalarField& V, int d, double p,
                       const std::vector<Point>& centers = {Point{0.0, 0.0, 0.0}},
                       int quad_nodes = 8);

struct VanishingOptions {
  int dimension = 2;
  int directions = 16;
  int quad_nodes = 8;
};

// Tail L^p_loc,unif norm of 1_{|y|>=R} W; the certificate passes when the limit is 0.
AsymptoticEstimate vanishing_certificate(const ScalarField& W, double p,
                                         const std::vector<double>& radii,
                                         const VanishingOptions& opt = {});
bool certificate_passes(const AsymptoticEstimate& est);

// Surrogate with unit implicit constants:
// sup_x int_{|x-y|<=alpha} g_d |W| + exp(-sqrt(lambda) alpha / 4) / (sqrt(lambda) alpha) ||W||_{L^1_loc,unif}.
double resolvent_kato_bound(const ScalarField& W, int d, double lambda, double alpha,
                            const std::vector<Point>& centers = {Point{0.0, 0.0, 0.0}},
                            int quad_nodes = 8);

struct WeylReport {
  std::vector<double> C;
  std::vector<double> rayleigh;       // ||(P - A_n) phi_n||^2, tent state
  std::vector<double> gradient_term;  // ||grad phi_n||^2
  std::vector<double> bound;          // (sqrt(gradient) + sqrt(4 c_d^2 C_n))^2
};

WeylReport weyl_vanishing(const FieldSpec& field, const std::vector<Point>& centers,
                          const std::vector<double>& radii, int quad_nodes = 8);

// Least-squares slope of log(values) against log(radii).
double loglog_slope(const std::vector<double>& radii, const std::vector<double>& values);

}  // namespace specbound

#pragma once

#include <functional>
#include <string>

#include "specbound/common.hpp"

namespace specbound {

enum class FieldKind { RadialProfile, Sampler, AharonovBohm };

// Magnetic field B as an antisymmetric matrix field, with base point w.
class FieldSpec {
 public:
  using Profile = std::function<double(double)>;
  using Sampler = std::function<Matrix(const Point&)>;

  // 2D field B(y) = b(|y|) [[0,-1],[1,0]].
  static FieldSpec radial(Profile b, std::string label = "radial");
  // Antisymmetry of the sampler is checked on pseudo-random points.
  static FieldSpec sampler(int dim, Sampler B, std::string label = "sampler");
  // Idealized flux line at the origin, A = B0 (-y, x) / r^2.
  static FieldSpec aharonov_bohm(double flux, std::string label = "aharonov_bohm");

  FieldSpec with_base(const Point& w) const;

  int dimension() const { return dim_; }
  FieldKind kind() const { return kind_; }
  const Point& base() const { return base_; }
  const std::string& label() const { return label_; }
  const Profile& profile() const { return profile_; }
  double flux() const { return flux_; }

  // B at the absolute point y.
  Matrix matrix_at(const Point& y) const;

 private:
  int dim_ = 2;
  FieldKind kind_ = FieldKind::Sampler;
  Profile profile_;
  Sampler sampler_;
  double flux_ = 0.0;
  Point base_{0.0, 0.0, 0.0};
  std::string label_;
};

// [[0,-B],[B,0]]: the 2D field of strength B.
Matrix field_matrix_2d(double B);
// M with M x = B x x (cross product).
Matrix cross_matrix(const Point& B);

// B~_w(x) = B(x + w)[x].
Point btilde(const FieldSpec& field, const Point& x);

struct PotentialSpec {
  using Fn = std::function<double(const Point&)>;
  Fn V;
  Fn virial;  // x . grad V, optional
  Fn V1;      // optional split V = V1 + V2
  Fn V2;
  std::string label = "potential";

  bool has_virial() const { return static_cast<bool>(virial); }
  bool has_split() const { return static_cast<bool>(V1) && static_cast<bool>(V2); }
  double operator()(const Point& x) const { return V(x); }

  static PotentialSpec zero();
  // Throws InputError when the split does not reproduce V on sampled points.
  void validate(int dim) const;
};

struct GaugePotential {
  int dimension = 2;
  std::function<Point(const Point&)> A;
  int quadrature_nodes = 0;
  bool transversal = false;

  Point operator()(const Point& x) const { return A(x); }
};

GaugePotential zero_gauge(int dim);
GaugePotential aharonov_bohm_gauge(double flux);

struct GaugeOptions {
  int probes = 64;
  double probe_radius = 10.0;
  double tol = 1e-8;
};

// A(x) = int_0^1 B~(t x) dt, dyadic Gauss-Legendre panels toward t = 0. The rule
// is compared against a doubled rule on probe points; disagreement throws GaugeError.
GaugePotential poincare_gauge(const FieldSpec& field, int nodes, const GaugeOptions& opt = {});

struct Box {
  int dim = 2;
  Point lo{-1.0, -1.0, -1.0};
  Point hi{1.0, 1.0, 1.0};
};

struct CurlOptions {
  int samples = 256;
  double exclusion_radius = 0.05;
};

// max |curl A - B| / (1 + |B|) by central differences; +inf if any sample is non-finite.
double curl_check(const GaugePotential& gauge, const FieldSpec& field, double h, const Box& box,
                  const CurlOptions& opt = {});

// (int_{|x|<R} |x|^{2-d} log^2(R/|x|) |B~(x)|^2 dx)^{1/2}; +inf on divergence.
double gauge_regularity_norm(const FieldSpec& field, double R, int nodes = 8);

// (int_{|x|<R} |x|^{2-d} |A(x)|^2 dx)^{1/2}.
double weighted_gauge_norm(const GaugePotential& gauge, double R, int nodes = 8);

}  // namespace specbound

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specbound/fields.hpp"

namespace specbound {

using cplx = std::complex<double>;

// Uniform Dirichlet grid. Along each axis the n interior nodes sit at
// origin + (i+1) h, i = 0..n-1; the two boundary nodes carry zero.
struct Grid {
  int dimension = 2;
  double L = 0.0;
  double h = 0.0;
  int n = 0;
  double origin = 0.0;

  double coord(int i) const { return origin + (i + 1) * h; }
  std::size_t size() const {
    return dimension == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  }
  Point point(std::size_t k) const;
  double cell() const { return dimension == 1 ? h : h * h; }
};

// [-L, L]^2 with spacing close to h.
Grid square(double L, double h);
// (0, L) with spacing close to h.
Grid half_line(double L, double h);

struct GridState {
  Grid grid;
  std::vector<cplx> values;

  double norm() const;
  // Largest |value| on the outermost interior nodes relative to the norm. In 1D
  // only the far end counts: the origin is a genuine Dirichlet wall.
  double boundary_ratio() const;
};

GridState sample(const Grid& grid, const std::function<cplx(const Point&)>& f);
cplx inner(const GridState& u, const GridState& v);

// Admissible test states have boundary_ratio below this.
inline constexpr double kBoundaryTol = 1e-8;

class AdmissibilityError : public InputError {
 public:
  using InputError::InputError;
};

// Edge-based magnetic momentum with Peierls links L_e = exp(-i int_e A.dl).
// Edge e joins node a to node b (b = a + h e_axis); index -1 is a boundary node.
class MagneticForm {
 public:
  struct Edge {
    int a;
    int b;
    int axis;
    Point mid;
  };

  MagneticForm(const Grid& grid, std::optional<GaugePotential> gauge = std::nullopt,
               int link_nodes = 2);

  const Grid& grid() const { return grid_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<cplx>& links() const { return links_; }
  bool magnetic() const { return gauge_.has_value(); }
  const std::optional<GaugePotential>& gauge() const { return gauge_; }

  // -i (L_e v_b - v_a) / h
  cplx momentum(std::size_t e, const std::vector<cplx>& v) const;
  // sum_e conj(Pi u) Pi v h^d
  cplx kinetic(const GridState& u, const GridState& v) const;
  // sum_e conj(G_axis(mid) u_mid) (Pi_e v) h^d, u_mid = (u_a + L_e u_b)/2. With
  // stride 2 the edges join a to a + 2h e_axis through the product of two links.
  cplx cross(const std::function<Point(const Point&)>& G, const GridState& u, const GridState& v,
             int stride = 1) const;
  // Kinetic part of H applied to v, plus the node potential.
  std::vector<cplx> apply(const std::vector<cplx>& v, const std::vector<double>& potential) const;
  // Component `axis` of (P - A) v at the nodes.
  std::vector<cplx> node_momentum(const std::vector<cplx>& v, int axis) const;

 private:
  Grid grid_;
  std::optional<GaugePotential> gauge_;
  std::vector<Edge> edges_;
  std::vector<cplx> links_;
};

std::vector<double> potential_on(const Grid& grid, const std::function<double(const Point&)>& V);

// q_{A,V}(u, v) on the grid.
cplx sesq(const MagneticForm& form, const std::vector<double>& potential, const GridState& u,
          const GridState& v);
// q_{A,V}(phi, phi); rejects states with boundary mass.
double form_q(const MagneticForm& form, const PotentialSpec& V, const GridState& phi);

struct DilationOptions {
  int stencil = 4;               // Lagrange points per axis; 4 is cubic
  double support_fraction = 0.9;  // e^{|t|} rho <= fraction * L
  double support_floor = 1e-8;   // |phi| above floor * max defines rho
};

// (U_t phi)(x) = e^{t d/2} phi(e^t x).
GridState dilation_apply(const GridState& phi, double t, const DilationOptions& opt = {});
double state_radius(const GridState& phi, double floor);

// 2 Re q(phi, i D_t phi), i D_t = (U_t - U_{-t}) / (2t).
double commutator_quotient(const MagneticForm& form, const PotentialSpec& V,
                           const GridState& phi, double t, const DilationOptions& opt = {});

struct RichardsonReport {
  std::vector<double> t;
  std::vector<double> values;
  std::vector<double> residuals;  // |value - reference|
  double order = 0.0;             // log2 of successive residual ratios, last pair
  double extrapolated = 0.0;      // (4 Q(t_min) - Q(2 t_min)) / 3
  double reference = 0.0;
  double relative_residual = 0.0;  // |extrapolated - reference| / |reference|
};

// t must be halving; values are Q(t_k).
RichardsonReport richardson(const std::vector<double>& t, const std::vector<double>& values,
                            double reference);

// ⟨phi, x.grad V1 phi⟩ via 2 Im⟨x V1 phi, (P-A) phi⟩ - d ⟨phi, V1 phi⟩. The cross
// term is extrapolated from edge lengths h and 2h.
double kato_virial(const MagneticForm& form, const std::function<double(const Point&)>& V1,
                   const GridState& phi);

// 2||(P-A)phi||^2 + 2 Re⟨B~ phi, (P-A) phi⟩ - ⟨phi, x.grad V phi⟩. Without a
// virial, falls back to the Kato form of V (or of V1 plus x.grad V2 when split).
double virial_rhs(const MagneticForm& form, const FieldSpec* field, const PotentialSpec& V,
                  const GridState& phi);

// F = (mu/eps)(1 - e^{-eps s}), s = sqrt(lam + |x|^2), grad F = g x.
struct WeightFunction {
  double mu = 0.0;
  double eps = 1.0;
  double lam = 1.0;

  WeightFunction(double mu, double eps, double lam);

  double s(const Point& x, int dim) const;
  double F(const Point& x, int dim) const;
  double g(const Point& x, int dim) const;
  double grad_sq(const Point& x, int dim) const;           // |grad F|^2
  double x_grad_g(const Point& x, int dim) const;          // x.grad g
  double x_grad_sq_g(const Point& x, int dim) const;       // (x.grad)^2 g
  double x_grad_grad_sq(const Point& x, int dim) const;    // x.grad |grad F|^2
};

struct WeightedVirialReport {
  double rhs1 = 0.0;
  double rhs2 = 0.0;
  double eta = 0.0;
  bool warning = false;  // eta above the configured bound
  double boost_form = 0.0;    // q(psi_F, psi_F)
  double boost_energy = 0.0;  // ⟨psi_F, (E + |grad F|^2) psi_F⟩
  double boost_residual = 0.0;
  double norm_sq = 0.0;  // ||psi_F||^2
};

// ||(H - E) psi|| / ||psi||
double eigen_residual(const MagneticForm& form, const std::vector<double>& potential,
                      const GridState& psi, double E);

WeightedVirialReport exp_weighted_virial(const MagneticForm& form, const FieldSpec* field,
                                         const PotentialSpec& V, const GridState& psi, double E,
                                         const WeightFunction& w, double eta_bound = 1e-6);

// |Re q(xi^2 phi, phi) - q(xi phi, xi phi) + ⟨phi, |grad xi|^2 phi⟩|
double ims_check(const MagneticForm& form, const PotentialSpec& V,
                 const std::function<double(const Point&)>& xi,
                 const std::function<Point(const Point&)>& grad_xi, const GridState& phi);

struct Eigenpair {
  GridState psi;
  double E = 0.0;
  double eta = 0.0;
  int iterations = 0;
};

// index-th Dirichlet eigenpair of -u'' + V on the half-line grid.
Eigenpair eigenpair_1d(const Grid& grid, const std::function<double(const Point&)>& V,
                       std::size_t index);

// Lowest eigenpair by shifted inverse iteration with conjugate-gradient solves,
// capped at max_iterations outer steps.
Eigenpair ground_state_2d(const MagneticForm& form, const std::function<double(const Point&)>& V,
                          const GridState& start, int max_iterations = 200, double tol = 1e-10);

}  // namespace specbound

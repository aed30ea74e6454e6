#include "specbound/virial.hpp"

#include <algorithm>
#include <cmath>

#include "specbound/asymptotics.hpp"
#include "specbound/channels.hpp"
#include "specbound/eigensolve.hpp"
#include "specbound/quadrature.hpp"

namespace specbound {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_same_grid(const Grid& a, const Grid& b) {
  if (a.dimension != b.dimension || a.n != b.n || a.h != b.h || a.origin != b.origin)
    throw InputError("grid states live on different grids");
}

}  // namespace

Point Grid::point(std::size_t k) const {
  if (dimension == 1) return {coord(static_cast<int>(k)), 0.0, 0.0};
  const auto i = static_cast<int>(k / static_cast<std::size_t>(n));
  const auto j = static_cast<int>(k % static_cast<std::size_t>(n));
  return {coord(i), coord(j), 0.0};
}

Grid square(double L, double h) {
  if (!(L > 0.0) || !(h > 0.0) || h >= L) throw InputError("square grid needs 0 < h < L");
  Grid g;
  g.dimension = 2;
  g.L = L;
  g.n = static_cast<int>(std::lround(2.0 * L / h)) - 1;
  g.h = 2.0 * L / (g.n + 1);
  g.origin = -L;
  return g;
}

Grid half_line(double L, double h) {
  if (!(L > 0.0) || !(h > 0.0) || h >= L) throw InputError("half-line grid needs 0 < h < L");
  Grid g;
  g.dimension = 1;
  g.L = L;
  g.n = static_cast<int>(std::lround(L / h)) - 1;
  g.h = L / (g.n + 1);
  g.origin = 0.0;
  return g;
}

double GridState::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * grid.cell());
}

double GridState::boundary_ratio() const {
  const double nrm = norm();
  if (nrm == 0.0) return 0.0;
  const int n = grid.n;
  double m = 0.0;
  if (grid.dimension == 1) {
    m = std::abs(values[n - 1]);
  } else {
    for (int k = 0; k < n; ++k) {
      m = std::max({m, std::abs(values[k]), std::abs(values[(n - 1) * n + k]),
                    std::abs(values[k * n]), std::abs(values[k * n + n - 1])});
    }
  }
  return m / nrm;
}

GridState sample(const Grid& grid, const std::function<cplx(const Point&)>& f) {
  GridState s{grid, std::vector<cplx>(grid.size())};
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    s.values[k] = f(grid.point(k));
    if (!std::isfinite(s.values[k].real()) || !std::isfinite(s.values[k].imag()))
      throw InputError("non-finite grid state value");
  }
  return s;
}

cplx inner(const GridState& u, const GridState& v) {
  require_same_grid(u.grid, v.grid);
  cplx s = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) s += std::conj(u.values[k]) * v.values[k];
  return s * u.grid.cell();
}

// ---------------------------------------------------------------------------

MagneticForm::MagneticForm(const Grid& grid, std::optional<GaugePotential> gauge, int link_nodes)
    : grid_(grid), gauge_(std::move(gauge)) {
  const int n = grid.n;
  const int d = grid.dimension;
  if (gauge_ && d == 1) throw InputError("no vector potential on the half-line grid");
  if (gauge_ && gauge_->dimension != 2) throw InputError("gauge dimension must match the grid");
  const auto flat = [&](int i, int j) { return i < 0 || j < 0 || i >= n || j >= n ? -1 : i * n + j; };
  const double h = grid.h;

  if (d == 1) {
    for (int e = 0; e <= n; ++e) {
      const int a = e - 1, b = e < n ? e : -1;
      edges_.push_back({a, b, 0, {grid.coord(e - 1) + 0.5 * h, 0.0, 0.0}});
    }
  } else {
    for (int j = 0; j < n; ++j)
      for (int e = 0; e <= n; ++e)
        edges_.push_back({flat(e - 1, j), flat(e, j), 0,
                          {grid.coord(e - 1) + 0.5 * h, grid.coord(j), 0.0}});
    for (int i = 0; i < n; ++i)
      for (int e = 0; e <= n; ++e)
        edges_.push_back({flat(i, e - 1), flat(i, e), 1,
                          {grid.coord(i), grid.coord(e - 1) + 0.5 * h, 0.0}});
  }

  links_.assign(edges_.size(), cplx(1.0, 0.0));
  if (!gauge_) return;
  const auto& rule = quad::gauss_legendre(link_nodes);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    Point start = e.mid;
    start[e.axis] -= 0.5 * h;
    double theta = 0.0;
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      Point p = start;
      p[e.axis] += rule.x[q] * h;
      const Point a = (*gauge_)(p);
      if (!all_finite(a)) throw NumericalError("vector potential not finite on the grid");
      theta += rule.w[q] * a[e.axis];
    }
    theta *= h;
    links_[k] = std::exp(-kI * theta);
  }
}

cplx MagneticForm::momentum(std::size_t k, const std::vector<cplx>& v) const {
  const Edge& e = edges_[k];
  const cplx vb = e.b >= 0 ? v[e.b] : 0.0;
  const cplx va = e.a >= 0 ? v[e.a] : 0.0;
  return -kI * (links_[k] * vb - va) / grid_.h;
}

cplx MagneticForm::kinetic(const GridState& u, const GridState& v) const {
  cplx s = 0.0;
  for (std::size_t k = 0; k < edges_.size(); ++k)
    s += std::conj(momentum(k, u.values)) * momentum(k, v.values);
  return s * grid_.cell();
}

cplx MagneticForm::cross(const std::function<Point(const Point&)>& G, const GridState& u,
                         const GridState& v, int stride) const {
  if (stride != 1 && stride != 2) throw InputError("cross term stride must be 1 or 2");
  const std::size_t line = static_cast<std::size_t>(grid_.n + 1);
  const double w = stride * grid_.h;
  cplx s = 0.0;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (stride == 2 && k % line == line - 1) continue;
    const Edge& e = edges_[k];
    const int b = stride == 1 ? e.b : edges_[k + 1].b;
    const cplx link = stride == 1 ? links_[k] : links_[k] * links_[k + 1];
    Point mid = e.mid;
    if (stride == 2) mid[e.axis] += 0.5 * grid_.h;
    const cplx ub = b >= 0 ? u.values[b] : 0.0;
    const cplx ua = e.a >= 0 ? u.values[e.a] : 0.0;
    const cplx umid = 0.5 * (ua + link * ub);
    if (umid == 0.0) continue;
    const cplx vb = b >= 0 ? v.values[b] : 0.0;
    const cplx va = e.a >= 0 ? v.values[e.a] : 0.0;
    const cplx pv = -kI * (link * vb - va) / w;
    s += std::conj(G(mid)[e.axis] * umid) * pv;
  }
  return s * grid_.cell();
}

std::vector<cplx> MagneticForm::apply(const std::vector<cplx>& v,
                                      const std::vector<double>& potential) const {
  const double ih2 = 1.0 / (grid_.h * grid_.h);
  std::vector<cplx> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = potential[k] * v[k];
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    const cplx vb = e.b >= 0 ? v[e.b] : 0.0;
    const cplx va = e.a >= 0 ? v[e.a] : 0.0;
    if (e.a >= 0) out[e.a] += (va - links_[k] * vb) * ih2;
    if (e.b >= 0) out[e.b] += (vb - std::conj(links_[k]) * va) * ih2;
  }
  return out;
}

std::vector<cplx> MagneticForm::node_momentum(const std::vector<cplx>& v, int axis) const {
  const int n = grid_.n;
  std::vector<cplx> out(v.size());
  const std::size_t line = static_cast<std::size_t>(n + 1);
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::size_t lo;
    if (grid_.dimension == 1) {
      lo = k;
    } else {
      const std::size_t i = k / n, j = k % n;
      const std::size_t off = axis == 0 ? 0 : static_cast<std::size_t>(n) * line;
      lo = axis == 0 ? off + j * line + i : off + i * line + j;
    }
    const std::size_t hi = lo + 1;
    out[k] = 0.5 * (momentum(hi, v) + std::conj(links_[lo]) * momentum(lo, v));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> potential_on(const Grid& grid, const std::function<double(const Point&)>& V) {
  std::vector<double> out(grid.size(), 0.0);
  if (!V) return out;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = V(grid.point(k));
    if (!std::isfinite(out[k])) throw InputError("potential not finite on the grid");
  }
  return out;
}

cplx sesq(const MagneticForm& form, const std::vector<double>& potential, const GridState& u,
          const GridState& v) {
  require_same_grid(u.grid, v.grid);
  cplx s = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k)
    s += potential[k] * std::conj(u.values[k]) * v.values[k];
  return form.kinetic(u, v) + s * u.grid.cell();
}

double form_q(const MagneticForm& form, const PotentialSpec& V, const GridState& phi) {
  require_same_grid(form.grid(), phi.grid);
  if (phi.boundary_ratio() > kBoundaryTol)
    throw AdmissibilityError("test state has mass at the grid boundary");
  return sesq(form, potential_on(phi.grid, V.V), phi, phi).real();
}

// ---------------------------------------------------------------------------

double state_radius(const GridState& phi, double floor) {
  double peak = 0.0;
  for (const auto& v : phi.values) peak = std::max(peak, std::abs(v));
  double rho = 0.0;
  for (std::size_t k = 0; k < phi.values.size(); ++k)
    if (std::abs(phi.values[k]) > floor * peak)
      rho = std::max(rho, norm(phi.grid.point(k), phi.grid.dimension));
  return rho;
}

namespace {

struct Stencil {
  int base = 0;
  std::vector<double> w;
};

// Lagrange weights for the fractional node index p.
Stencil lagrange(double p, int S) {
  Stencil st;
  st.base = static_cast<int>(std::floor(p)) - S / 2 + 1;
  st.w.assign(S, 1.0);
  for (int a = 0; a < S; ++a) {
    const double xa = st.base + a;
    for (int b = 0; b < S; ++b)
      if (b != a) st.w[a] *= (p - (st.base + b)) / (xa - (st.base + b));
  }
  return st;
}

}  // namespace

GridState dilation_apply(const GridState& phi, double t, const DilationOptions& opt) {
  if (!(std::fabs(t) <= 0.5)) throw InputError("dilation parameter must satisfy |t| <= 0.5");
  if (opt.stencil < 2 || opt.stencil % 2) throw InputError("stencil must be even and >= 2");
  if (t == 0.0) return phi;
  const Grid& g = phi.grid;
  const double rho = state_radius(phi, opt.support_floor);
  if (std::exp(std::fabs(t)) * rho > opt.support_fraction * g.L)
    throw AdmissibilityError("dilated state leaves the grid");

  const int n = g.n;
  const double et = std::exp(t);
  std::vector<Stencil> st(n);
  for (int i = 0; i < n; ++i) {
    const double y = et * g.coord(i);
    st[i] = lagrange((y - g.origin) / g.h - 1.0, opt.stencil);
  }
  const double amp = std::exp(0.5 * t * g.dimension);
  GridState out{g, std::vector<cplx>(phi.values.size())};

  if (g.dimension == 1) {
    // odd reflection through the Dirichlet wall at 0
    const auto at = [&](int m) -> cplx {
      if (m == -1 || m >= n) return 0.0;
      if (m < -1) {
        const int r = -m - 2;
        return r < n ? -phi.values[r] : 0.0;
      }
      return phi.values[m];
    };
    for (int i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (int a = 0; a < opt.stencil; ++a) s += st[i].w[a] * at(st[i].base + a);
      out.values[i] = amp * s;
    }
    return out;
  }

  const auto at = [&](int i, int j) -> cplx {
    if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
    return phi.values[static_cast<std::size_t>(i) * n + j];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int a = 0; a < opt.stencil; ++a) {
        cplx row = 0.0;
        for (int b = 0; b < opt.stencil; ++b) row += st[j].w[b] * at(st[i].base + a, st[j].base + b);
        s += st[i].w[a] * row;
      }
      out.values[static_cast<std::size_t>(i) * n + j] = amp * s;
    }
  return out;
}

double commutator_quotient(const MagneticForm& form, const PotentialSpec& V,
                           const GridState& phi, double t, const DilationOptions& opt) {
  if (t == 0.0) throw InputError("commutator quotient needs t != 0");
  require_same_grid(form.grid(), phi.grid);
  const GridState plus = dilation_apply(phi, t, opt);
  const GridState minus = dilation_apply(phi, -t, opt);
  GridState iDt{phi.grid, std::vector<cplx>(phi.values.size())};
  for (std::size_t k = 0; k < iDt.values.size(); ++k)
    iDt.values[k] = (plus.values[k] - minus.values[k]) / (2.0 * t);
  return 2.0 * sesq(form, potential_on(phi.grid, V.V), phi, iDt).real();
}

RichardsonReport richardson(const std::vector<double>& t, const std::vector<double>& values,
                            double reference) {
  if (t.size() != values.size() || t.size() < 2)
    throw InputError("richardson needs at least two matching samples");
  RichardsonReport r;
  r.t = t;
  r.values = values;
  r.reference = reference;
  for (double v : values) r.residuals.push_back(std::fabs(v - reference));
  const std::size_t m = values.size();
  if (m >= 3) {
    const double d1 = std::fabs(values[m - 3] - values[m - 2]);
    const double d2 = std::fabs(values[m - 2] - values[m - 1]);
    r.order = d2 > 0.0 ? std::log2(d1 / d2) : kInf;
  } else {
    const double a = r.residuals[0], b = r.residuals[1];
    r.order = b > 0.0 ? std::log2(a / b) : kInf;
  }
  r.extrapolated = (4.0 * values[m - 1] - values[m - 2]) / 3.0;
  r.relative_residual = std::fabs(r.extrapolated - reference) /
                        std::max(std::fabs(reference), std::numeric_limits<double>::min());
  return r;
}

double kato_virial(const MagneticForm& form, const std::function<double(const Point&)>& V1,
                   const GridState& phi) {
  require_same_grid(form.grid(), phi.grid);
  const int d = phi.grid.dimension;
  const auto xV = [&](const Point& x) { return scale(x, V1(x)); };
  // Richardson combination of single and double edges cancels the h^2 term.
  const double im = (4.0 * form.cross(xV, phi, phi).imag() - form.cross(xV, phi, phi, 2).imag()) / 3.0;
  const auto pot = potential_on(phi.grid, V1);
  double s = 0.0;
  for (std::size_t k = 0; k < pot.size(); ++k) s += pot[k] * std::norm(phi.values[k]);
  return 2.0 * im - d * s * phi.grid.cell();
}

namespace {

double node_average(const GridState& phi, const std::function<double(const Point&)>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < phi.values.size(); ++k) {
    const double v = std::norm(phi.values[k]);
    if (v == 0.0) continue;
    s += f(phi.grid.point(k)) * v;
  }
  return s * phi.grid.cell();
}

double potential_virial(const MagneticForm& form, const PotentialSpec& V, const GridState& phi) {
  const int d = phi.grid.dimension;
  if (V.has_virial()) return node_average(phi, V.virial);
  if (V.has_split()) {
    const auto V2 = V.V2;
    return kato_virial(form, V.V1, phi) +
           node_average(phi, [&](const Point& x) { return numerical_virial(V2, x, d); });
  }
  return kato_virial(form, V.V, phi);
}

std::function<Point(const Point&)> btilde_fn(const FieldSpec& field) {
  return [&field](const Point& x) { return btilde(field, x); };
}

void check_field(const MagneticForm& form, const FieldSpec* field) {
  if (!field) return;
  if (form.grid().dimension != 2 || field->dimension() != 2)
    throw InputError("the virial bench supports 2D fields only");
  const GaugePotential A = form.gauge() ? *form.gauge() : zero_gauge(2);
  const double L = form.grid().L;
  const Box box{2, {-L, -L, 0.0}, {L, L, 0.0}};
  const double res = curl_check(A, *field, 1e-4, box, CurlOptions{64, 0.05});
  if (!(res < 1e-4)) throw InputError("vector potential does not match the field (curl residual)");
}

}  // namespace

double virial_rhs(const MagneticForm& form, const FieldSpec* field, const PotentialSpec& V,
                  const GridState& phi) {
  require_same_grid(form.grid(), phi.grid);
  check_field(form, field);
  double total = 2.0 * form.kinetic(phi, phi).real();
  if (field) total += 2.0 * form.cross(btilde_fn(*field), phi, phi).real();
  return total - potential_virial(form, V, phi);
}

// ---------------------------------------------------------------------------

WeightFunction::WeightFunction(double mu_, double eps_, double lam_) : mu(mu_), eps(eps_), lam(lam_) {
  if (!(mu >= 0.0) || !(eps > 0.0) || !(lam > 0.0) || !std::isfinite(mu) || !std::isfinite(eps) ||
      !std::isfinite(lam))
    throw InputError("weight needs mu >= 0, eps > 0, lam > 0");
}

double WeightFunction::s(const Point& x, int dim) const { return std::sqrt(lam + dot(x, x, dim)); }

double WeightFunction::F(const Point& x, int dim) const {
  return mu / eps * -std::expm1(-eps * s(x, dim));
}

double WeightFunction::g(const Point& x, int dim) const {
  const double v = s(x, dim);
  return mu * std::exp(-eps * v) / v;
}

double WeightFunction::grad_sq(const Point& x, int dim) const {
  const double gv = g(x, dim);
  return gv * gv * dot(x, x, dim);
}

// With x.grad acting on radial functions as ((s^2 - lam)/s) d/ds.
double WeightFunction::x_grad_g(const Point& x, int dim) const {
  const double v = s(x, dim);
  const double g1 = -g(x, dim) * (eps + 1.0 / v);
  return (v - lam / v) * g1;
}

double WeightFunction::x_grad_sq_g(const Point& x, int dim) const {
  const double v = s(x, dim);
  const double e = mu * std::exp(-eps * v);
  const double g1 = -e / v * (eps + 1.0 / v);
  const double g2 = e * (eps * eps / v + 2.0 * eps / (v * v) + 2.0 / (v * v * v));
  const double k1 = (1.0 + lam / (v * v)) * g1 + (v - lam / v) * g2;
  return (v - lam / v) * k1;
}

double WeightFunction::x_grad_grad_sq(const Point& x, int dim) const {
  const double v = s(x, dim);
  const double e2 = mu * mu * std::exp(-2.0 * eps * v);
  const double p1 = e2 * (-2.0 * eps * (1.0 - lam / (v * v)) + 2.0 * lam / (v * v * v));
  return (v - lam / v) * p1;
}

double eigen_residual(const MagneticForm& form, const std::vector<double>& potential,
                      const GridState& psi, double E) {
  const auto Hpsi = form.apply(psi.values, potential);
  double r = 0.0, m = 0.0;
  for (std::size_t k = 0; k < Hpsi.size(); ++k) {
    r += std::norm(Hpsi[k] - E * psi.values[k]);
    m += std::norm(psi.values[k]);
  }
  return m > 0.0 ? std::sqrt(r / m) : 0.0;
}

WeightedVirialReport exp_weighted_virial(const MagneticForm& form, const FieldSpec* field,
                                         const PotentialSpec& V, const GridState& psi, double E,
                                         const WeightFunction& w, double eta_bound) {
  require_same_grid(form.grid(), psi.grid);
  check_field(form, field);
  const Grid& grid = psi.grid;
  const int d = grid.dimension;
  const double cell = grid.cell();
  const auto pot = potential_on(grid, V.V);

  WeightedVirialReport r;
  r.eta = eigen_residual(form, pot, psi, E);
  r.warning = r.eta > eta_bound;

  GridState pf = psi;
  for (std::size_t k = 0; k < pf.values.size(); ++k) pf.values[k] *= std::exp(w.F(grid.point(k), d));

  // Without a split the whole potential is treated as V2.
  std::function<double(const Point&)> V1, V2;
  if (V.has_split()) {
    V1 = V.V1;
    V2 = V.V2;
  } else {
    V1 = [](const Point&) { return 0.0; };
    V2 = V.V;
  }
  const auto v2_virial = [&](const Point& x) {
    if (!V.has_split() && V.has_virial()) return V.virial(x);
    return numerical_virial(V2, x, d);
  };

  double energy = 0.0, mass = 0.0, rest = 0.0, weight_terms = 0.0, gD = 0.0;
  std::vector<std::vector<cplx>> Pi;
  for (int a = 0; a < d; ++a) Pi.push_back(form.node_momentum(pf.values, a));
  for (std::size_t k = 0; k < pf.values.size(); ++k) {
    const double m = std::norm(pf.values[k]);
    const Point x = grid.point(k);
    mass += m;
    if (m != 0.0) {
      energy += (E + w.grad_sq(x, d)) * m;
      rest += (d * V1(x) - pot[k] - v2_virial(x)) * m;
      weight_terms += (w.x_grad_sq_g(x, d) - w.x_grad_grad_sq(x, d)) * m;
    }
    cplx D = -kI * (0.5 * d) * pf.values[k];
    for (int a = 0; a < d; ++a) D += x[a] * Pi[a][k];
    gD += w.g(x, d) * std::norm(D);
  }
  energy *= cell;
  mass *= cell;
  rest *= cell;
  weight_terms *= cell;
  gD *= cell;

  const double kin = form.kinetic(pf, pf).real();
  const auto xV1 = [&](const Point& x) { return scale(x, V1(x)); };
  double b_term = 0.0;
  if (field) b_term = 2.0 * form.cross(btilde_fn(*field), pf, pf).real();
  const double kato = -2.0 * form.cross(xV1, pf, pf).imag();

  r.rhs1 = energy + b_term + kato + kin + rest;
  r.rhs2 = -4.0 * gD + weight_terms;
  r.boost_form = sesq(form, pot, pf, pf).real();
  r.boost_energy = energy;
  r.boost_residual = std::fabs(r.boost_form - r.boost_energy);
  r.norm_sq = mass;
  return r;
}

double ims_check(const MagneticForm& form, const PotentialSpec& V,
                 const std::function<double(const Point&)>& xi,
                 const std::function<Point(const Point&)>& grad_xi, const GridState& phi) {
  require_same_grid(form.grid(), phi.grid);
  const Grid& grid = phi.grid;
  const int d = grid.dimension;
  const auto pot = potential_on(grid, V.V);
  GridState u = phi, w = phi;
  double grad = 0.0;
  for (std::size_t k = 0; k < phi.values.size(); ++k) {
    const Point x = grid.point(k);
    const double c = xi(x);
    u.values[k] *= c;
    w.values[k] *= c * c;
    const Point gx = grad_xi(x);
    grad += dot(gx, gx, d) * std::norm(phi.values[k]);
  }
  grad *= grid.cell();
  return std::fabs(sesq(form, pot, w, phi).real() - sesq(form, pot, u, u).real() + grad);
}

// ---------------------------------------------------------------------------

Eigenpair eigenpair_1d(const Grid& grid, const std::function<double(const Point&)>& V,
                       std::size_t index) {
  if (grid.dimension != 1) throw InputError("eigenpair_1d needs a half-line grid");
  RadialChannel ch;
  ch.W = [&V](double r) { return V(Point{r, 0.0, 0.0}); };
  ch.h = [](double) { return 0.0; };
  ch.label = "grid";
  const auto T = discretize(ch, grid.L, static_cast<std::size_t>(grid.n));
  if (index >= T.N) throw InputError("eigenpair index beyond the grid");

  auto [lo, hi] = T.gershgorin();
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(T, mid) > index) hi = mid; else lo = mid;
  }
  Eigenpair out;
  out.E = 0.5 * (lo + hi);
  const auto vec = eigenvector(T, out.E);
  out.psi = GridState{grid, std::vector<cplx>(vec.size())};
  const double s = 1.0 / std::sqrt(grid.h);
  for (std::size_t k = 0; k < vec.size(); ++k) out.psi.values[k] = vec[k] * s;
  const MagneticForm form(grid);
  const auto pot = potential_on(grid, V);
  out.eta = eigen_residual(form, pot, out.psi, out.E);
  return out;
}

namespace {

// Solves (H - sigma) x = b by conjugate gradients; H - sigma is positive definite.
std::vector<cplx> cg_solve(const MagneticForm& form, const std::vector<double>& shifted,
                           const std::vector<cplx>& b, double tol) {
  std::vector<cplx> x(b.size(), 0.0), r = b, p = b;
  double rr = 0.0, bb = 0.0;
  for (const auto& v : r) rr += std::norm(v);
  bb = rr;
  for (std::size_t it = 0; it < 20 * b.size() && rr > tol * tol * bb; ++it) {
    const auto Ap = form.apply(p, shifted);
    cplx pAp = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) pAp += std::conj(p[k]) * Ap[k];
    const double alpha = rr / pAp.real();
    double rr_new = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
      rr_new += std::norm(r[k]);
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
  }
  return x;
}

}  // namespace

Eigenpair ground_state_2d(const MagneticForm& form, const std::function<double(const Point&)>& V,
                          const GridState& start, int max_iterations, double tol) {
  require_same_grid(form.grid(), start.grid);
  const auto pot = potential_on(start.grid, V);
  const double sigma = *std::min_element(pot.begin(), pot.end()) - 1.0;
  std::vector<double> shifted(pot);
  for (auto& v : shifted) v -= sigma;

  Eigenpair out;
  out.psi = start;
  const auto normalize = [&](GridState& s) {
    const double nrm = s.norm();
    if (nrm == 0.0) throw InputError("zero start state");
    for (auto& v : s.values) v /= nrm;
  };
  normalize(out.psi);
  for (int it = 0; it <= max_iterations; ++it) {
    const auto Hpsi = form.apply(out.psi.values, pot);
    cplx e = 0.0;
    for (std::size_t k = 0; k < Hpsi.size(); ++k) e += std::conj(out.psi.values[k]) * Hpsi[k];
    out.E = e.real() * start.grid.cell();
    out.eta = eigen_residual(form, pot, out.psi, out.E);
    out.iterations = it;
    if (out.eta < tol || it == max_iterations) break;
    out.psi.values = cg_solve(form, shifted, out.psi.values, 1e-3 * tol);
    normalize(out.psi);
  }
  return out;
}

}  // namespace specbound

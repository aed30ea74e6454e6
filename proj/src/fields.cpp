#include "specbound/fields.hpp"

#include <algorithm>
#include <random>

#include "specbound/quadrature.hpp"

namespace specbound {

namespace {

double matrix_size(const Matrix& m, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s = std::max(s, std::fabs(m[i][j]));
  return s;
}

// Deterministic probe points in [-r, r]^dim.
std::vector<Point> probe_points(int dim, int count, double r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-r, r);
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) {
    Point p{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) p[k] = u(rng);
    pts.push_back(p);
  }
  return pts;
}

Point curl_of_matrix(const Matrix& m, int dim) {
  if (dim == 2) return {m[1][0], 0.0, 0.0};
  return {m[2][1], m[0][2], m[1][0]};
}

}  // namespace

FieldSpec FieldSpec::radial(Profile b, std::string label) {
  if (!b) throw InputError("radial field: profile is empty");
  FieldSpec f;
  f.dim_ = 2;
  f.kind_ = FieldKind::RadialProfile;
  f.profile_ = std::move(b);
  f.label_ = std::move(label);
  return f;
}

FieldSpec FieldSpec::sampler(int dim, Sampler B, std::string label) {
  if (dim != 2 && dim != 3) throw InputError("field sampler: dimension must be 2 or 3");
  if (!B) throw InputError("field sampler: sampler is empty");
  FieldSpec f;
  f.dim_ = dim;
  f.kind_ = FieldKind::Sampler;
  f.sampler_ = std::move(B);
  f.label_ = std::move(label);
  for (const Point& p : probe_points(dim, 32, 10.0, 7)) {
    const Matrix m = f.sampler_(p);
    const double size = matrix_size(m, dim);
    if (!std::isfinite(size)) continue;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (std::fabs(m[i][j] + m[j][i]) > 1e-14 * (1.0 + size))
          throw InputError("field sampler: matrix is not antisymmetric");
  }
  return f;
}

FieldSpec FieldSpec::aharonov_bohm(double flux, std::string label) {
  if (!std::isfinite(flux)) throw InputError("aharonov_bohm: flux must be finite");
  FieldSpec f;
  f.dim_ = 2;
  f.kind_ = FieldKind::AharonovBohm;
  f.flux_ = flux;
  f.label_ = std::move(label);
  return f;
}

FieldSpec FieldSpec::with_base(const Point& w) const {
  FieldSpec f = *this;
  f.base_ = w;
  if (dim_ == 2) f.base_[2] = 0.0;
  return f;
}

Matrix FieldSpec::matrix_at(const Point& y) const {
  switch (kind_) {
    case FieldKind::RadialProfile:
      return field_matrix_2d(profile_(std::hypot(y[0], y[1])));
    case FieldKind::Sampler:
      return sampler_(y);
    case FieldKind::AharonovBohm:
      break;
  }
  throw InputError("aharonov_bohm field has no pointwise matrix");
}

Matrix field_matrix_2d(double B) {
  Matrix m{};
  m[0][1] = -B;
  m[1][0] = B;
  return m;
}

Matrix cross_matrix(const Point& B) {
  Matrix m{};
  m[0][1] = -B[2];
  m[0][2] = B[1];
  m[1][0] = B[2];
  m[1][2] = -B[0];
  m[2][0] = -B[1];
  m[2][1] = B[0];
  return m;
}

Point btilde(const FieldSpec& field, const Point& x) {
  if (field.kind() == FieldKind::AharonovBohm)
    throw InputError("btilde: aharonov_bohm fields are handled by their closed-form gauge");
  if (!all_finite(x)) throw InputError("btilde: point is not finite");
  const int d = field.dimension();
  Point out;
  if (field.kind() == FieldKind::RadialProfile) {
    const Point& w = field.base();
    const double b = field.profile()(std::hypot(x[0] + w[0], x[1] + w[1]));
    out = {-b * x[1], b * x[0], 0.0};
  } else {
    out = apply(field.matrix_at(x + field.base()), x, d);
  }
  if (!all_finite(out)) throw InputError("btilde: field sampler returned a non-finite value");
  return out;
}

PotentialSpec PotentialSpec::zero() {
  PotentialSpec p;
  p.V = [](const Point&) { return 0.0; };
  p.virial = [](const Point&) { return 0.0; };
  p.label = "zero";
  return p;
}

void PotentialSpec::validate(int dim) const {
  if (!V) throw InputError("potential: V is empty");
  if (static_cast<bool>(V1) != static_cast<bool>(V2))
    throw InputError("potential: split needs both V1 and V2");
  if (!has_split()) return;
  for (const Point& p : probe_points(dim, 32, 10.0, 11)) {
    const double v = V(p);
    if (!std::isfinite(v)) continue;
    if (std::fabs(v - V1(p) - V2(p)) > 1e-12 * (1.0 + std::fabs(v)))
      throw InputError("potential: split V1 + V2 does not reproduce V");
  }
}

GaugePotential zero_gauge(int dim) {
  GaugePotential g;
  g.dimension = dim;
  g.A = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
  g.transversal = true;
  return g;
}

GaugePotential aharonov_bohm_gauge(double flux) {
  GaugePotential g;
  g.dimension = 2;
  g.A = [flux](const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return Point{-flux * x[1] / r2, flux * x[0] / r2, 0.0};
  };
  g.transversal = true;
  return g;
}

namespace {

// int_0^1 B~(t x) dt with the given rule; B~(t x) = t B(t x + w) x.
Point line_integral(const FieldSpec& field, const Point& x, const quad::Rule& rule) {
  const int d = field.dimension();
  const Point& w = field.base();
  // Sub-panels of unit length in space along the segment [0, x].
  quad::DyadicOptions opt;
  opt.resolution = 1.0 / std::max(1.0, norm(x, d));
  if (field.kind() == FieldKind::RadialProfile) {
    const auto& b = field.profile();
    auto f = [&](double t) { return t * b(std::hypot(t * x[0] + w[0], t * x[1] + w[1])); };
    const auto res = quad::integrate_dyadic<double>(f, 1.0, rule, opt);
    const double s = res.converged ? res.value : std::numeric_limits<double>::quiet_NaN();
    return {-s * x[1], s * x[0], 0.0};
  }
  auto f = [&](double t) { return apply(field.matrix_at(x * t + w), x, d) * t; };
  const auto res = quad::integrate_dyadic<Point>(f, 1.0, rule, opt);
  if (!res.converged) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
  return res.value;
}

}  // namespace

GaugePotential poincare_gauge(const FieldSpec& field, int nodes, const GaugeOptions& opt) {
  if (field.kind() == FieldKind::AharonovBohm)
    throw InputError("poincare_gauge: aharonov_bohm fields use aharonov_bohm_gauge");
  if (nodes < 8) throw InputError("poincare_gauge: nodes must be at least 8");
  const quad::Rule& rule = quad::gauss_legendre(nodes);
  const quad::Rule& fine = quad::gauss_legendre(2 * nodes);
  const int d = field.dimension();

  const auto probes = probe_points(d, opt.probes, opt.probe_radius, 3);
  std::vector<Point> coarse_vals, fine_vals;
  double scale_max = 0.0;
  for (const Point& p : probes) {
    coarse_vals.push_back(line_integral(field, p, rule));
    fine_vals.push_back(line_integral(field, p, fine));
    scale_max = std::max(scale_max, quad::magnitude(fine_vals.back()));
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double gap = quad::magnitude(coarse_vals[i] - fine_vals[i]);
    const double ref = quad::magnitude(fine_vals[i]) + 1e-12 * scale_max;
    if (!(gap <= opt.tol * ref) && !(ref == 0.0 && gap == 0.0))
      throw GaugeError("poincare_gauge: line integral did not converge under node doubling");
  }

  GaugePotential g;
  g.dimension = d;
  g.quadrature_nodes = nodes;
  g.transversal = true;
  g.A = [field, &rule](const Point& x) { return line_integral(field, x, rule); };
  return g;
}

double curl_check(const GaugePotential& gauge, const FieldSpec& field, double h, const Box& box,
                  const CurlOptions& opt) {
  const int d = field.dimension();
  if (gauge.dimension != d) throw InputError("curl_check: dimension mismatch");
  if (field.kind() == FieldKind::AharonovBohm)
    throw InputError("curl_check: aharonov_bohm field is singular");
  const std::uint64_t bases[3] = {2, 3, 5};
  double worst = 0.0;
  int taken = 0;
  for (std::uint64_t idx = 1; taken < opt.samples && idx < 100u * opt.samples; ++idx) {
    Point x{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k)
      x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * quad::halton(idx, bases[k]);
    if (norm(x, d) < opt.exclusion_radius) continue;
    ++taken;
    // D[i][j] = d A_i / d x_j.
    Matrix D{};
    for (int j = 0; j < d; ++j) {
      Point xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Point ap = gauge(xp), am = gauge(xm);
      for (int i = 0; i < d; ++i) D[i][j] = (ap[i] - am[i]) / (2.0 * h);
    }
    Point curl;
    if (d == 2)
      curl = {D[1][0] - D[0][1], 0.0, 0.0};
    else
      curl = {D[2][1] - D[1][2], D[0][2] - D[2][0], D[1][0] - D[0][1]};
    const Point B = curl_of_matrix(field.matrix_at(x + field.base()), d);
    const double r = quad::magnitude(curl - B) / (1.0 + quad::magnitude(B));
    if (!std::isfinite(r)) return kInf;
    worst = std::max(worst, r);
  }
  return worst;
}

double gauge_regularity_norm(const FieldSpec& field, double R, int nodes) {
  if (!(R > 0.0)) throw InputError("gauge_regularity_norm: R must be positive");
  const int d = field.dimension();
  auto f = [&](const Point& y) {
    const double r = norm(y, d);
    const Point b = btilde(field, y);
    const double lg = std::log(R / r);
    return std::pow(r, 2 - d) * lg * lg * dot(b, b, d);
  };
  quad::DyadicOptions opt;
  opt.min_shells = 4;
  const auto res = quad::integrate_ball(f, d, R, nodes, 0, opt);
  if (!res.converged || !std::isfinite(res.value)) return kInf;
  return std::sqrt(res.value);
}

double weighted_gauge_norm(const GaugePotential& gauge, double R, int nodes) {
  const int d = gauge.dimension;
  auto f = [&](const Point& y) {
    const Point a = gauge(y);
    return std::pow(norm(y, d), 2 - d) * dot(a, a, d);
  };
  quad::DyadicOptions opt;
  opt.min_shells = 4;
  opt.rel_tol = 1e-13;
  const auto res = quad::integrate_ball(f, d, R, nodes, 0, opt);
  if (!res.converged || !std::isfinite(res.value)) return kInf;
  return std::sqrt(res.value);
}

}  // namespace specbound

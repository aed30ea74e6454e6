#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "specbound/fields.hpp"
#include "specbound/virial.hpp"

using namespace specbound;

namespace {

double radial_oracle(const std::function<double(double)>& f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double r) { return f(r) * 2.0 * kPi * r; }, 0.0, 14.0, 20, 1e-14);
}

GridState gaussian(const Grid& g, double sigma, Point c = {0, 0, 0}, double k = 0.0) {
  return sample(g, [=](const Point& x) {
    const double r2 = std::pow(x[0] - c[0], 2) + std::pow(x[1] - c[1], 2);
    return std::exp(-r2 / (2 * sigma * sigma)) * std::exp(cplx(0.0, k * x[0]));
  });
}

// Odd ground state of the half-line oscillator.
GridState odd_oscillator(const Grid& g) {
  return sample(g, [](const Point& x) { return cplx(x[0] * std::exp(-x[0] * x[0] / 2)); });
}

GaugePotential symmetric_gauge(double B0) {
  GaugePotential A;
  A.dimension = 2;
  A.A = [B0](const Point& x) { return Point{-0.5 * B0 * x[1], 0.5 * B0 * x[0], 0.0}; };
  return A;
}

PotentialSpec radial_potential(std::function<double(double)> v,
                               std::function<double(double)> rv = nullptr) {
  PotentialSpec V;
  V.V = [v](const Point& x) { return v(std::hypot(x[0], x[1])); };
  if (rv) V.virial = [rv](const Point& x) { return rv(std::hypot(x[0], x[1])); };
  return V;
}

}  // namespace

TEST_CASE("grids place nodes strictly inside the box") {
  const Grid g = square(10.0, 0.05);
  CHECK(g.n == 399);
  CHECK(g.h == doctest::Approx(0.05));
  CHECK(g.coord(0) == doctest::Approx(-9.95));
  CHECK(g.coord(g.n - 1) == doctest::Approx(9.95));
  const Grid l = half_line(10.0, 0.01);
  CHECK(l.n == 999);
  CHECK(l.coord(0) == doctest::Approx(0.01));
  CHECK_THROWS_AS(square(1.0, 2.0), InputError);
}

TEST_CASE("form_q of a Gaussian matches the continuum kinetic energy") {
  // |grad e^{-r^2/2}|^2 = r^2 e^{-r^2}
  const double kin = radial_oracle([](double r) { return r * r * std::exp(-r * r); });
  const double mass = radial_oracle([](double r) { return std::exp(-r * r); });
  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    const Grid g = square(8.0, h);
    const MagneticForm form(g);
    const double q = form_q(form, PotentialSpec::zero(), gaussian(g, 1.0));
    const double err = std::fabs(q - kin);
    CHECK(err / kin < 2e-3);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
  // unit-width convention: kinetic energy per unit mass is d/2
  CHECK(kin / mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("form_q trivial cases") {
  const Grid g = square(8.0, 0.1);
  const MagneticForm form(g);
  const GridState zero = sample(g, [](const Point&) { return cplx(0.0); });
  CHECK(form_q(form, PotentialSpec::zero(), zero) == 0.0);

  const GridState phi = gaussian(g, 1.0, {0.3, -0.2, 0}, 0.7);
  PotentialSpec one;
  one.V = [](const Point&) { return 1.0; };
  const double kin = form_q(form, PotentialSpec::zero(), phi);
  const double m = std::pow(phi.norm(), 2);
  CHECK(form_q(form, one, phi) == doctest::Approx(kin + m).epsilon(1e-13));

  const GridState wide = gaussian(g, 4.0);
  CHECK_THROWS_AS(form_q(form, PotentialSpec::zero(), wide), AdmissibilityError);
}

TEST_CASE("discrete gauge covariance") {
  const Grid g = square(8.0, 0.05);
  const double B0 = 0.8;
  // smooth compactly supported chi
  const auto chi = [](const Point& x) {
    const double r2 = (x[0] * x[0] + x[1] * x[1]) / 9.0;
    return r2 < 1.0 ? 0.7 * std::exp(-1.0 / (1.0 - r2)) * (1.0 + x[0]) : 0.0;
  };
  const auto grad_chi = [&](const Point& x) {
    const double r2 = (x[0] * x[0] + x[1] * x[1]) / 9.0;
    if (r2 >= 1.0) return Point{0, 0, 0};
    const double e = 0.7 * std::exp(-1.0 / (1.0 - r2));
    const double de = -e / std::pow(1.0 - r2, 2) * 2.0 / 9.0;  // d e / d(|x|^2) times 2
    return Point{de * x[0] * (1.0 + x[0]) + e, de * x[1] * (1.0 + x[0]), 0.0};
  };
  GaugePotential A = symmetric_gauge(B0);
  GaugePotential A2 = A;
  A2.A = [A, grad_chi](const Point& x) { return A(x) + grad_chi(x); };
  const GridState phi = gaussian(g, 1.0, {0.4, 0.1, 0}, 0.5);
  GridState phi2 = phi;
  for (std::size_t k = 0; k < phi2.values.size(); ++k)
    phi2.values[k] *= std::exp(cplx(0.0, chi(g.point(k))));

  const PotentialSpec V = radial_potential([](double r) { return std::exp(-r * r / 2); });
  const double q1 = form_q(MagneticForm(g, A, 4), V, phi);
  const double q2 = form_q(MagneticForm(g, A2, 4), V, phi2);
  CHECK(std::fabs(q1 - q2) / std::fabs(q1) < 1e-8);
}

TEST_CASE("dilation of a Gaussian") {
  const Grid g = square(10.0, 0.05);
  const GridState phi = gaussian(g, 1.0);
  CHECK(dilation_apply(phi, 0.0).values == phi.values);
  const double n0 = phi.norm();
  for (double t : {-0.25, -0.1, 0.1, 0.25}) {
    const GridState u = dilation_apply(phi, t);
    const double s = std::exp(-t);
    const GridState exact = sample(g, [&](const Point& x) {
      return cplx(std::exp(t) * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2 * s * s)));
    });
    double err = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k)
      err = std::max(err, std::abs(u.values[k] - exact.values[k]));
    CHECK(err < 1e-5);
    CHECK(std::fabs(u.norm() - n0) / n0 < 1e-6);
  }
  CHECK_THROWS_AS(dilation_apply(phi, 0.6), InputError);
  const GridState wide = gaussian(g, 1.4);
  CHECK_THROWS_AS(dilation_apply(wide, -0.3), AdmissibilityError);
}

TEST_CASE("dilation on the half-line reflects oddly through the wall") {
  const Grid g = half_line(10.0, 0.01);
  const GridState phi = odd_oscillator(g);
  const double t = 0.2;
  const GridState u = dilation_apply(phi, t);
  double err = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    const double y = std::exp(t) * g.coord(static_cast<int>(k));
    err = std::max(err, std::abs(u.values[k] - std::exp(t / 2) * y * std::exp(-y * y / 2)));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("property: dilation is unitary and iD_t antisymmetric") {
  const Grid g = square(10.0, 0.05);
  DilationOptions opt;
  opt.stencil = 8;
  for (int trial = 0; trial < 4; ++trial) {
    const Point c{0.3 * trial - 0.4, 0.2 - 0.1 * trial, 0};
    GridState phi = gaussian(g, 0.8 + 0.05 * trial, c, 0.5 * trial);
    const double n = phi.norm();
    for (auto& v : phi.values) v /= n;
    for (double t : {0.25, 0.1, 0.03}) {
      const GridState up = dilation_apply(phi, t, opt);
      const GridState um = dilation_apply(phi, -t, opt);
      CHECK(std::fabs(up.norm() - 1.0) < 1e-6);
      const cplx a = inner(phi, up) - inner(phi, um);
      CHECK(std::fabs(a.real() / (2 * t)) < 1e-10);
    }
  }
}

TEST_CASE("commutator quotient approaches 2||P phi||^2 at second order") {
  const Grid g = square(10.0, 0.05);
  const MagneticForm form(g);
  const GridState phi = gaussian(g, 1.0, {0.5, 0, 0}, 0.3);
  const double ref = virial_rhs(form, nullptr, PotentialSpec::zero(), phi);
  CHECK(ref == doctest::Approx(2.0 * form.kinetic(phi, phi).real()).epsilon(1e-14));
  std::vector<double> ts{0.1, 0.05, 0.025}, qs;
  for (double t : ts) qs.push_back(commutator_quotient(form, PotentialSpec::zero(), phi, t));
  const auto rep = richardson(ts, qs, ref);
  CHECK(rep.order >= 1.9);
  CHECK(rep.relative_residual < 1e-3);
}

TEST_CASE("oscillator eigenfunction has vanishing commutator") {
  const Grid g = half_line(10.0, 0.01);
  const MagneticForm form(g);
  PotentialSpec V;
  V.V = [](const Point& x) { return x[0] * x[0]; };
  V.virial = [](const Point& x) { return 2 * x[0] * x[0]; };
  const GridState phi = odd_oscillator(g);
  const double scale = 2.0 * form.kinetic(phi, phi).real();
  // at an eigenfunction every quotient vanishes, not just the limit
  for (double t : {0.1, 0.05, 0.025}) CHECK(std::fabs(commutator_quotient(form, V, phi, t)) / scale < 1e-4);
  CHECK(std::fabs(virial_rhs(form, nullptr, V, phi)) / scale < 1e-4);
  PotentialSpec no_virial;
  no_virial.V = V.V;
  CHECK(std::fabs(virial_rhs(form, nullptr, no_virial, phi)) / scale < 1e-4);
}

TEST_CASE("constant field cross term agrees with the pointwise value") {
  // For real radial phi only -A contributes: Re⟨B~ phi, (P-A) phi⟩ = -(B0^2/2) ∫ r^2 phi^2
  const double B0 = 1.3;
  const FieldSpec field = FieldSpec::radial([B0](double) { return B0; });
  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    const Grid g = square(8.0, h);
    const MagneticForm form(g, symmetric_gauge(B0));
    const GridState phi = gaussian(g, 1.0);
    const double edge = form.cross([&](const Point& x) { return btilde(field, x); }, phi, phi).real();
    double point = 0.0;
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
      const Point x = g.point(k);
      point -= 0.5 * B0 * B0 * dot(x, x, 2) * std::norm(phi.values[k]);
    }
    point *= g.cell();
    const double err = std::fabs(edge - point) / std::fabs(point);
    CHECK(err < 5e-3);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("virial_rhs requires a consistent vector potential") {
  const Grid g = square(6.0, 0.1);
  const FieldSpec field = FieldSpec::radial([](double) { return 1.0; });
  const GridState phi = gaussian(g, 1.0);
  CHECK_THROWS_AS(virial_rhs(MagneticForm(g), &field, PotentialSpec::zero(), phi), InputError);
  CHECK_NOTHROW(virial_rhs(MagneticForm(g, symmetric_gauge(1.0)), &field, PotentialSpec::zero(), phi));
}

TEST_CASE("Kato form of the virial") {
  const Grid g = square(8.0, 0.02);
  const MagneticForm form(g, symmetric_gauge(0.5));
  const GridState phi = gaussian(g, 1.0);
  const auto V1 = [](const Point& x) { return std::exp(-dot(x, x, 2)); };
  double direct = 0.0;
  for (std::size_t k = 0; k < phi.values.size(); ++k) {
    const Point x = g.point(k);
    const double r2 = dot(x, x, 2);
    direct += -2.0 * r2 * std::exp(-r2) * std::norm(phi.values[k]);
  }
  direct *= g.cell();
  CHECK(std::fabs(kato_virial(form, V1, phi) - direct) / std::fabs(direct) < 1e-5);

  // constant V1: the two terms cancel
  const double c = 2.5;
  const double k = kato_virial(form, [c](const Point&) { return c; }, phi);
  CHECK(std::fabs(k) / (c * std::pow(phi.norm(), 2)) < 1e-5);

  const GridState zero = sample(g, [](const Point&) { return cplx(0.0); });
  CHECK(kato_virial(form, V1, zero) == 0.0);
}

TEST_CASE("IMS localization residual") {
  const double L = 6.0;
  const auto xi = [L](const Point& x) { return 0.5 * (1.0 - std::tanh(4.0 * (norm(x, 2) - L / 2))); };
  const auto grad_xi = [L](const Point& x) {
    const double r = norm(x, 2);
    const double d = -2.0 / std::pow(std::cosh(4.0 * (r - L / 2)), 2);
    return r > 0 ? scale(x, d / r) : Point{0, 0, 0};
  };
  const PotentialSpec V = radial_potential([](double r) { return std::exp(-r * r); });
  std::vector<double> res;
  for (double h : {0.1, 0.05, 0.025}) {
    const Grid g = square(L, h);
    const MagneticForm form(g, symmetric_gauge(0.7));
    const GridState phi = gaussian(g, 1.2, {0.3, 0, 0}, 0.4);
    res.push_back(ims_check(form, V, xi, grad_xi, phi));
    if (h == 0.1) {
      CHECK(ims_check(form, V, [](const Point&) { return 1.0; },
                      [](const Point&) { return Point{0, 0, 0}; }, phi) < 1e-13);
      CHECK(ims_check(form, V, [](const Point&) { return 0.0; },
                      [](const Point&) { return Point{0, 0, 0}; }, phi) == 0.0);
    }
  }
  const double slope = std::log2(res[1] / res[2]);
  CHECK(slope >= 1.8);
  CHECK(slope <= 2.2);
}

TEST_CASE("weight function derivatives match finite differences") {
  const WeightFunction w(0.3, 0.5, 1.0);
  for (int dim : {1, 2}) {
    for (double r : {0.0, 0.4, 1.7, 5.0}) {
      const Point x = dim == 1 ? Point{r, 0, 0} : Point{0.6 * r, 0.8 * r, 0};
      const auto along = [&](double t, auto f) { return f(scale(x, std::exp(t))); };
      const double d = 1e-4;
      // x.grad f = d/dt f(e^t x) at t = 0
      const auto xg = [&](auto f) { return (along(d, f) - along(-d, f)) / (2 * d); };
      const auto g = [&](const Point& y) { return w.g(y, dim); };
      const auto gsq = [&](const Point& y) { return w.grad_sq(y, dim); };
      const auto xgg = [&](const Point& y) { return w.x_grad_g(y, dim); };
      CHECK(w.x_grad_g(x, dim) == doctest::Approx(xg(g)).epsilon(1e-7));
      CHECK(w.x_grad_grad_sq(x, dim) == doctest::Approx(xg(gsq)).epsilon(1e-7));
      CHECK(w.x_grad_sq_g(x, dim) == doctest::Approx(xg(xgg)).epsilon(1e-7));
      // grad F = g x
      const double F1 = w.F(scale(x, 1.0 + d), dim), F0 = w.F(scale(x, 1.0 - d), dim);
      CHECK((F1 - F0) / (2 * d) == doctest::Approx(w.g(x, dim) * dot(x, x, dim)).epsilon(1e-7));
      CHECK(w.F(x, dim) >= 0.0);
      CHECK(w.F(x, dim) <= w.mu / w.eps);
      CHECK(w.g(x, dim) > 0.0);
    }
  }
  CHECK_THROWS_AS(WeightFunction(0.1, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(WeightFunction(-0.1, 1.0, 1.0), InputError);
}

TEST_CASE("discrete oscillator eigenpair and the energy boost") {
  const Grid g = half_line(12.0, 0.01);
  const auto Vf = [](const Point& x) { return x[0] * x[0]; };
  const Eigenpair ep = eigenpair_1d(g, Vf, 0);
  CHECK(ep.E == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(ep.eta < 1e-8);
  PotentialSpec V;
  V.V = Vf;
  const MagneticForm form(g);
  const auto rep = exp_weighted_virial(form, nullptr, V, ep.psi, ep.E, WeightFunction(0.3, 0.5, 1.0));
  CHECK_FALSE(rep.warning);
  CHECK(rep.boost_residual <= 10.0 * (rep.eta + g.h * g.h) * rep.norm_sq);
}

TEST_CASE("weighted virial identities agree at an eigenfunction") {
  const Grid g = half_line(12.0, 0.01);
  const auto Vf = [](const Point& x) { return x[0] * x[0]; };
  const Eigenpair ep = eigenpair_1d(g, Vf, 1);
  const MagneticForm form(g);
  const WeightFunction w(0.3, 0.5, 1.0);

  PotentialSpec plain;
  plain.V = Vf;
  PotentialSpec split = plain;
  split.V1 = Vf;
  split.V2 = [](const Point&) { return 0.0; };
  PotentialSpec halves = plain;
  halves.V1 = [](const Point& x) { return 0.5 * x[0] * x[0]; };
  halves.V2 = halves.V1;
  for (const auto* V : {&plain, &split, &halves}) {
    const auto rep = exp_weighted_virial(form, nullptr, *V, ep.psi, ep.E, w);
    CHECK(std::fabs(rep.rhs1 - rep.rhs2) / rep.norm_sq < 1e-3);
  }
  const auto flat = exp_weighted_virial(form, nullptr, plain, ep.psi, ep.E, WeightFunction(0.0, 0.5, 1.0));
  CHECK(flat.rhs2 == 0.0);
  CHECK(std::fabs(flat.rhs1) / flat.norm_sq < 1e-3);
}

TEST_CASE("weighted identities with a constant field") {
  // (P-A)^2 + |x|^2 in the symmetric gauge: ground state exp(-W r^2/2), E = 2W
  const double B0 = 1.0;
  const double W = std::sqrt(1.0 + B0 * B0 / 4.0);
  const Grid g = square(7.0, 0.05);
  const MagneticForm form(g, symmetric_gauge(B0));
  const FieldSpec field = FieldSpec::radial([B0](double) { return B0; });
  PotentialSpec V;
  V.V = [](const Point& x) { return dot(x, x, 2); };
  V.V1 = V.V;
  V.V2 = [](const Point&) { return 0.0; };
  const GridState start = gaussian(g, 1.0);
  const Eigenpair ep = ground_state_2d(form, V.V, start);
  CHECK(ep.iterations <= 200);
  CHECK(ep.E == doctest::Approx(2.0 * W).epsilon(1e-3));
  CHECK(ep.eta < 1e-8);
  const auto rep = exp_weighted_virial(form, &field, V, ep.psi, ep.E, WeightFunction(0.3, 0.5, 1.0));
  CHECK(std::fabs(rep.rhs1 - rep.rhs2) / rep.norm_sq < 1e-2);
  CHECK(rep.boost_residual <= 10.0 * (rep.eta + g.h * g.h) * rep.norm_sq);
}

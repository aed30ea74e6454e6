#include "specbound/channels.hpp"

#include <cmath>
#include <sstream>

#include "specbound/common.hpp"
#include "specbound/quadrature.hpp"

namespace specbound {

double h_profile(const RadialFn& b, double r, int quad_nodes) {
  if (!(r > 0.0)) throw InputError("h_profile: r must be positive");
  quad::DyadicOptions opt;
  opt.resolution = 1.0;
  opt.adaptive_tol = 1e-13;
  auto f = [&](double s) { return b(s) * s; };
  const auto res = quad::integrate_dyadic<double>(f, r, quad::gauss_legendre(quad_nodes), opt);
  if (!res.converged || !std::isfinite(res.value)) return kInf;
  return res.value / r;
}

RadialChannel miller_simon_channel_from_h(const RadialFn& h, double m, std::string label) {
  RadialChannel ch;
  ch.m = m;
  ch.h = h;
  ch.label = std::move(label);
  ch.W = [h, m](double r) {
    const double hr = h(r);
    return (m * m - 0.25) / (r * r) + hr * hr - 2.0 * m * hr / r;
  };
  return ch;
}

RadialChannel miller_simon_channel(const RadialFn& b, int m, int quad_nodes) {
  if (!b) throw InputError("miller_simon_channel: field profile is empty");
  std::ostringstream label;
  label << "miller_simon m=" << m;
  auto h = [b, quad_nodes](double r) { return h_profile(b, r, quad_nodes); };
  return miller_simon_channel_from_h(h, m, label.str());
}

double wigner_von_neumann(double r) {
  if (r == 0.0) return 0.0;
  const double s = std::sin(r), c = std::cos(r);
  const double g = 2.0 * r - std::sin(2.0 * r);
  const double s3 = s * s * s;
  const double den = 1.0 + g * g;
  return -32.0 * s * (g * g * g * c - 3.0 * g * g * s3 + g * c + s3) / (den * den);
}

RadialChannel wigner_von_neumann_channel() {
  RadialChannel ch;
  ch.m = 0.0;
  ch.label = "wigner_von_neumann s-wave";
  ch.h = [](double) { return 0.0; };
  ch.W = [](double r) { return wigner_von_neumann(r); };
  return ch;
}

RadialChannel aharonov_bohm_channel(double B0, int m, const RadialFn& V_radial) {
  RadialChannel ch;
  const double nu = m - B0;
  // The flux term is absorbed into nu, so h vanishes in this representation.
  ch.m = nu;
  ch.h = [](double) { return 0.0; };
  std::ostringstream label;
  label << "aharonov_bohm B0=" << B0 << " m=" << m;
  ch.label = label.str();
  ch.W = [nu, V_radial](double r) {
    return (nu * nu - 0.25) / (r * r) + (V_radial ? V_radial(r) : 0.0);
  };
  return ch;
}

}  // namespace specbound

#pragma once

#include <functional>
#include <string>

namespace specbound {

using RadialFn = std::function<double(double)>;

// Half-line channel -u'' + W(r) u on (0, inf), Dirichlet at 0.
struct RadialChannel {
  double m = 0.0;  // angular momentum; m - B0 for Aharonov-Bohm
  RadialFn W;
  RadialFn h;  // h(r) profile; zero for potential-only channels
  std::string label;
};

// h(r) = r^{-1} int_0^r b(s) s ds; +inf when the integral diverges at 0.
double h_profile(const RadialFn& b, double r, int quad_nodes = 8);

// W(r) = (m^2 - 1/4)/r^2 + h(r)^2 - 2 m h(r)/r.
RadialChannel miller_simon_channel(const RadialFn& b, int m, int quad_nodes = 8);
// Same channel with h supplied in closed form.
RadialChannel miller_simon_channel_from_h(const RadialFn& h, double m, std::string label);

double wigner_von_neumann(double r);
RadialChannel wigner_von_neumann_channel();

// nu = m - B0: W(r) = (nu^2 - 1/4)/r^2 + V(r).
RadialChannel aharonov_bohm_channel(double B0, int m, const RadialFn& V_radial = nullptr);

}  // namespace specbound

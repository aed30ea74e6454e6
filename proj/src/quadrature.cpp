#include "specbound/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>

namespace specbound::quad {

namespace {

std::mutex g_mutex;

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw InputError("gauss_legendre: node count must be positive");
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(g_mutex);
  auto& slot = cache[n];
  if (!slot) {
    auto rule = std::make_unique<Rule>();
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    for (int i = 0; i < n; ++i) {
      double xi = 0.0, wi = 0.0;
      gsl_integration_glfixed_point(0.0, 1.0, i, &xi, &wi, t);
      rule->x.push_back(xi);
      rule->w.push_back(wi);
    }
    gsl_integration_glfixed_table_free(t);
    slot = std::move(rule);
  }
  return *slot;
}

const SphereRule& sphere_rule(int dim, int n) {
  if (dim != 2 && dim != 3) throw InputError("sphere_rule: dimension must be 2 or 3");
  if (n < 2) throw InputError("sphere_rule: need at least 2 nodes");
  static std::map<std::pair<int, int>, std::unique_ptr<SphereRule>> cache;
  const Rule* gl = dim == 3 ? &gauss_legendre(n) : nullptr;
  std::lock_guard<std::mutex> lock(g_mutex);
  auto& slot = cache[{dim, n}];
  if (!slot) {
    auto rule = std::make_unique<SphereRule>();
    rule->dim = dim;
    if (dim == 2) {
      for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * (i + 0.5) / n;
        rule->dirs.push_back({std::cos(th), std::sin(th), 0.0});
        rule->w.push_back(2.0 * kPi / n);
      }
    } else {
      const int nphi = 2 * n;
      for (int i = 0; i < n; ++i) {
        const double z = 2.0 * gl->x[i] - 1.0;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < nphi; ++j) {
          const double ph = 2.0 * kPi * (j + 0.5) / nphi;
          rule->dirs.push_back({s * std::cos(ph), s * std::sin(ph), z});
          rule->w.push_back(2.0 * gl->w[i] * 2.0 * kPi / nphi);
        }
      }
    }
    slot = std::move(rule);
  }
  return *slot;
}

DyadicResult<double> integrate_ball(const std::function<double(const Point&)>& f, int dim,
                                    double R, int radial_nodes, int angular_nodes,
                                    const DyadicOptions& opt) {
  if (angular_nodes <= 0) angular_nodes = dim == 2 ? 64 : 16;
  const SphereRule& sph = sphere_rule(dim, angular_nodes);
  const Rule& gl = gauss_legendre(radial_nodes);
  auto radial = [&](double rho) {
    double s = 0.0;
    for (std::size_t i = 0; i < sph.dirs.size(); ++i) s += sph.w[i] * f(scale(sph.dirs[i], rho));
    return s * std::pow(rho, dim - 1);
  };
  return integrate_dyadic<double>(radial, R, gl, opt);
}

double integrate(const std::function<double(double)>& f, double a, double b, int nodes,
                 int panels) {
  const Rule& gl = gauss_legendre(nodes);
  const double len = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * len;
    for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * f(lo + gl.x[i] * len);
  }
  return s * len;
}

}  // namespace specbound::quad

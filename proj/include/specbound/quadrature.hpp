#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "specbound/common.hpp"

namespace specbound::quad {

// Gauss-Legendre nodes and weights mapped to [0,1].
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

const Rule& gauss_legendre(int n);

// Quadrature directions on the unit sphere S^{d-1}; weights sum to its area.
struct SphereRule {
  int dim = 0;
  std::vector<Point> dirs;
  std::vector<double> w;
};

// d=2: n equispaced angles. d=3: n Gauss-Legendre nodes in cos(theta) times 2n azimuths.
const SphereRule& sphere_rule(int dim, int n);

inline double magnitude(double v) { return std::fabs(v); }
inline double magnitude(const Point& p) {
  return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
}

struct DyadicOptions {
  int max_shells = 64;
  int min_shells = 1;
  double rel_tol = 1e-15;
  // When positive, shells longer than this are split into equal sub-panels.
  double resolution = 0.0;
  // When positive, every panel is bisected until two levels agree to this
  // fraction of the running integral (absolute floor from the panel scale).
  double adaptive_tol = 0.0;
  int adaptive_depth = 24;
};

namespace detail {

template <class T, class F>
T gl_panel(F& f, double a, double b, const Rule& rule) {
  const double len = b - a;
  T c{};
  for (std::size_t i = 0; i < rule.x.size(); ++i) c = c + f(a + rule.x[i] * len) * (rule.w[i] * len);
  return c;
}

template <class T, class F>
T adaptive_panel(F& f, double a, double b, const Rule& rule, const T& whole, double abs_tol,
                 int depth) {
  const double m = 0.5 * (a + b);
  const T left = gl_panel<T>(f, a, m, rule);
  const T right = gl_panel<T>(f, m, b, rule);
  const T both = left + right;
  if (depth <= 0 || magnitude(both - whole) <= abs_tol || !(m > a && m < b)) return both;
  return adaptive_panel<T>(f, a, m, rule, left, 0.5 * abs_tol, depth - 1) +
         adaptive_panel<T>(f, m, b, rule, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

template <class T>
struct DyadicResult {
  T value{};
  bool converged = true;
  std::vector<T> shells;  // contribution of [b 2^{-k-1}, b 2^{-k}]
};

// Integrates f over (0, b] on dyadic shells toward 0, so integrable power and
// log singularities at the left end are absorbed. A non-decaying shell sequence
// means divergence.
template <class T, class F>
DyadicResult<T> integrate_dyadic(F&& f, double b, const Rule& rule,
                                 const DyadicOptions& opt = {}) {
  DyadicResult<T> res;
  T sum{};
  double peak = 0.0;
  int quiet = 0;
  double hi = b;
  bool stopped = false;
  for (int k = 0; k < opt.max_shells; ++k, hi *= 0.5) {
    const double lo = 0.5 * hi;
    const int parts =
        opt.resolution > 0.0 ? std::max(1, static_cast<int>(std::ceil((hi - lo) / opt.resolution))) : 1;
    const double len = (hi - lo) / parts;
    T c{};
    for (int p = 0; p < parts; ++p) {
      const double a = lo + p * len;
      const T whole = detail::gl_panel<T>(f, a, a + len, rule);
      if (opt.adaptive_tol > 0.0) {
        const double scale = std::max(magnitude(whole), magnitude(sum));
        c = c + detail::adaptive_panel<T>(f, a, a + len, rule, whole, opt.adaptive_tol * scale,
                                          opt.adaptive_depth);
      } else {
        c = c + whole;
      }
    }
    res.shells.push_back(c);
    sum = sum + c;
    const double m = magnitude(c);
    if (!std::isfinite(m)) {
      res.value = sum;
      res.converged = false;
      return res;
    }
    peak = std::max(peak, m);
    if (k + 1 >= opt.min_shells && peak > 0.0 && m <= opt.rel_tol * magnitude(sum)) {
      if (++quiet >= 2) {
        stopped = true;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  res.value = sum;
  if (stopped || peak == 0.0) return res;

  // Ran out of shells: accept only a clearly geometric decay and add its tail.
  const std::size_t n = res.shells.size();
  double ratio = 0.0;
  for (std::size_t j = n - 4; j < n; ++j) {
    const double prev = magnitude(res.shells[j - 1]);
    const double cur = magnitude(res.shells[j]);
    ratio = std::max(ratio, prev > 0.0 ? cur / prev : (cur > 0.0 ? kInf : 0.0));
  }
  if (ratio < 0.9) {
    res.value = sum + res.shells.back() * (ratio / (1.0 - ratio));
  } else {
    res.converged = false;
  }
  return res;
}

// Integral of f(y) over the ball |y| <= R in dimension dim, radial dyadic shells
// times a sphere rule. Returned shells are the radial shell contributions.
DyadicResult<double> integrate_ball(const std::function<double(const Point&)>& f, int dim,
                                    double R, int radial_nodes = 8, int angular_nodes = 0,
                                    const DyadicOptions& opt = {});

// Plain composite Gauss-Legendre on [a, b] with `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b, int nodes,
                 int panels = 1);

// Radical-inverse (Halton) coordinate of `index` in `base`.
inline double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace specbound::quad

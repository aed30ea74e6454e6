#include "specbound/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specbound/quadrature.hpp"

namespace specbound {

namespace {

constexpr double kGolden = 0.6180339887498949;
// Additive recurrence constants of the R2 sequence (inverse powers of the plastic number).
constexpr double kR2a = 0.7548776662466927;
constexpr double kR2b = 0.5698402909980532;

double frac(double x) { return x - std::floor(x); }

Point direction(std::uint64_t k, int dim) {
  if (dim == 2) {
    const double th = 2.0 * kPi * frac(k * kGolden);
    return {std::cos(th), std::sin(th), 0.0};
  }
  const double z = 2.0 * frac(0.5 + k * kR2a) - 1.0;
  const double ph = 2.0 * kPi * frac(0.5 + k * kR2b);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(ph), s * std::sin(ph), z};
}

void check_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw InputError("asymptotic estimate: radii list is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
      throw InputError("asymptotic estimate: radii must be positive and finite");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw InputError("asymptotic estimate: radii must be increasing");
  }
}

void envelope(std::vector<double>& values) {
  for (std::size_t j = values.size(); j-- > 1;) values[j - 1] = std::max(values[j - 1], values[j]);
}

// Applies the agreement / power-decay rules to a finished value sequence.
void decide_limit(AsymptoticEstimate& est, double agreement_tol, double decay_slope) {
  const auto& v = est.values;
  const std::size_t n = v.size();
  const double last = v.back();
  if (n == 1) {
    est.stabilized = last == 0.0;
    est.limit = last == 0.0 ? 0.0 : kInf;
    est.rule = "single radius";
    return;
  }
  const double prev = v[n - 2];
  if ((last == 0.0 && prev == 0.0) ||
      std::fabs(last - prev) <= agreement_tol * std::max(std::fabs(last), std::fabs(prev))) {
    est.stabilized = true;
    est.limit = last;
    est.rule = "last two shells agree";
    return;
  }
  const std::size_t k = std::min<std::size_t>(3, n);
  std::vector<double> r(est.radii.end() - k, est.radii.end()), w(v.end() - k, v.end());
  if (last > 0.0 && loglog_slope(r, w) <= decay_slope) {
    est.stabilized = true;
    est.limit = 0.0;
    est.rule = "power-law decay";
    return;
  }
  est.stabilized = false;
  est.limit = kInf;
  est.rule = "not stabilized";
}

double ball_integral(const ScalarField& f, int d, const Point& c, double radius, int nodes,
                     int angular, bool* ok, quad::DyadicResult<double>* keep = nullptr,
                     int min_shells = 1) {
  quad::DyadicOptions opt;
  opt.min_shells = min_shells;
  opt.rel_tol = 1e-15;
  auto g = [&](const Point& z) { return f(c + z); };
  auto res = quad::integrate_ball(g, d, radius, nodes, angular, opt);
  *ok = res.converged && std::isfinite(res.value);
  if (keep) *keep = res;
  return res.value;
}

void check_dim(int d) {
  if (d != 2 && d != 3) throw InputError("only dimensions 2 and 3 are supported");
}

}  // namespace

double loglog_slope(const std::vector<double>& radii, const std::vector<double>& values) {
  const std::size_t n = std::min(radii.size(), values.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(radii[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

AsymptoticEstimate tail_sup_estimate(const ScalarField& q, const std::vector<double>& radii,
                                     const ShellSampling& s) {
  check_radii(radii);
  check_dim(s.dimension);
  if (s.samples_per_shell < 16) throw InputError("asymptotic estimate: samples_per_shell must be >= 16");
  const double step = s.shell_width / s.samples_per_shell;
  const double cutoff = s.cutoff_factor * radii.back();

  auto sample = [&](double r, std::uint64_t k) {
    const double v = q(direction(k, s.dimension) * r);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "asymptotic estimate: non-finite sample at |x| = " << r;
      throw NumericalError(msg.str());
    }
    return v;
  };

  AsymptoticEstimate est;
  est.radii = radii;
  est.values.assign(radii.size(), 0.0);
  std::size_t seg = 0;
  std::uint64_t k = 0;
  for (double r = radii.front() + 0.5 * step; r <= cutoff; r = radii.front() + (++k + 0.5) * step) {
    while (seg + 1 < radii.size() && r >= radii[seg + 1]) ++seg;
    est.values[seg] = std::max(est.values[seg], sample(r, k));
  }
  envelope(est.values);

  const double ext_step = step / s.extension_density;
  double ext = 0.0;
  std::uint64_t j = 0;
  for (double r = cutoff + 0.5 * ext_step; r <= 2.0 * cutoff; r = cutoff + (++j + 0.5) * ext_step)
    ext = std::max(ext, sample(r, k + j));

  const double last = est.values.back();
  if (ext > last * (1.0 + s.agreement_tol) && ext > 0.0) {
    est.stabilized = false;
    est.limit = kInf;
    est.rule = "growth beyond cutoff";
    return est;
  }
  decide_limit(est, s.agreement_tol, s.decay_slope);
  return est;
}

AsymptoticEstimate beta_estimate(const FieldSpec& field, const std::vector<double>& radii,
                                 int samples_per_shell, ShellSampling sampling) {
  if (field.kind() == FieldKind::AharonovBohm)
    throw InputError("beta_estimate: aharonov_bohm field has B~ = 0 off the flux line");
  sampling.dimension = field.dimension();
  sampling.samples_per_shell = samples_per_shell;
  const int d = field.dimension();
  return tail_sup_estimate([&](const Point& x) { return norm(btilde(field, x), d); }, radii,
                           sampling);
}

AsymptoticEstimate omega1_estimate(const ScalarField& V1, const std::vector<double>& radii,
                                   int samples_per_shell, ShellSampling sampling) {
  sampling.samples_per_shell = samples_per_shell;
  const int d = sampling.dimension;
  return tail_sup_estimate([&](const Point& x) { return norm(x, d) * std::fabs(V1(x)); }, radii,
                           sampling);
}

double numerical_virial(const ScalarField& V, const Point& x, int dim) {
  const double r = norm(x, dim);
  if (r == 0.0) return 0.0;
  const double delta = 1e-5 * (1.0 + r);
  const Point u = x * (1.0 / r);
  return r * (V(x + u * delta) - V(x - u * delta)) / (2.0 * delta);
}

AsymptoticEstimate omega2_estimate(const PotentialSpec& V2, const std::vector<double>& radii,
                                   int samples_per_shell, ShellSampling sampling) {
  if (!V2.V) throw InputError("omega2_estimate: potential is empty");
  sampling.samples_per_shell = samples_per_shell;
  const int d = sampling.dimension;
  if (V2.has_virial())
    return tail_sup_estimate([&](const Point& x) { return std::max(0.0, V2.virial(x)); }, radii,
                             sampling);
  return tail_sup_estimate(
      [&](const Point& x) { return std::max(0.0, numerical_virial(V2.V, x, d)); }, radii, sampling);
}

double kato_kernel(double r, int d) {
  if (d == 2) return std::fabs(std::log(r));
  return std::pow(r, 2 - d);
}

std::vector<Point> cubic_lattice(int dim, double half_width, double spacing) {
  check_dim(dim);
  const int n = static_cast<int>(std::floor(half_width / spacing + 1e-9));
  std::vector<Point> out;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j)
      for (int k = (dim == 3 ? -n : 0); k <= (dim == 3 ? n : 0); ++k)
        out.push_back({i * spacing, j * spacing, k * spacing});
  return out;
}

KatoNormReport kato_norm(const ScalarField& V, int d, int quad_nodes,
                         const std::vector<Point>& centers) {
  check_dim(d);
  if (centers.empty()) throw InputError("kato_norm: no centers");
  const double rho0 = d == 2 ? 0.5 : 1.0;
  constexpr int kLevels = 11;
  KatoNormReport rep;
  rep.dimension = d;
  std::vector<double> profile(kLevels, 0.0);  // profile[j] at alpha = rho0 2^{-j}
  for (const Point& c : centers) {
    bool ok = false;
    quad::DyadicResult<double> res;
    auto f = [&](const Point& y) {
      const Point z = y - c;
      return kato_kernel(norm(z, d), d) * std::fabs(V(y));
    };
    ball_integral(f, d, c, rho0, quad_nodes, 0, &ok, &res, kLevels + 1);
    if (!ok) {
      rep.norm = kInf;
      rep.stabilized = false;
      rep.in_class = false;
      for (auto& p : profile) p = kInf;
      break;
    }
    // Tail sums of the shell contributions give the smaller balls.
    double tail = res.value;
    for (int j = 0; j < kLevels; ++j) {
      profile[j] = std::max(profile[j], tail);
      if (j < static_cast<int>(res.shells.size())) tail -= res.shells[j];
      tail = std::max(tail, 0.0);
    }
    rep.norm = std::max(rep.norm, res.value);
  }
  for (int j = kLevels; j-- > 0;) rep.alpha_profile.push_back({rho0 * std::ldexp(1.0, -j), profile[j]});
  if (rep.stabilized) {
    const double small = rep.alpha_profile.front().second;
    const double big = rep.alpha_profile.back().second;
    rep.in_class = small == 0.0 || small <= 1e-2 * big;
  }
  return rep;
}

double lp_locunif_norm(const ScalarField& V, int d, double p, const std::vector<Point>& centers,
                       int quad_nodes) {
  check_dim(d);
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("lp_locunif_norm: p must be finite and >= 1");
  if (centers.empty()) throw InputError("lp_locunif_norm: no centers");
  double best = 0.0;
  for (const Point& c : centers) {
    bool ok = false;
    const double v =
        ball_integral([&](const Point& y) { return std::pow(std::fabs(V(y)), p); }, d, c, 1.0,
                      quad_nodes, 0, &ok);
    if (!ok) return kInf;
    best = std::max(best, v);
  }
  return std::pow(best, 1.0 / p);
}

AsymptoticEstimate vanishing_certificate(const ScalarField& W, double p,
                                         const std::vector<double>& radii,
                                         const VanishingOptions& opt) {
  check_radii(radii);
  check_dim(opt.dimension);
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("vanishing_certificate: p must be >= 1");
  const int d = opt.dimension;
  const int angular = d == 2 ? 128 : 24;
  AsymptoticEstimate est;
  est.radii = radii;
  for (double R : radii) {
    auto f = [&](const Point& y) {
      return norm(y, d) >= R ? std::pow(std::fabs(W(y)), p) : 0.0;
    };
    double best = 0.0;
    const double offsets[] = {-1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    std::vector<double> rads;
    for (double o : offsets) rads.push_back(std::max(0.0, R + o));
    for (double m : {2.0, 4.0, 10.0}) rads.push_back(m * R);
    for (double rc : rads) {
      for (int k = 0; k < opt.directions; ++k) {
        const Point c = direction(k, d) * rc;
        bool ok = false;
        const double v = ball_integral(f, d, c, 1.0, opt.quad_nodes, angular, &ok);
        if (!ok) {
          best = kInf;
          break;
        }
        best = std::max(best, v);
      }
      if (std::isinf(best)) break;
    }
    est.values.push_back(std::pow(best, 1.0 / p));
  }
  envelope(est.values);
  if (std::isinf(est.values.back())) {
    est.limit = kInf;
    est.stabilized = false;
    est.rule = "divergent quadrature";
    return est;
  }
  decide_limit(est, 1e-3, -0.5);
  return est;
}

bool certificate_passes(const AsymptoticEstimate& est) { return est.stabilized && est.limit == 0.0; }

double resolvent_kato_bound(const ScalarField& W, int d, double lambda, double alpha,
                            const std::vector<Point>& centers, int quad_nodes) {
  check_dim(d);
  if (!(lambda > 0.0)) throw InputError("resolvent_kato_bound: lambda must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("resolvent_kato_bound: alpha must lie in (0, 1]");
  double kato = 0.0;
  for (const Point& c : centers) {
    bool ok = false;
    auto f = [&](const Point& y) { return kato_kernel(norm(y - c, d), d) * std::fabs(W(y)); };
    const double v = ball_integral(f, d, c, alpha, quad_nodes, 0, &ok);
    if (!ok) return kInf;
    kato = std::max(kato, v);
  }
  const double l1 = lp_locunif_norm(W, d, 1.0, centers, quad_nodes);
  const double sl = std::sqrt(lambda) * alpha;
  return kato + std::exp(-sl / 4.0) / sl * l1;
}

WeylReport weyl_vanishing(const FieldSpec& field, const std::vector<Point>& centers,
                          const std::vector<double>& radii, int quad_nodes) {
  if (centers.size() != radii.size())
    throw InputError("weyl_vanishing: centers and radii must have the same length");
  const int d = field.dimension();
  // Tent normalization c_d^2 and ||grad phi||^2 R^2.
  const double c2 = d == 2 ? 6.0 / kPi : 30.0 / (4.0 * kPi);
  const double grad_unit = d == 2 ? 6.0 : 10.0;
  WeylReport rep;
  quad::DyadicOptions opt;
  opt.min_shells = 4;
  opt.rel_tol = 1e-14;
  for (std::size_t n = 0; n < radii.size(); ++n) {
    const double R = radii[n];
    if (!(R > 0.0)) throw InputError("weyl_vanishing: radii must be positive");
    const FieldSpec local = field.with_base(centers[n]);
    auto cf = [&](const Point& y) {
      const double r = norm(y, d);
      const Point b = btilde(local, y);
      const double lg = std::log(R / r);
      return std::pow(r / R, 2 - d) * lg * lg * dot(b, b, d);
    };
    const auto cres = quad::integrate_ball(cf, d, R, quad_nodes, 0, opt);
    const double C = cres.converged ? cres.value / std::pow(R, d) : kInf;

    GaugeOptions gopt;
    gopt.probe_radius = R / std::sqrt(static_cast<double>(d));
    const GaugePotential A = poincare_gauge(local, std::max(quad_nodes, 8), gopt);
    auto af = [&](const Point& y) {
      const double t = 1.0 - norm(y, d) / R;
      const Point a = A(y);
      return dot(a, a, d) * c2 * std::pow(R, -d) * t * t;
    };
    const auto ares = quad::integrate_ball(af, d, R, quad_nodes, 0, opt);
    const double grad = grad_unit / (R * R);
    rep.C.push_back(C);
    rep.gradient_term.push_back(grad);
    rep.rayleigh.push_back(ares.converged ? grad + ares.value : kInf);
    const double s = std::sqrt(grad) + std::sqrt(4.0 * c2 * C);
    rep.bound.push_back(s * s);
  }
  return rep;
}

}  // namespace specbound

#include "specbound/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "specbound/common.hpp"

namespace specbound {

namespace {

constexpr std::size_t kMaxWindowEigenvalues = 100000;

double pivmin(const TridiagonalOperator& T) {
  return std::numeric_limits<double>::min() * std::max(1.0, T.offdiagonal * T.offdiagonal);
}

// Sturm counts for a batch of shifts; the shift loop is innermost so it vectorizes.
std::vector<std::size_t> sturm_counts(const TridiagonalOperator& T, const std::vector<double>& x) {
  const std::size_t K = x.size();
  std::vector<double> q(K), cnt(K, 0.0);
  if (K == 0 || T.N == 0) return std::vector<std::size_t>(K, 0);
  const double e2 = T.offdiagonal * T.offdiagonal;
  const double pm = pivmin(T);
  const double* d = T.diagonal.data();
  double* qp = q.data();
  double* cp = cnt.data();
  const double* xp = x.data();
  for (std::size_t j = 0; j < K; ++j) {
    double t = d[0] - xp[j];
    t = std::fabs(t) < pm ? -pm : t;
    qp[j] = t;
    cp[j] = t < 0.0 ? 1.0 : 0.0;
  }
  for (std::size_t i = 1; i < T.N; ++i) {
    const double di = d[i];
    for (std::size_t j = 0; j < K; ++j) {
      double t = (di - xp[j]) - e2 / qp[j];
      t = std::fabs(t) < pm ? -pm : t;
      qp[j] = t;
      cp[j] += t < 0.0 ? 1.0 : 0.0;
    }
  }
  std::vector<std::size_t> out(K);
  for (std::size_t j = 0; j < K; ++j) out[j] = static_cast<std::size_t>(cp[j]);
  return out;
}

// Solves (T - lambda) x = b in place, LU with partial pivoting.
void shifted_solve(const TridiagonalOperator& T, double lambda, std::vector<double>& b) {
  const std::size_t n = T.N;
  std::vector<double> d(n), dl(n, T.offdiagonal), du(n, T.offdiagonal), du2(n, 0.0);
  std::vector<char> swapped(n, 0);
  for (std::size_t i = 0; i < n; ++i) d[i] = T.diagonal[i] - lambda;
  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max(std::fabs(T.offdiagonal), std::fabs(lambda) + 1.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::fabs(d[i]) >= std::fabs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double fact = dl[i] / d[i];
      dl[i] = fact;
      d[i + 1] -= fact * du[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = fact;
      const double temp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = temp - fact * d[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      swapped[i] = 1;
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!swapped[i]) {
      b[i + 1] -= dl[i] * b[i];
    } else {
      const double temp = b[i] - dl[i] * b[i + 1];
      b[i] = b[i + 1];
      b[i + 1] = temp;
    }
  }
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t k = n - 2; k-- > 0;) b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / d[k];
}

double l2norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::pair<double, double> TridiagonalOperator::gershgorin() const {
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < N; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(offdiagonal);
    if (i + 1 < N) r += std::fabs(offdiagonal);
    lo = std::min(lo, diagonal[i] - r);
    hi = std::max(hi, diagonal[i] + r);
  }
  return {lo, hi};
}

TridiagonalOperator discretize(const RadialChannel& channel, double R_max, std::size_t N) {
  if (N < 100) throw InputError("discretize: N must be at least 100");
  if (!(R_max > 0.0) || !std::isfinite(R_max)) throw InputError("discretize: R_max must be positive");
  if (!channel.W) throw InputError("discretize: channel has no potential");
  TridiagonalOperator T;
  T.N = N;
  T.R_max = R_max;
  T.h = R_max / static_cast<double>(N + 1);
  const double inv_h2 = 1.0 / (T.h * T.h);
  T.offdiagonal = -inv_h2;
  T.diagonal.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = T.node(i);
    const double w = channel.W(r);
    if (!std::isfinite(w)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "discretize: W is not finite at node " << i + 1 << " (r = " << r << ")";
      throw DiscretizationError(msg.str());
    }
    T.diagonal[i] = 2.0 * inv_h2 + w;
  }
  return T;
}

std::size_t sturm_count(const TridiagonalOperator& T, double x) { return sturm_counts(T, {x})[0]; }

std::vector<double> eigen_in_window(const TridiagonalOperator& T, std::pair<double, double> window,
                                    double tol) {
  const double a = window.first, b = window.second;
  if (!(a < b)) throw InputError("eigen_in_window: window must satisfy a < b");
  if (!(tol > 0.0)) throw InputError("eigen_in_window: tol must be positive");
  const auto ends = sturm_counts(T, {a, b});
  const std::size_t na = ends[0], nb = ends[1];
  if (nb <= na) return {};
  const std::size_t K = nb - na;
  if (K > kMaxWindowEigenvalues)
    throw InputError("eigen_in_window: window holds more than 1e5 eigenvalues");

  // Eigenvalue with global index na + k lies in [lo[k], hi[k]).
  std::vector<double> lo(K, a), hi(K, b);
  std::vector<std::size_t> active;
  std::vector<double> shifts;
  for (;;) {
    active.clear();
    shifts.clear();
    for (std::size_t k = 0; k < K; ++k) {
      if (hi[k] - lo[k] > tol) {
        const double mid = 0.5 * (lo[k] + hi[k]);
        if (mid <= lo[k] || mid >= hi[k]) continue;
        // Neighbours often share an interval; one shift serves them all.
        if (!shifts.empty() && shifts.back() == mid) continue;
        active.push_back(k);
        shifts.push_back(mid);
      }
    }
    if (shifts.empty()) break;
    const auto counts = sturm_counts(T, shifts);
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      const double x = shifts[s];
      const std::size_t c = counts[s];
      // c eigenvalues lie below x: indices < c move their upper bound, others the lower.
      for (std::size_t k = 0; k < K; ++k) {
        if (na + k < c)
          hi[k] = std::min(hi[k], x);
        else
          lo[k] = std::max(lo[k], x);
      }
    }
  }
  std::vector<double> out(K);
  for (std::size_t k = 0; k < K; ++k) out[k] = 0.5 * (lo[k] + hi[k]);
  return out;
}

std::vector<double> eigenvector(const TridiagonalOperator& T, double lambda, std::uint64_t seed) {
  const std::size_t n = T.N;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n), prev;
  for (double& v : x) v = u(rng);
  double nx = l2norm(x);
  for (double& v : x) v /= nx;
  for (int it = 1; it <= 20; ++it) {
    prev = x;
    shifted_solve(T, lambda, x);
    nx = l2norm(x);
    if (!std::isfinite(nx) || nx == 0.0) break;
    double overlap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] /= nx;
      overlap += x[i] * prev[i];
    }
    const double sgn = overlap < 0.0 ? -1.0 : 1.0;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += (x[i] - sgn * prev[i]) * (x[i] - sgn * prev[i]);
    if (it >= 2 && std::sqrt(change) < 1e-10) {
      double vmax = 0.0;
      for (double v : x) vmax = std::max(vmax, std::fabs(v));
      for (double v : x) {
        if (std::fabs(v) > 1e-8 * vmax) {
          if (v < 0.0)
            for (double& w : x) w = -w;
          break;
        }
      }
      return x;
    }
  }
  throw NumericalError("eigenvector: inverse iteration did not converge in 20 iterations");
}

std::vector<double> SpectralReport::genuine() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    if (!spurious[i]) out.push_back(eigenvalues[i]);
  return out;
}

SpectralReport classify_spurious(const RadialChannel& channel, std::pair<double, double> window,
                                 double R_max, std::size_t N, double tol,
                                 std::optional<double> threshold, const SpuriousPolicy& policy) {
  SpectralReport rep;
  rep.window = window;
  rep.R_max = R_max;
  rep.N = N;
  rep.tol = tol;
  rep.threshold = threshold;

  const TridiagonalOperator T = discretize(channel, R_max, N);
  rep.eigenvalues = eigen_in_window(T, window, tol);
  rep.sturm_count_difference = sturm_count(T, window.second) - sturm_count(T, window.first);

  // Same spacing on the doubled box: 2(N+1) intervals.
  const TridiagonalOperator T2 = discretize(channel, 2.0 * R_max, 2 * (N + 1) - 1);
  const double pad = std::max(0.05 * (window.second - window.first), 1000.0 * tol);
  const auto wide = eigen_in_window(T2, {window.first - pad, window.second + pad}, tol);

  const double r_outer = (1.0 - policy.outer_fraction) * R_max;
  for (double lam : rep.eigenvalues) {
    double drift = kInf;
    for (double mu : wide) drift = std::min(drift, std::fabs(mu - lam));
    const auto v = eigenvector(T, lam, policy.seed);
    double outer = 0.0, total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      total += v[i] * v[i];
      if (T.node(i) > r_outer) outer += v[i] * v[i];
    }
    const double loc = total > 0.0 ? outer / total : 0.0;
    rep.drift.push_back(drift);
    rep.localization_ratio.push_back(loc);
    rep.spurious.push_back(drift > policy.drift_factor * tol || loc > policy.outer_mass_limit);
  }
  if (threshold) {
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
      if (!rep.spurious[i] && rep.eigenvalues[i] > *threshold) rep.threshold_consistent = false;
  }
  return rep;
}

int sign_changes(const std::vector<double>& v) {
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::fabs(x));
  int changes = 0;
  int last = 0;
  for (double x : v) {
    if (std::fabs(x) <= 1e-10 * vmax) continue;
    const int s = x > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace specbound

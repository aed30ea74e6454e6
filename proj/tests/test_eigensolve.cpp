#include <doctest.h>

#include <cmath>

#include "specbound/common.hpp"
#include "specbound/eigensolve.hpp"

using namespace specbound;

namespace {

RadialChannel potential_channel(RadialFn W) {
  RadialChannel c;
  c.W = std::move(W);
  c.h = [](double) { return 0.0; };
  return c;
}

RadialChannel hydrogen() {
  return potential_channel([](double r) { return -2.0 / r; });
}

// Non-integer-l Coulomb levels of the b = b0/r channel.
double coulomb(double b0, int m, int nr) {
  return b0 * b0 - std::pow(m * b0 / (nr + m + 0.5), 2);
}

}  // namespace

TEST_CASE("discretize layout and errors") {
  const auto T = discretize(potential_channel([](double) { return 0.0; }), kPi, 199);
  CHECK(T.h == doctest::Approx(kPi / 200));
  CHECK(T.offdiagonal == doctest::Approx(-1 / (T.h * T.h)));
  CHECK(T.node(0) == doctest::Approx(T.h));
  CHECK_THROWS_AS(discretize(hydrogen(), 10.0, 99), InputError);
  try {
    discretize(potential_channel([](double r) { return r > 1.005 ? NAN : 0.0; }), 2.0, 199);
    CHECK(false);
  } catch (const DiscretizationError& e) {
    CHECK(std::string(e.what()).find("node 101") != std::string::npos);
  }
}

TEST_CASE("free Dirichlet Laplacian matches the closed form") {
  const std::size_t N = 400;
  const auto T = discretize(potential_channel([](double) { return 0.0; }), kPi, N);
  const auto ev = eigen_in_window(T, {0.0, 5.0}, 1e-11);
  const double h = T.h;
  std::vector<double> ref;
  for (std::size_t k = 1; k <= N; ++k) {
    const double l = 2 / (h * h) * (1 - std::cos(k * h));
    if (l < 5.0) ref.push_back(l);
  }
  REQUIRE(ev.size() == ref.size());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(ref[i]).epsilon(1e-10));
  CHECK(eigen_in_window(T, {-10.0, -1.0}, 1e-9).empty());
  const auto g = T.gershgorin();
  CHECK(g.first <= 0.0);
  CHECK(std::isfinite(g.second));
}

TEST_CASE("window counts match Sturm counts") {
  const auto T = discretize(hydrogen(), 60.0, 3000);
  for (auto w : std::vector<std::pair<double, double>>{{-1.1, -0.01}, {-0.3, 2.0}, {0.5, 0.6}, {-5, 100}}) {
    const auto ev = eigen_in_window(T, w, 1e-9);
    CHECK(ev.size() == sturm_count(T, w.second) - sturm_count(T, w.first));
    CHECK(std::is_sorted(ev.begin(), ev.end()));
  }
  CHECK_THROWS_AS(eigen_in_window(T, {1.0, 0.0}, 1e-9), InputError);
  const auto big = discretize(potential_channel([](double) { return 0.0; }), 100.0, 120000);
  CHECK_THROWS_AS(eigen_in_window(big, {-1.0, 1e12}, 1e-6), InputError);
}

TEST_CASE("hydrogen levels") {
  const auto T = discretize(hydrogen(), 80.0, 16000);
  const auto ev = eigen_in_window(T, {-1.1, -0.01}, 1e-10);
  REQUIRE(ev.size() >= 4);
  for (int n = 1; n <= 4; ++n) CHECK(ev[n - 1] == doctest::Approx(-1.0 / (n * n)).epsilon(2e-4));
}

TEST_CASE("hydrogen ground state converges at second order") {
  const double R = 40.0;
  double err[3];
  const std::size_t Ns[3] = {3999, 7999, 15999};
  for (int i = 0; i < 3; ++i) {
    const auto T = discretize(hydrogen(), R, Ns[i]);
    err[i] = std::fabs(eigen_in_window(T, {-1.5, -0.5}, 1e-13)[0] + 1.0);
  }
  const double s1 = std::log2(err[0] / err[1]), s2 = std::log2(err[1] / err[2]);
  CHECK(s1 >= 1.8);
  CHECK(s1 <= 2.2);
  CHECK(s2 >= 1.8);
  CHECK(s2 <= 2.2);
}

TEST_CASE("free-operator interlacing between grids") {
  const double R = 5.0;
  const auto coarse = discretize(potential_channel([](double) { return 0.0; }), R, 199);
  const auto fine = discretize(potential_channel([](double) { return 0.0; }), R, 399);
  const auto ec = eigen_in_window(coarse, {0.0, 200.0}, 1e-10);
  const auto ef = eigen_in_window(fine, {0.0, 200.0}, 1e-10);
  REQUIRE(ef.size() >= ec.size());
  for (std::size_t k = 0; k < ec.size(); ++k) {
    CHECK(ec[k] <= ef[k]);
    CHECK(ef[k] <= std::pow((k + 1) * kPi / R, 2) + 1e-9);
  }
}

TEST_CASE("eigenvectors") {
  const auto T = discretize(potential_channel([](double) { return 0.0; }), kPi, 299);
  const auto ev = eigen_in_window(T, {0.0, 2.0}, 1e-12);
  REQUIRE(ev.size() == 1);
  const auto v = eigenvector(T, ev[0]);
  double norm = 0;
  for (std::size_t i = 0; i < v.size(); ++i) norm += std::pow(std::sin(T.node(i)), 2);
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(std::sin(T.node(i)) / norm).epsilon(1e-8).scale(1e-6));

  const auto H = discretize(hydrogen(), 60.0, 6000);
  const auto eh = eigen_in_window(H, {-1.1, -0.05}, 1e-12);
  REQUIRE(eh.size() >= 3);
  const std::size_t base = sturm_count(H, -1.1);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto u = eigenvector(H, eh[k]);
    CHECK(sign_changes(u) == static_cast<int>(base + k));
    for (double x : u) {
      if (std::fabs(x) > 1e-8) {
        CHECK(x > 0.0);
        break;
      }
    }
  }
  const auto a = eigenvector(H, eh[0]), b = eigenvector(H, eh[0]);
  CHECK(a == b);
}

TEST_CASE("Miller-Simon channel spectrum") {
  RadialChannel ch;
  ch.h = [](double) { return 1.0; };
  ch.W = [](double r) { return 0.75 / (r * r) + 1 - 2 / r; };
  const auto rep = classify_spurious(ch, {0.0, 0.999}, 400.0, 40000, 1e-9, 1.0);
  const auto g = rep.genuine();
  REQUIRE(g.size() >= 3);
  CHECK(g[0] == doctest::Approx(5.0 / 9).epsilon(2e-3));
  CHECK(g[1] == doctest::Approx(0.84).epsilon(2e-3));
  CHECK(g[2] == doctest::Approx(coulomb(1, 1, 2)).epsilon(2e-3));
  CHECK(rep.threshold_consistent);
  CHECK(rep.eigenvalues.size() == rep.sturm_count_difference);
  const auto above = classify_spurious(ch, {1.01, 4.0}, 400.0, 40000, 1e-9, 1.0);
  CHECK(!above.eigenvalues.empty());
  for (bool s : above.spurious) CHECK(s);
  CHECK(above.threshold_consistent);
}

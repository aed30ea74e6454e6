#include "specbound/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "specbound/asymptotics.hpp"
#include "specbound/channels.hpp"
#include "specbound/eigensolve.hpp"
#include "specbound/fields.hpp"
#include "specbound/profiles.hpp"
#include "specbound/threshold.hpp"
#include "specbound/virial.hpp"

namespace specbound {

using nlohmann::json;

json encode(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double decode(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  throw InputError("expected a number");
}

namespace {

json encode_all(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(encode(x));
  return a;
}

// ---------------------------------------------------------------------------
// Schema

ParamDoc P(std::string section, std::string name, std::string type, json fallback, std::string doc) {
  return {std::move(section), std::move(name), std::move(type), std::move(fallback), std::move(doc)};
}

const json kRequired = nullptr;

json profile_json(const std::string& type, json params = json::object()) {
  json p = params;
  p["type"] = type;
  return p;
}

std::vector<ScenarioKind> build_kinds() {
  const std::string pr = "parameters", nu = "numerics";
  std::vector<ScenarioKind> k;
  k.push_back({"threshold", "Evaluate the threshold Lambda(beta, omega1, omega2).",
               "closed-form eigenvalue-free threshold for given asymptotic bounds",
               {P(pr, "beta", "number", kRequired, "asymptotic bound on |B~|"),
                P(pr, "omega1", "number", kRequired, "asymptotic bound on |x V1|"),
                P(pr, "omega2", "number", kRequired, "asymptotic bound on (x.grad V2)_+"),
                P(pr, "expect_lambda", "number", "none", "optional expected value"),
                P(pr, "expect_tol", "number", 1e-12, "tolerance for expect_lambda")}});
  k.push_back({"optimize_split", "Optimize the split V = s V + (1-s) V over s in [0,1].",
               "bang-bang optimality of the potential split",
               {P(pr, "beta", "number", kRequired, "asymptotic bound on |B~|"),
                P(pr, "omega1", "number", kRequired, "bound for V carried entirely as V1"),
                P(pr, "omega2", "number", kRequired, "bound for V carried entirely as V2"),
                P(pr, "samples", "integer", 1001, "grid points in s for the interior check"),
                P(pr, "expect_lambda", "number", "none", "optional expected value"),
                P(pr, "expect_tol", "number", 1e-12, "tolerance for expect_lambda")}});
  k.push_back({"pauli", "Threshold for the Pauli operator.",
               "Pauli threshold min{4 beta^2, Lambda(beta, omega, omega)}",
               {P(pr, "beta", "number", kRequired, "asymptotic bound on |B~|"),
                P(pr, "omega", "number", kRequired, "one-sided virial bound of the field"),
                P(pr, "expect_lambda", "number", "none", "optional expected value"),
                P(pr, "expect_tol", "number", 1e-12, "tolerance for expect_lambda")}});
  k.push_back({"dirac", "Eigenvalue window of the Dirac operator with mass.",
               "Dirac eigenvalues confined to |E| <= sqrt(Lambda_Pauli + m^2)",
               {P(pr, "beta", "number", kRequired, "asymptotic bound on |B~|"),
                P(pr, "omega", "number", kRequired, "one-sided virial bound of the field"),
                P(pr, "mass", "number", 0.0, "Dirac mass m")}});
  k.push_back({"aharonov_bohm", "Flux-line channels -u'' + ((m-B0)^2 - 1/4)/r^2 + V.",
               "Aharonov-Bohm threshold, singular field at the origin",
               {P(pr, "flux", "number", kRequired, "flux coefficient B0"),
                P(pr, "m", "integer[]", json{0, 1, 2}, "angular momenta"),
                P(pr, "potential", "profile", profile_json("zero"), "radial potential V"),
                P(pr, "omega1", "number", 0.0, "bound on |x V1| used for the threshold"),
                P(pr, "omega2", "number", 0.0, "bound on (x.grad V2)_+ used for the threshold"),
                P(pr, "window", "window", json{0.0, 4.0}, "eigenvalue window"),
                P(nu, "R_max", "number", 200.0, "box radius"),
                P(nu, "N", "integer", 20000, "interior nodes"),
                P(nu, "tol", "number", 1e-9, "eigenvalue tolerance")}});
  k.push_back({"miller_simon", "Channels of the field b(r) = b0/r; threshold b0^2.",
               "sharpness of the threshold: eigenvalues accumulate below b0^2, none above",
               {P(pr, "b0", "number", kRequired, "field amplitude"),
                P(pr, "m", "integer[]", json{1, 2, 3}, "angular momenta"),
                P(pr, "window", "window", "none", "eigenvalue window; default (0, 0.999 b0^2)"),
                P(pr, "continuum_window", "window", "none",
                  "optional window above b0^2 whose eigenvalues must all be box states"),
                P(pr, "levels", "integer", 3, "lowest levels per channel compared with the Coulomb oracle"),
                P(pr, "coulomb_tol", "number", 2e-3, "oracle tolerance"),
                P(nu, "R_max", "number", 400.0, "box radius"),
                P(nu, "N", "integer", 40000, "interior nodes"),
                P(nu, "tol", "number", 1e-9, "eigenvalue tolerance")}});
  k.push_back({"wigner_von_neumann", "Embedded eigenvalue +1 of the Wigner-von Neumann potential.",
               "embedded eigenvalue below the threshold 8",
               {P(pr, "window", "window", json{0.9, 1.1}, "eigenvalue window"),
                P(pr, "target", "number", 1.0, "expected embedded eigenvalue"),
                P(pr, "target_tol", "number", 5e-3, "distance to target"),
                P(pr, "radii", "number[]", json{10, 20, 50, 100, 200, 500}, "shell radii for omega estimates"),
                P(pr, "check_R", "number", 300.0, "second box radius, same spacing"),
                P(pr, "max_drift", "number", 1e-3, "allowed eigenvalue drift between boxes"),
                P(nu, "R_max", "number", 200.0, "box radius"),
                P(nu, "N", "integer", 200000, "interior nodes"),
                P(nu, "tol", "number", 1e-10, "eigenvalue tolerance"),
                P(nu, "shells", "integer", 16, "samples per shell")}});
  k.push_back({"custom_channel", "Half-line channel from a field and/or potential profile.",
               "channel reduction of a radial field",
               {P(pr, "m", "number", 0.0, "angular momentum"),
                P(pr, "potential", "profile", profile_json("zero"), "radial potential V"),
                P(pr, "field", "profile", "none", "optional radial field b(r); adds h^2 - 2 m h / r"),
                P(pr, "window", "window", kRequired, "eigenvalue window"),
                P(pr, "threshold", "number", "none", "optional threshold for the consistency verdict"),
                P(nu, "R_max", "number", 200.0, "box radius"),
                P(nu, "N", "integer", 20000, "interior nodes"),
                P(nu, "tol", "number", 1e-9, "eigenvalue tolerance"),
                P(nu, "quad_nodes", "integer", 8, "Gauss-Legendre nodes for h(r)")}});
  k.push_back({"virial_bench", "Commutator quotient vs magnetic virial on a 2D grid.",
               "magnetic virial theorem, Kato form of the virial, IMS localization",
               {P(pr, "field", "profile", profile_json("gaussian", {{"rate", 1.0}}), "radial field b(r)"),
                P(pr, "potential", "profile", profile_json("gaussian", {{"rate", 0.5}}), "radial potential V"),
                P(pr, "sigma", "number", 1.0, "width of the Gaussian test state"),
                P(pr, "center", "number[]", json{0.0, 0.0}, "center of the test state"),
                P(pr, "momentum", "number", 0.0, "plane-wave factor exp(i k x) of the test state"),
                P(pr, "min_order", "number", 1.5, "required Richardson slope of the residual"),
                P(pr, "max_relative_residual", "number", 1e-2, "required extrapolated residual"),
                P(nu, "L", "number", 10.0, "grid half width"),
                P(nu, "h", "number", 0.05, "grid spacing"),
                P(nu, "t_list", "number[]", json{0.1, 0.05, 0.025}, "halving dilation parameters"),
                P(nu, "quad_nodes", "integer", 16, "Gauss-Legendre nodes for the Poincare gauge"),
                P(nu, "stencil", "integer", 4, "interpolation points per axis")}});
  k.push_back({"gauge_audit", "Poincare gauge of a radial field: curl, transversality, regularity.",
               "Poincare gauge A(x) = int_0^1 B(tx)[tx] dt",
               {P(pr, "field", "profile", kRequired, "radial field b(r)"),
                P(pr, "curl_tol", "number", 1e-5, "curl residual limit"),
                P(pr, "transversal_tol", "number", 1e-10, "limit on |x.A| / (|x||A|)"),
                P(pr, "radius", "number", 1.0, "radius for the regularity norms"),
                P(nu, "quad_nodes", "integer", 16, "Gauss-Legendre nodes"),
                P(nu, "h", "number", 1e-3, "curl finite-difference step"),
                P(nu, "L", "number", 5.0, "half width of the audit box"),
                P(nu, "samples", "integer", 1000, "transversality sample points")}});
  k.push_back({"kato_audit", "Kato-class norm of a radial potential.",
               "Kato class membership and its local norm",
               {P(pr, "potential", "profile", kRequired, "radial potential V"),
                P(pr, "dimension", "integer", 3, "2 or 3"),
                P(pr, "expect_in_class", "bool", true, "expected class membership"),
                P(pr, "expect_norm", "number", "none", "optional expected norm"),
                P(pr, "expect_tol", "number", 1e-6, "tolerance for expect_norm"),
                P(pr, "lattice_half_width", "number", 0.0, "centers on a cubic lattice"),
                P(pr, "lattice_spacing", "number", 1.0, "lattice spacing"),
                P(nu, "quad_nodes", "integer", 8, "Gauss-Legendre nodes")}});
  k.push_back({"weyl_audit", "Weyl-sequence constants C_n on dyadic balls.",
               "field vanishing somewhere at infinity",
               {P(pr, "field", "profile", kRequired, "radial field b(r)"),
                P(pr, "radii", "number[]", json{10, 20, 50, 100, 200}, "ball radii R_n"),
                P(pr, "center_rule", "string", "sqrt", "x_n = R_n + sqrt(R_n) (sqrt) or factor R_n (scaled)"),
                P(pr, "center_factor", "number", 10.0, "factor for the scaled rule"),
                P(pr, "mode", "string", "vanishing", "vanishing: C_n decreases; growth: fit exponent"),
                P(pr, "expect_exponent", "number", 2.0, "growth mode exponent"),
                P(pr, "exponent_tol", "number", 0.05, "growth mode tolerance"),
                P(nu, "quad_nodes", "integer", 8, "Gauss-Legendre nodes")}});
  return k;
}

const ScenarioKind& find_kind(const std::string& name) {
  for (const auto& k : scenario_kinds())
    if (k.name == name) return k;
  throw ConfigError("unknown scenario kind '" + name + "'", "kind");
}

std::string describe(const json& v) {
  if (v.is_null()) return "required";
  if (v.is_string()) return v.get<std::string>() == "none" ? "optional" : "default " + v.get<std::string>();
  return "default " + v.dump();
}

// ---------------------------------------------------------------------------
// Config access, driven by the schema.

class Params {
 public:
  Params(const ScenarioKind& kind, const json& config) : kind_(kind) {
    for (const char* sec : {"parameters", "numerics"}) {
      if (!config.contains(sec)) continue;
      const json& s = config.at(sec);
      if (!s.is_object()) throw ConfigError(std::string("'") + sec + "' must be an object", sec);
      for (const auto& [key, value] : s.items()) {
        if (!doc_or_null(sec, key))
          throw ConfigError("unknown key '" + std::string(sec) + "." + key + "'", std::string(sec) + "." + key);
        (void)value;
      }
    }
    config_ = config;
    for (const auto& p : kind.params)
      if (p.fallback.is_null() && !lookup(p).has_value())
        throw ConfigError("missing required key '" + p.name + "' (" + p.section + "." + p.name + ")",
                          p.name);
  }

  bool given(const std::string& name) const {
    const ParamDoc& p = doc(name);
    if (lookup(p)) return true;
    return !(p.fallback.is_string() && p.fallback.get<std::string>() == "none");
  }

  double number(const std::string& name) const {
    const json v = value(name);
    try {
      return decode(v);
    } catch (const InputError&) {
      throw type_error(name, "a number");
    }
  }

  long integer(const std::string& name) const {
    const json v = value(name);
    if (!v.is_number_integer()) throw type_error(name, "an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& name) const {
    const json v = value(name);
    if (!v.is_boolean()) throw type_error(name, "a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& name) const {
    const json v = value(name);
    if (!v.is_string()) throw type_error(name, "a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& name) const {
    const json v = value(name);
    if (!v.is_array()) throw type_error(name, "an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      try {
        out.push_back(decode(x));
      } catch (const InputError&) {
        throw type_error(name, "an array of numbers");
      }
    }
    return out;
  }

  std::vector<long> integers(const std::string& name) const {
    const json v = value(name);
    if (!v.is_array()) throw type_error(name, "an array of integers");
    std::vector<long> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw type_error(name, "an array of integers");
      out.push_back(x.get<long>());
    }
    return out;
  }

  std::pair<double, double> window(const std::string& name) const {
    const auto v = numbers(name);
    if (v.size() != 2 || !(v[0] < v[1])) throw type_error(name, "a window [lo, hi] with lo < hi");
    return {v[0], v[1]};
  }

  ProfileSpec profile(const std::string& name) const {
    const json v = value(name);
    const std::string path = doc(name).section + "." + name;
    if (!v.is_object() || !v.contains("type") || !v.at("type").is_string())
      throw ConfigError("'" + path + "' must be an object with a string 'type'", path + ".type");
    ProfileSpec spec;
    spec.type = v.at("type").get<std::string>();
    const ProfileType* t = nullptr;
    for (const auto& pt : profile_types())
      if (pt.name == spec.type) t = &pt;
    if (!t) throw ConfigError("unknown profile type '" + spec.type + "' in '" + path + "'", path + ".type");
    for (const auto& [key, x] : v.items()) {
      if (key == "type") continue;
      const bool known = std::any_of(t->defaults.begin(), t->defaults.end(),
                                     [&](const auto& d) { return d.first == key; });
      if (!known) throw ConfigError("unknown key '" + path + "." + key + "'", path + "." + key);
      if (!x.is_number()) throw ConfigError("'" + path + "." + key + "' must be a number", path + "." + key);
      spec.params[key] = x.get<double>();
    }
    return spec;
  }

 private:
  const ParamDoc* doc_or_null(const std::string& section, const std::string& name) const {
    for (const auto& p : kind_.params)
      if (p.section == section && p.name == name) return &p;
    return nullptr;
  }

  const ParamDoc& doc(const std::string& name) const {
    for (const auto& p : kind_.params)
      if (p.name == name) return p;
    throw Error("internal: parameter '" + name + "' not in schema");
  }

  std::optional<json> lookup(const ParamDoc& p) const {
    if (config_.contains(p.section) && config_.at(p.section).contains(p.name))
      return config_.at(p.section).at(p.name);
    return std::nullopt;
  }

  json value(const std::string& name) const {
    const ParamDoc& p = doc(name);
    if (auto v = lookup(p)) return *v;
    return p.fallback;
  }

  ConfigError type_error(const std::string& name, const std::string& what) const {
    const std::string path = doc(name).section + "." + name;
    return ConfigError("'" + path + "' must be " + what, path);
  }

  const ScenarioKind& kind_;
  json config_;
};

// ---------------------------------------------------------------------------

struct Outcome {
  json results = json::object();
  std::vector<std::pair<std::string, bool>> verdicts;
  void verdict(const std::string& name, bool pass) { verdicts.emplace_back(name, pass); }
};

unsigned thread_count(const RunOptions& opt) {
  if (opt.threads > 0) return opt.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i < count on at most `threads` workers; results land by index.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

json threshold_json(const ThresholdReport& r) {
  return {{"beta", encode(r.beta)},
          {"omega1", encode(r.omega1)},
          {"omega2", encode(r.omega2)},
          {"lambda", encode(r.lambda)},
          {"lambda_v1", encode(r.lambda_v1)},
          {"lambda_v2", encode(r.lambda_v2)},
          {"split", to_string(r.split)},
          {"split_parameter", encode(r.split_parameter())},
          {"branch_condition_agrees", r.branch_condition_agrees},
          {"provenance", {{"beta", r.provenance_beta}, {"omega1", r.provenance_omega1}, {"omega2", r.provenance_omega2}}}};
}

json spectral_json(const SpectralReport& r) {
  json j = {{"window", {encode(r.window.first), encode(r.window.second)}},
            {"R_max", encode(r.R_max)},
            {"N", r.N},
            {"tol", encode(r.tol)},
            {"eigenvalues", encode_all(r.eigenvalues)},
            {"localization_ratio", encode_all(r.localization_ratio)},
            {"drift", encode_all(r.drift)},
            {"spurious", r.spurious},
            {"sturm_count_difference", r.sturm_count_difference},
            {"genuine", encode_all(r.genuine())},
            {"threshold_consistent", r.threshold_consistent}};
  j["threshold"] = r.threshold ? encode(*r.threshold) : json(nullptr);
  return j;
}

json estimate_json(const AsymptoticEstimate& e) {
  return {{"radii", encode_all(e.radii)},
          {"values", encode_all(e.values)},
          {"limit", encode(e.limit)},
          {"stabilized", e.stabilized},
          {"rule", e.rule}};
}

void expectation(const Params& p, Outcome& out, double value, const char* name = "expect_lambda") {
  if (!p.given(name)) return;
  const double want = p.number(name);
  const double tol = p.number("expect_tol");
  out.results[name] = encode(want);
  out.verdict("matches_expected", std::fabs(value - want) <= tol * std::max(1.0, std::fabs(want)));
}

std::size_t count_of(long N, const char* key) {
  if (N <= 0) throw ConfigError(std::string("'numerics.") + key + "' must be positive", std::string("numerics.") + key);
  return static_cast<std::size_t>(N);
}

// ---------------------------------------------------------------------------
// Scenario kinds

Outcome run_threshold(const Params& p, const RunOptions&) {
  Outcome out;
  const double lam = compute_lambda(p.number("beta"), p.number("omega1"), p.number("omega2"));
  out.results["lambda"] = encode(lam);
  out.verdict("lambda_nonnegative", lam >= 0.0);
  expectation(p, out, lam);
  return out;
}

Outcome run_optimize_split(const Params& p, const RunOptions&) {
  Outcome out;
  const double b = p.number("beta"), w1 = p.number("omega1"), w2 = p.number("omega2");
  const ThresholdReport r = optimize_split(b, w1, w2);
  out.results["report"] = threshold_json(r);
  const long n = p.integer("samples");
  if (n < 2) throw ConfigError("'parameters.samples' must be at least 2", "parameters.samples");
  double grid_min = kInf;
  for (long i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    grid_min = std::min(grid_min, compute_lambda(b, s * w1, (1.0 - s) * w2));
  }
  out.results["grid_min"] = encode(grid_min);
  out.verdict("branch_condition_agrees", r.branch_condition_agrees);
  out.verdict("endpoint_is_minimal", grid_min >= r.lambda - 1e-12 * std::max(1.0, r.lambda));
  expectation(p, out, r.lambda);
  return out;
}

Outcome run_pauli(const Params& p, const RunOptions&) {
  Outcome out;
  const double lam = pauli_threshold(p.number("beta"), p.number("omega"));
  out.results["lambda"] = encode(lam);
  out.verdict("lambda_nonnegative", lam >= 0.0);
  expectation(p, out, lam);
  return out;
}

Outcome run_dirac(const Params& p, const RunOptions&) {
  Outcome out;
  const auto [lo, hi] = dirac_window(p.number("beta"), p.number("omega"), p.number("mass"));
  out.results["window"] = {encode(lo), encode(hi)};
  out.verdict("window_symmetric", lo == -hi);
  return out;
}

Outcome run_aharonov_bohm(const Params& p, const RunOptions& opt) {
  Outcome out;
  const double flux = p.number("flux");
  const auto ms = p.integers("m");
  const RadialFn V = make_profile(p.profile("potential"));
  const double lam = aharonov_bohm_threshold(p.number("omega1"), p.number("omega2"));
  const auto window = p.window("window");
  const double R = p.number("R_max"), tol = p.number("tol");
  const std::size_t N = count_of(p.integer("N"), "N");
  SpuriousPolicy policy;
  policy.seed = opt.seed;
  std::vector<SpectralReport> reps(ms.size());
  parallel_for(ms.size(), thread_count(opt), [&](std::size_t i) {
    const RadialChannel ch = aharonov_bohm_channel(flux, static_cast<int>(ms[i]), V);
    reps[i] = classify_spurious(ch, window, R, N, tol, lam, policy);
  });
  out.results["threshold"] = encode(lam);
  json chans = json::array();
  bool consistent = true;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    json c = spectral_json(reps[i]);
    c["m"] = ms[i];
    c["nu"] = encode(static_cast<double>(ms[i]) - flux);
    chans.push_back(c);
    consistent = consistent && reps[i].threshold_consistent;
  }
  out.results["channels"] = chans;
  out.verdict("no_genuine_above_threshold", consistent);
  return out;
}

Outcome run_miller_simon(const Params& p, const RunOptions& opt) {
  Outcome out;
  const double b0 = p.number("b0");
  if (!(b0 > 0.0) || !std::isfinite(b0)) throw ConfigError("'parameters.b0' must be positive", "b0");
  const auto ms = p.integers("m");
  const double thr = b0 * b0;
  const auto window = p.given("window") ? p.window("window") : std::make_pair(0.0, 0.999 * thr);
  const double R = p.number("R_max"), tol = p.number("tol");
  const std::size_t N = count_of(p.integer("N"), "N");
  const long levels = p.integer("levels");
  const double ctol = p.number("coulomb_tol");
  const bool cont = p.given("continuum_window");
  const auto cwin = cont ? p.window("continuum_window") : window;

  SpuriousPolicy policy;
  policy.seed = opt.seed;
  const std::size_t jobs = ms.size() * (cont ? 2 : 1);
  std::vector<SpectralReport> reps(jobs);
  parallel_for(jobs, thread_count(opt), [&](std::size_t j) {
    const std::size_t i = j % ms.size();
    // b(r) = b0 / r has h(r) = b0.
    const RadialChannel ch = miller_simon_channel_from_h([b0](double) { return b0; }, static_cast<double>(ms[i]),
                                                         "miller_simon m=" + std::to_string(ms[i]));
    reps[j] = classify_spurious(ch, j < ms.size() ? window : cwin, R, N, tol, thr, policy);
  });

  out.results["threshold"] = encode(thr);
  json chans = json::array();
  bool consistent = true, coulomb = true, continuum = true;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double m = static_cast<double>(ms[i]);
    json c = spectral_json(reps[i]);
    c["m"] = ms[i];
    const auto genuine = reps[i].genuine();
    json oracle = json::array();
    for (long n = 0; n < levels; ++n) {
      const double e = thr - m * m * b0 * b0 / std::pow(n + m + 0.5, 2);
      oracle.push_back(encode(e));
      if (e <= window.first || e >= window.second) continue;
      const bool hit = static_cast<std::size_t>(n) < genuine.size() && std::fabs(genuine[n] - e) <= ctol;
      coulomb = coulomb && hit;
    }
    c["coulomb_oracle"] = oracle;
    consistent = consistent && reps[i].threshold_consistent;
    if (cont) {
      const SpectralReport& r = reps[ms.size() + i];
      c["continuum"] = spectral_json(r);
      continuum = continuum && std::all_of(r.spurious.begin(), r.spurious.end(), [](bool s) { return s; });
      consistent = consistent && r.threshold_consistent;
    }
    chans.push_back(c);
  }
  out.results["channels"] = chans;
  out.verdict("no_genuine_above_threshold", consistent);
  out.verdict("coulomb_match", coulomb);
  if (cont) out.verdict("continuum_all_spurious", continuum);
  return out;
}

Outcome run_wigner_von_neumann(const Params& p, const RunOptions& opt) {
  Outcome out;
  const auto radii = p.numbers("radii");
  const int samples = static_cast<int>(p.integer("shells"));
  ShellSampling sampling;
  sampling.dimension = 3;
  const ScalarField V = [](const Point& x) { return wigner_von_neumann(norm(x, 3)); };
  PotentialSpec V2;
  V2.V = V;
  const auto w1 = omega1_estimate(V, radii, samples, sampling);
  const auto w2 = omega2_estimate(V2, radii, samples, sampling);
  const ThresholdReport thr = optimize_split(0.0, w1.limit, w2.limit);
  out.results["omega1"] = estimate_json(w1);
  out.results["omega2"] = estimate_json(w2);
  out.results["threshold"] = threshold_json(thr);

  const auto window = p.window("window");
  const double R = p.number("R_max"), tol = p.number("tol"), R2 = p.number("check_R");
  const std::size_t N = count_of(p.integer("N"), "N");
  const double h = R / static_cast<double>(N + 1);
  const auto N2 = static_cast<std::size_t>(std::llround(R2 / h)) - 1;
  SpuriousPolicy policy;
  policy.seed = opt.seed;
  const RadialChannel ch = wigner_von_neumann_channel();
  std::vector<SpectralReport> reps(2);
  parallel_for(2, thread_count(opt), [&](std::size_t i) {
    reps[i] = i == 0 ? classify_spurious(ch, window, R, N, tol, thr.lambda, policy)
                     : classify_spurious(ch, window, R2, N2, tol, thr.lambda, policy);
  });
  out.results["spectrum"] = spectral_json(reps[0]);
  out.results["spectrum_check"] = spectral_json(reps[1]);

  const double target = p.number("target"), ttol = p.number("target_tol");
  const auto g1 = reps[0].genuine(), g2 = reps[1].genuine();
  const bool one = g1.size() == 1 && std::fabs(g1[0] - target) <= ttol;
  double drift = kInf;
  if (one)
    for (double e : g2) drift = std::min(drift, std::fabs(e - g1[0]));
  out.results["drift_between_boxes"] = encode(drift);
  out.verdict("one_embedded_eigenvalue", one);
  out.verdict("survives_larger_box", drift < p.number("max_drift"));
  out.verdict("below_threshold", reps[0].threshold_consistent);
  return out;
}

Outcome run_custom_channel(const Params& p, const RunOptions& opt) {
  Outcome out;
  const double m = p.number("m");
  const RadialFn V = make_profile(p.profile("potential"));
  RadialChannel ch;
  if (p.given("field")) {
    const ProfileSpec fs = p.profile("field");
    RadialFn h;
    if (auto closed = closed_form_h(fs)) {
      h = *closed;
    } else {
      const RadialFn b = make_profile(fs);
      const int nodes = static_cast<int>(p.integer("quad_nodes"));
      h = [b, nodes](double r) { return h_profile(b, r, nodes); };
    }
    ch = miller_simon_channel_from_h(h, m, "custom");
    const RadialFn W = ch.W;
    ch.W = [W, V](double r) { return W(r) + V(r); };
  } else {
    ch.m = m;
    ch.h = [](double) { return 0.0; };
    ch.W = [m, V](double r) { return (m * m - 0.25) / (r * r) + V(r); };
    ch.label = "custom";
  }
  std::optional<double> thr;
  if (p.given("threshold")) thr = p.number("threshold");
  SpuriousPolicy policy;
  policy.seed = opt.seed;
  const auto rep = classify_spurious(ch, p.window("window"), p.number("R_max"), count_of(p.integer("N"), "N"),
                                     p.number("tol"), thr, policy);
  out.results["spectrum"] = spectral_json(rep);
  out.verdict("no_genuine_above_threshold", rep.threshold_consistent);
  return out;
}

Outcome run_virial_bench(const Params& p, const RunOptions&) {
  Outcome out;
  const RadialFn b = make_profile(p.profile("field"));
  const RadialFn v = make_profile(p.profile("potential"));
  const FieldSpec field = FieldSpec::radial(b, "bench field");
  const Grid grid = square(p.number("L"), p.number("h"));
  const GaugePotential A = poincare_gauge(field, static_cast<int>(p.integer("quad_nodes")));
  const MagneticForm form(grid, A);
  PotentialSpec V;
  V.V = [v](const Point& x) { return v(norm(x, 2)); };

  const double sigma = p.number("sigma"), k = p.number("momentum");
  const auto c = p.numbers("center");
  if (c.size() != 2) throw ConfigError("'parameters.center' must have two entries", "parameters.center");
  const GridState phi = sample(grid, [&](const Point& x) {
    const double r2 = std::pow(x[0] - c[0], 2) + std::pow(x[1] - c[1], 2);
    return std::exp(-r2 / (2 * sigma * sigma)) * std::exp(cplx(0.0, k * x[0]));
  });
  DilationOptions dopt;
  dopt.stencil = static_cast<int>(p.integer("stencil"));

  const auto ts = p.numbers("t_list");
  if (ts.size() < 3) throw ConfigError("'numerics.t_list' needs at least three entries", "numerics.t_list");
  const double rhs = virial_rhs(form, &field, V, phi);
  std::vector<double> qs;
  for (double t : ts) qs.push_back(commutator_quotient(form, V, phi, t, dopt));
  const RichardsonReport rep = richardson(ts, qs, rhs);
  const std::size_t m = ts.size();
  const double slope = std::log2(rep.residuals[m - 2] / rep.residuals[m - 1]);

  json table = json::array();
  for (std::size_t i = 0; i < m; ++i)
    table.push_back({{"t", encode(ts[i])}, {"quotient", encode(qs[i])}, {"residual", encode(rep.residuals[i])}});
  out.results["quotients"] = table;
  out.results["virial_rhs"] = encode(rhs);
  out.results["residual_slope"] = encode(slope);
  out.results["difference_order"] = encode(rep.order);
  out.results["extrapolated"] = encode(rep.extrapolated);
  out.results["relative_residual"] = encode(rep.relative_residual);
  out.results["form_q"] = encode(form_q(form, V, phi));
  out.results["boundary_ratio"] = encode(phi.boundary_ratio());
  out.results["state_norm"] = encode(phi.norm());

  const int d = 2;
  double direct = 0.0;
  for (std::size_t i = 0; i < phi.values.size(); ++i)
    direct += numerical_virial(V.V, grid.point(i), d) * std::norm(phi.values[i]);
  direct *= grid.cell();
  out.results["kato_virial"] = encode(kato_virial(form, V.V, phi));
  out.results["direct_virial"] = encode(direct);

  out.verdict("residual_slope", slope >= p.number("min_order"));
  out.verdict("extrapolated_residual", rep.relative_residual < p.number("max_relative_residual"));
  return out;
}

Outcome run_gauge_audit(const Params& p, const RunOptions& opt) {
  Outcome out;
  const FieldSpec field = FieldSpec::radial(make_profile(p.profile("field")), "audit field");
  const int nodes = static_cast<int>(p.integer("quad_nodes"));
  const double L = p.number("L");
  GaugeOptions gopt;
  gopt.probe_radius = L;
  const GaugePotential A = poincare_gauge(field, nodes, gopt);
  const Box box{2, {-L, -L, 0.0}, {L, L, 0.0}};
  const double curl = curl_check(A, field, p.number("h"), box);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-L, L);
  double transversal = 0.0;
  const long n = p.integer("samples");
  for (long i = 0; i < n; ++i) {
    const Point x{u(rng), u(rng), 0.0};
    const Point a = A(x);
    const double scale = norm(x, 2) * norm(a, 2);
    if (scale > 0.0) transversal = std::max(transversal, std::fabs(dot(x, a, 2)) / scale);
  }
  const double R = p.number("radius");
  out.results["curl_residual"] = encode(curl);
  out.results["transversality"] = encode(transversal);
  out.results["regularity_norm"] = encode(gauge_regularity_norm(field, R, nodes));
  out.results["weighted_gauge_norm"] = encode(weighted_gauge_norm(A, R, nodes));
  out.verdict("curl_matches_field", curl < p.number("curl_tol"));
  out.verdict("transversal", transversal < p.number("transversal_tol"));
  return out;
}

Outcome run_kato_audit(const Params& p, const RunOptions&) {
  Outcome out;
  const RadialFn v = make_profile(p.profile("potential"));
  const long d = p.integer("dimension");
  if (d != 2 && d != 3) throw ConfigError("'parameters.dimension' must be 2 or 3", "parameters.dimension");
  const int dim = static_cast<int>(d);
  const ScalarField V = [v, dim](const Point& x) { return v(norm(x, dim)); };
  const auto centers = cubic_lattice(dim, p.number("lattice_half_width"), p.number("lattice_spacing"));
  const KatoNormReport r = kato_norm(V, dim, static_cast<int>(p.integer("quad_nodes")), centers);
  json prof = json::array();
  for (const auto& [a, val] : r.alpha_profile) prof.push_back({{"alpha", encode(a)}, {"value", encode(val)}});
  out.results = {{"dimension", r.dimension},
                 {"norm", encode(r.norm)},
                 {"alpha_profile", prof},
                 {"stabilized", r.stabilized},
                 {"in_class", r.in_class}};
  out.verdict("class_as_expected", r.in_class == p.boolean("expect_in_class"));
  if (p.given("expect_norm")) {
    const double want = p.number("expect_norm");
    out.results["expect_norm"] = encode(want);
    out.verdict("matches_expected", std::fabs(r.norm - want) <= p.number("expect_tol") * std::max(1.0, std::fabs(want)));
  }
  return out;
}

Outcome run_weyl_audit(const Params& p, const RunOptions&) {
  Outcome out;
  const FieldSpec field = FieldSpec::radial(make_profile(p.profile("field")), "weyl field");
  const auto radii = p.numbers("radii");
  const std::string rule = p.string("center_rule");
  if (rule != "sqrt" && rule != "scaled")
    throw ConfigError("'parameters.center_rule' must be 'sqrt' or 'scaled'", "parameters.center_rule");
  const double factor = p.number("center_factor");
  std::vector<Point> centers;
  for (double R : radii) centers.push_back({rule == "sqrt" ? R + std::sqrt(R) : factor * R, 0.0, 0.0});
  const WeylReport w = weyl_vanishing(field, centers, radii, static_cast<int>(p.integer("quad_nodes")));
  json cs = json::array();
  for (const auto& c : centers) cs.push_back(encode(c[0]));
  const double slope = loglog_slope(radii, w.C);
  out.results = {{"radii", encode_all(radii)},   {"centers", cs},
                 {"C", encode_all(w.C)},         {"rayleigh", encode_all(w.rayleigh)},
                 {"gradient_term", encode_all(w.gradient_term)},
                 {"bound", encode_all(w.bound)}, {"loglog_slope", encode(slope)}};
  bool below = true;
  for (std::size_t i = 0; i < w.C.size(); ++i) below = below && w.rayleigh[i] <= w.bound[i] * (1 + 1e-10);
  out.verdict("rayleigh_below_bound", below);
  const std::string mode = p.string("mode");
  if (mode == "growth") {
    out.verdict("growth_exponent", std::fabs(slope - p.number("expect_exponent")) <= p.number("exponent_tol"));
  } else if (mode == "vanishing") {
    bool dec = true;
    for (std::size_t i = 1; i < w.C.size(); ++i) dec = dec && w.C[i] < w.C[i - 1];
    out.verdict("decreasing", dec);
  } else {
    throw ConfigError("'parameters.mode' must be 'vanishing' or 'growth'", "parameters.mode");
  }
  return out;
}

using Runner = Outcome (*)(const Params&, const RunOptions&);

Runner runner_for(const std::string& kind) {
  static const std::vector<std::pair<std::string, Runner>> table = {
      {"threshold", run_threshold},
      {"optimize_split", run_optimize_split},
      {"pauli", run_pauli},
      {"dirac", run_dirac},
      {"aharonov_bohm", run_aharonov_bohm},
      {"miller_simon", run_miller_simon},
      {"wigner_von_neumann", run_wigner_von_neumann},
      {"custom_channel", run_custom_channel},
      {"virial_bench", run_virial_bench},
      {"gauge_audit", run_gauge_audit},
      {"kato_audit", run_kato_audit},
      {"weyl_audit", run_weyl_audit},
  };
  for (const auto& [name, fn] : table)
    if (name == kind) return fn;
  throw ConfigError("unknown scenario kind '" + kind + "'", "kind");
}

void flatten(const json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", rows);
  } else if (j.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    rows.emplace_back(path, buf);
  } else if (j.is_boolean()) {
    rows.emplace_back(path, j.get<bool>() ? "true" : "false");
  } else if (j.is_string()) {
    rows.emplace_back(path, j.get<std::string>());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const std::vector<ScenarioKind>& scenario_kinds() {
  static const std::vector<ScenarioKind> kinds = build_kinds();
  return kinds;
}

std::string list_scenarios() {
  std::ostringstream os;
  for (const auto& k : scenario_kinds()) {
    os << k.name << "\n  " << k.summary << "\n  topic: " << k.topic << "\n";
    for (const auto& p : k.params)
      os << "    " << p.section << "." << p.name << " (" << p.type << ", " << describe(p.fallback) << "): " << p.doc
         << "\n";
  }
  os << "profiles (objects with a \"type\" key):\n";
  for (const auto& t : profile_types()) {
    os << "  " << t.name << ": " << t.formula;
    if (!t.defaults.empty()) {
      os << " [";
      for (std::size_t i = 0; i < t.defaults.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", t.defaults[i].second);
        os << (i ? ", " : "") << t.defaults[i].first << "=" << buf;
      }
      os << "]";
    }
    os << "\n";
  }
  return os.str();
}

json run_scenario(const json& config, const RunOptions& opt) {
  if (!config.is_object()) throw ConfigError("scenario must be a JSON object", "");
  for (const auto& [key, v] : config.items()) {
    (void)v;
    if (key != "kind" && key != "parameters" && key != "numerics" && key != "label" && key != "seed")
      throw ConfigError("unknown key '" + key + "'", key);
  }
  if (!config.contains("kind")) throw ConfigError("missing required key 'kind'", "kind");
  if (!config.at("kind").is_string()) throw ConfigError("'kind' must be a string", "kind");
  const std::string kind = config.at("kind").get<std::string>();
  const ScenarioKind& sk = find_kind(kind);
  RunOptions ro = opt;
  if (config.contains("seed")) {
    if (!config.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer", "seed");
    ro.seed = config.at("seed").get<std::uint64_t>();
  }
  const Params params(sk, config);

  const auto start = std::chrono::steady_clock::now();
  Outcome out = runner_for(kind)(params, ro);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json report;
  report["scenario"] = config;
  report["results"] = out.results;
  json verdicts = json::array();
  for (const auto& [name, pass] : out.verdicts) verdicts.push_back({{"name", name}, {"pass", pass}});
  report["verdicts"] = verdicts;
  report["provenance"] = {{"tool", "specbound"}, {"version", kToolVersion}, {"seed", ro.seed}};
  if (ro.timing) report["provenance"]["wall_time_s"] = wall;
  return report;
}

bool all_verdicts_pass(const json& report) {
  for (const auto& v : report.at("verdicts"))
    if (!v.at("pass").get<bool>()) return false;
  return true;
}

json parse_config(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ConfigError("parse error at line " + std::to_string(line) + ": " + e.what(), "");
  }
}

std::string to_json_text(const json& report) { return report.dump(2) + "\n"; }

std::string to_csv(const json& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report.at("results"), "results", rows);
  flatten(report.at("verdicts"), "verdicts", rows);
  flatten(report.at("provenance"), "provenance", rows);
  std::string out = "path,value\n";
  for (const auto& [p, v] : rows) out += csv_field(p) + "," + csv_field(v) + "\n";
  return out;
}

int run(const std::string& config_path, const std::string& out_path, const std::string& format,
        const RunOptions& opt) {
  try {
    if (format != "json" && format != "csv") throw ConfigError("format must be json or csv", "format");
    std::ifstream in(config_path);
    if (!in) throw InputError("cannot read " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const json report = run_scenario(parse_config(buf.str()), opt);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + out_path);
    out << (format == "json" ? to_json_text(report) : to_csv(report));
    if (!out) throw InputError("write failed: " + out_path);
    return all_verdicts_pass(report) ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "specbound: config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "specbound: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace specbound

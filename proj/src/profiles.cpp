#include "specbound/profiles.hpp"

#include <cmath>

#include "specbound/common.hpp"

namespace specbound {

const std::vector<ProfileType>& profile_types() {
  static const std::vector<ProfileType> types = {
      {"zero", "0", {}},
      {"constant", "value", {{"value", 1.0}}},
      {"power", "amplitude * r^-exponent", {{"amplitude", 1.0}, {"exponent", 1.0}}},
      {"gaussian", "amplitude * exp(-rate r^2)", {{"amplitude", 1.0}, {"rate", 1.0}}},
      {"wigner_von_neumann", "-32 sin r [g^3 cos r - 3 g^2 sin^3 r + g cos r + sin^3 r] / (1 + g^2)^2, g = 2r - sin 2r",
       {}},
      {"oscillatory", "amplitude * sin(frequency r) / (1 + r)^decay",
       {{"amplitude", 1.0}, {"frequency", 1.0}, {"decay", 1.0}}},
      {"compact_bump", "amplitude * exp(-1 / (1 - (r/radius)^2)) for r < radius",
       {{"amplitude", 1.0}, {"radius", 1.0}}},
  };
  return types;
}

namespace {

const ProfileType& lookup(const std::string& name) {
  for (const auto& t : profile_types())
    if (t.name == name) return t;
  throw InputError("unknown profile type '" + name + "'");
}

std::map<std::string, double> resolve(const ProfileSpec& spec) {
  const ProfileType& t = lookup(spec.type);
  std::map<std::string, double> p(t.defaults.begin(), t.defaults.end());
  for (const auto& [k, v] : spec.params) {
    if (!p.count(k)) throw InputError("unknown parameter '" + k + "' for profile '" + spec.type + "'");
    if (!std::isfinite(v)) throw InputError("profile parameter '" + k + "' must be finite");
    p[k] = v;
  }
  return p;
}

}  // namespace

RadialFn make_profile(const ProfileSpec& spec) {
  const auto p = resolve(spec);
  const std::string& t = spec.type;
  if (t == "zero") return [](double) { return 0.0; };
  if (t == "constant") {
    const double c = p.at("value");
    return [c](double) { return c; };
  }
  if (t == "power") {
    const double a = p.at("amplitude"), e = p.at("exponent");
    return [a, e](double r) { return a * std::pow(r, -e); };
  }
  if (t == "gaussian") {
    const double a = p.at("amplitude"), k = p.at("rate");
    return [a, k](double r) { return a * std::exp(-k * r * r); };
  }
  if (t == "wigner_von_neumann") return [](double r) { return wigner_von_neumann(r); };
  if (t == "oscillatory") {
    const double a = p.at("amplitude"), w = p.at("frequency"), d = p.at("decay");
    return [a, w, d](double r) { return a * std::sin(w * r) / std::pow(1.0 + r, d); };
  }
  const double a = p.at("amplitude"), R = p.at("radius");
  if (!(R > 0.0)) throw InputError("compact_bump radius must be positive");
  return [a, R](double r) {
    const double s = r / R;
    return s < 1.0 ? a * std::exp(-1.0 / (1.0 - s * s)) : 0.0;
  };
}

std::optional<RadialFn> closed_form_h(const ProfileSpec& spec) {
  const auto p = resolve(spec);
  const std::string& t = spec.type;
  if (t == "zero") return RadialFn([](double) { return 0.0; });
  if (t == "constant") {
    const double c = p.at("value");
    return RadialFn([c](double r) { return 0.5 * c * r; });
  }
  if (t == "power" && p.at("exponent") < 2.0) {
    const double a = p.at("amplitude"), e = p.at("exponent");
    return RadialFn([a, e](double r) { return a * std::pow(r, 1.0 - e) / (2.0 - e); });
  }
  if (t == "gaussian") {
    const double a = p.at("amplitude"), k = p.at("rate");
    if (k == 0.0) return RadialFn([a](double r) { return 0.5 * a * r; });
    return RadialFn([a, k](double r) { return -a * std::expm1(-k * r * r) / (2.0 * k * r); });
  }
  return std::nullopt;
}

}  // namespace specbound

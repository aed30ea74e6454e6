#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specbound/channels.hpp"

namespace specbound {

// Named radial profile r -> f(r) with numeric parameters.
struct ProfileSpec {
  std::string type;
  std::map<std::string, double> params;
};

struct ProfileType {
  std::string name;
  std::string formula;
  std::vector<std::pair<std::string, double>> defaults;  // every accepted parameter
};

const std::vector<ProfileType>& profile_types();

// Throws InputError on an unknown type or parameter.
RadialFn make_profile(const ProfileSpec& spec);

// h(r) = r^{-1} int_0^r b(s) s ds when the profile has a closed form.
std::optional<RadialFn> closed_form_h(const ProfileSpec& spec);

}  // namespace specbound

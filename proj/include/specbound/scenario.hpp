#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "specbound/common.hpp"

namespace specbound {

// Bad scenario file: unknown kind or key, missing key, wrong type. key() is the
// dotted path of the offending entry.
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& message, std::string key)
      : InputError(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

inline constexpr const char* kToolVersion = "0.1.0";

struct ParamDoc {
  std::string section;  // "parameters" or "numerics"
  std::string name;
  std::string type;
  nlohmann::json fallback;  // null when required
  std::string doc;
};

struct ScenarioKind {
  std::string name;
  std::string summary;
  std::string topic;  // the mathematical statement the scenario exercises
  std::vector<ParamDoc> params;
};

// Stable order.
const std::vector<ScenarioKind>& scenario_kinds();
std::string list_scenarios();

struct RunOptions {
  unsigned threads = 0;  // 0: logical cores
  std::uint64_t seed = 42;
  bool timing = false;  // wall time in the provenance block
};

// Validates the config and runs it. Report keys: scenario, results, verdicts, provenance.
nlohmann::json run_scenario(const nlohmann::json& config, const RunOptions& opt = {});
bool all_verdicts_pass(const nlohmann::json& report);

nlohmann::json parse_config(const std::string& text);
std::string to_json_text(const nlohmann::json& report);
// Long format: path,value with one row per numeric leaf, %.17g.
std::string to_csv(const nlohmann::json& report);

// Reads config_path, writes out_path. 0: all verdicts pass, 2: some verdict fails, 1: error.
int run(const std::string& config_path, const std::string& out_path, const std::string& format,
        const RunOptions& opt = {});

// Non-finite doubles travel as the strings "inf", "-inf" and "nan".
nlohmann::json encode(double x);
double decode(const nlohmann::json& v);

}  // namespace specbound

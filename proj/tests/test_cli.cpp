#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "specbound/scenario.hpp"

using namespace specbound;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result shell(const std::string& cmd) {
  std::string out;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) out += buf.data();
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string exe() { return SPECBOUND_EXE; }
std::string config(const std::string& name) { return std::string(SPECBOUND_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "specbound_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string run_cmd(const std::string& cfg, const fs::path& out, const std::string& extra = "") {
  return exe() + " run " + cfg + " --out " + out.string() + " " + extra;
}

const std::vector<std::string> kKinds = {"threshold",      "optimize_split",     "pauli",         "dirac",
                                         "aharonov_bohm",  "miller_simon",       "wigner_von_neumann",
                                         "custom_channel", "virial_bench",       "gauge_audit",   "kato_audit",
                                         "weyl_audit"};

void numeric_leaves(const json& j, const std::string& path, std::map<std::string, double>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) numeric_leaves(v, path.empty() ? k : path + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) numeric_leaves(j[i], path + "[" + std::to_string(i) + "]", out);
  } else if (j.is_number()) {
    out[path] = j.get<double>();
  }
}

}  // namespace

TEST_CASE("list-scenarios covers every kind in a stable order") {
  const Result a = shell(exe() + " list-scenarios");
  const Result b = shell(exe() + " list-scenarios");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::size_t last = 0;
  for (const auto& k : kKinds) {
    const auto pos = a.out.find("\n" + k + "\n");
    const auto at = a.out.rfind(k + "\n", 0) == 0 ? 0 : pos;
    INFO(k);
    REQUIRE(at != std::string::npos);
    CHECK(at >= last);
    last = at;
  }
  REQUIRE(scenario_kinds().size() == kKinds.size());
  for (std::size_t i = 0; i < kKinds.size(); ++i) {
    CHECK(scenario_kinds()[i].name == kKinds[i]);
    CHECK_FALSE(scenario_kinds()[i].topic.empty());
    for (const auto& p : scenario_kinds()[i].params) CHECK_FALSE(p.doc.empty());
  }
}

TEST_CASE("threshold scenario gives 8") {
  const auto out = scratch("threshold.json");
  const Result r = shell(run_cmd(config("threshold_v2_only.json"), out));
  CHECK(r.code == 0);
  const json rep = json::parse(slurp(out));
  CHECK(rep.at("results").at("lambda").get<double>() == 8.0);
  CHECK(rep.at("provenance").at("seed") == 42);
  CHECK(rep.at("provenance").at("version") == kToolVersion);
  CHECK(rep.at("scenario").at("kind") == "threshold");

  const Result s = shell(run_cmd(config("threshold.json"), out));
  CHECK(s.code == 0);
  CHECK(json::parse(slurp(out)).at("results").at("report").at("lambda").get<double>() == 8.0);
}

TEST_CASE("missing b0 exits 1 and names the key") {
  const Result r = shell(run_cmd(config("invalid/miller_simon_missing_b0.json"), scratch("bad.json")));
  CHECK(r.code == 1);
  CHECK(r.out.find("b0") != std::string::npos);
  try {
    run_scenario(json::parse(R"({"kind":"miller_simon","parameters":{}})"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "b0");
  }
}

TEST_CASE("config validation") {
  auto key_of = [](const std::string& text) {
    try {
      run_scenario(parse_config(text));
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of(R"({"kind":"threshold","parameters":{"beta":0,"omega1":0,"omega2":1,"gamma":2}})") ==
        "parameters.gamma");
  CHECK(key_of(R"({"kind":"threshold","parameters":{"beta":0,"omega1":0,"omega2":1},"extra":1})") == "extra");
  CHECK(key_of(R"({"kind":"nope"})") == "kind");
  CHECK(key_of(R"({"parameters":{}})") == "kind");
  CHECK(key_of(R"({"kind":"threshold","parameters":{"beta":"x","omega1":0,"omega2":1}})") == "parameters.beta");
  CHECK(key_of(R"({"kind":"kato_audit","parameters":{"potential":{"type":"gaussian","width":1}}})") ==
        "parameters.potential.width");
  CHECK(key_of(R"({"kind":"kato_audit","parameters":{"potential":{"type":"cubic"}}})") ==
        "parameters.potential.type");
  CHECK(key_of(R"({"kind":"threshold","numerics":{"R_max":1},"parameters":{"beta":0,"omega1":0,"omega2":1}})") ==
        "numerics.R_max");

  const auto bad = scratch("broken.json");
  write(bad, "{\n  \"kind\": \"threshold\",\n  \"parameters\": {\"beta\": 0,,}\n}\n");
  const Result r = shell(run_cmd(bad.string(), scratch("broken_out.json")));
  CHECK(r.code == 1);
  CHECK(r.out.find("line 3") != std::string::npos);
}

TEST_CASE("failing verdict exits 2") {
  const auto cfg = scratch("wrong.json");
  write(cfg, R"({"kind":"threshold","parameters":{"beta":0,"omega1":0,"omega2":16,"expect_lambda":9}})");
  const auto out = scratch("wrong_out.json");
  CHECK(shell(run_cmd(cfg.string(), out)).code == 2);
  const json rep = json::parse(slurp(out));
  CHECK_FALSE(all_verdicts_pass(rep));
}

TEST_CASE("JSON output is byte-identical across runs and thread counts") {
  const auto a = scratch("ab_1.json"), b = scratch("ab_2.json"), c = scratch("ab_3.json");
  REQUIRE(shell(run_cmd(config("aharonov_bohm.json"), a, "--threads 1")).code == 0);
  REQUIRE(shell(run_cmd(config("aharonov_bohm.json"), b, "--threads 1")).code == 0);
  REQUIRE(shell(run_cmd(config("aharonov_bohm.json"), c, "--threads 3")).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) == slurp(c));
  CHECK(slurp(a).find("wall_time") == std::string::npos);

  const auto s = scratch("ab_seed.json");
  REQUIRE(shell(run_cmd(config("aharonov_bohm.json"), s, "--seed 7")).code == 0);
  CHECK(json::parse(slurp(s)).at("provenance").at("seed") == 7);
}

TEST_CASE("CSV and JSON carry the same values") {
  const auto j = scratch("gauge.json"), c = scratch("gauge.csv");
  REQUIRE(shell(run_cmd(config("gauge_audit.json"), j)).code == 0);
  REQUIRE(shell(run_cmd(config("gauge_audit.json"), c, "--format csv")).code == 0);
  const json rep = json::parse(slurp(j));
  std::map<std::string, double> want;
  numeric_leaves(rep.at("results"), "results", want);
  REQUIRE_FALSE(want.empty());

  std::istringstream in(slurp(c));
  std::string line;
  std::getline(in, line);
  CHECK(line == "path,value");
  std::map<std::string, double> got;
  while (std::getline(in, line)) {
    const auto comma = line.rfind(',');
    const std::string path = line.substr(0, comma), value = line.substr(comma + 1);
    if (path.rfind("results", 0) == 0 && value != "true" && value != "false") got[path] = std::strtod(value.c_str(), nullptr);
  }
  CHECK(got.size() == want.size());
  for (const auto& [path, v] : want) {
    INFO(path);
    REQUIRE(got.count(path) == 1);
    CHECK(got[path] == v);
  }
}

TEST_CASE("non-finite values round-trip as strings") {
  CHECK(encode(INFINITY) == "inf");
  CHECK(encode(-INFINITY) == "-inf");
  CHECK(encode(NAN) == "nan");
  CHECK(std::isinf(decode(json("inf"))));
  CHECK(std::isnan(decode(json("nan"))));
  CHECK(decode(json(0.1)) == 0.1);
  CHECK_THROWS_AS(decode(json("x")), InputError);

  const json rep = run_scenario(json::parse(R"({"kind":"threshold","parameters":{"beta":"inf","omega1":0,"omega2":1}})"));
  CHECK(rep.at("results").at("lambda") == "inf");
}

TEST_CASE("miller_simon scenario matches the Coulomb oracle") {
  const json cfg = json::parse(R"({"kind":"miller_simon","parameters":{"b0":1,"m":[1,2]},
                                   "numerics":{"R_max":200,"N":10000}})");
  const json rep = run_scenario(cfg, RunOptions{2, 42, false});
  CHECK(all_verdicts_pass(rep));
  const auto& ch = rep.at("results").at("channels");
  REQUIRE(ch.size() == 2);
  CHECK(ch[0].at("genuine")[0].get<double>() == doctest::Approx(5.0 / 9.0).epsilon(2e-3));
}

TEST_CASE("every sample config runs") {
  for (const auto& entry : fs::directory_iterator(SPECBOUND_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const std::string name = entry.path().filename().string();
    if (name == "miller_simon.json" || name == "wigner_von_neumann.json" || name == "virial_bench.json") continue;
    INFO(name);
    const json rep = run_scenario(parse_config(slurp(entry.path())), RunOptions{1, 42, false});
    CHECK(all_verdicts_pass(rep));
  }
}

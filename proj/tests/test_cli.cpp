#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qfl/cli.hpp"
#include "qfl/json_io.hpp"

using namespace qfl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qfl_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json load(const std::string& file) { return json_io::read_file(std::string(QFL_TEST_DATA) + "/" + file); }

cli::RunResult run(const json& scenario, const fs::path& out, cli::Overrides flags = {}) {
  flags.out = out.string();
  std::ostringstream log;
  return cli::run_scenario(scenario, {}, flags, log);
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::string& header) {
  std::ifstream in(path);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("evolve writes closed-form attenuation trajectory") {
  const fs::path out = scratch_dir("evolve");
  const auto r = run(load("evolve_attenuation.json"), out);
  REQUIRE(r.exit_code == cli::kOk);
  std::string header;
  const auto rows = read_csv(r.csv_path, header);
  CHECK(header == "t,l_1,m_1,S_1_1,S_1_2,S_2_1,S_2_2");
  REQUIRE(rows.size() == 9);
  for (const auto& row : rows) {
    const double t = row[0];
    CHECK(std::abs(row[1]) < 1e-15);
    CHECK(std::abs(row[2] - std::sqrt(2.0) * std::exp(-t / 2)) < 1e-14);
    CHECK(std::abs(row[3] - 0.5) < 1e-14);
    CHECK(std::abs(row[6] - 0.5) < 1e-14);
  }
  CHECK(r.report["csv"]["columns"].size() == 7);
  CHECK(fs::exists(r.report_path));
}

TEST_CASE("report contents") {
  const fs::path out = scratch_dir("report");
  const auto r = run(load("evolve_attenuation.json"), out);
  const json rep = json_io::read_file(r.report_path);
  for (const char* key : {"version", "command", "inputs", "results", "tolerances", "checks", "passed", "timestamp"}) {
    CHECK(rep.contains(key));
  }
  CHECK(rep["tolerances"].contains("psd"));
  CHECK(rep["tolerances"].contains("rank"));
  CHECK(rep["tolerances"].contains("check"));
  CHECK(rep["passed"] == true);
}

TEST_CASE("invalid state exits 2 with the eigenvalue diagnostic") {
  const auto r = run(load("validate_quarter_identity.json"), scratch_dir("validate"));
  CHECK(r.exit_code == cli::kCheckFailure);
  CHECK(r.report["results"]["min_eigenvalue"].get<double>() == doctest::Approx(-0.5));
}

TEST_CASE("verify-oracle on attenuation") {
  const auto r = run(load("verify_oracle_attenuation.json"), scratch_dir("oracle"));
  CHECK(r.exit_code == cli::kOk);
  CHECK(r.report["results"]["max_mean_error"].get<double>() < 1e-5);
  CHECK(r.report["results"]["max_cov_error"].get<double>() < 1e-5);
  CHECK(r.report["results"]["max_weyl_error"].get<double>() < 1e-5);
}

TEST_CASE("exit codes") {
  const fs::path out = scratch_dir("codes");
  CHECK(run(json::parse(R"({"command": "nope"})"), out).exit_code == cli::kMalformedInput);
  CHECK(run(json::parse(R"({"command": "evolve", "inputs": {}})"), out).exit_code == cli::kMalformedInput);
  const json inadmissible = json::parse(R"({"command": "decompose",
      "inputs": {"pair": {"K": [[-0.5, 0], [0, -0.5]], "C": [[0, 0], [0, 0]]}}})");
  CHECK(run(inadmissible, out).exit_code == cli::kValidationFailure);
  json big = load("verify_oracle_attenuation.json");
  big["cutoff"] = 5000;
  CHECK(run(big, out).exit_code == cli::kDimensionCap);
  json tight = load("verify_oracle_attenuation.json");
  tight["inputs"]["steps_per_unit"] = 4;
  tight["inputs"]["times"] = json::array({0.25});
  CHECK(run(tight, out, {.tol = 1e-14}).exit_code == cli::kCheckFailure);
}

TEST_CASE("precedence: scenario < environment < flags") {
  json s = load("validate_quarter_identity.json");
  s["seed"] = 1;
  s["cutoff"] = 10;
  const fs::path out = scratch_dir("precedence");
  cli::Overrides env;
  env.seed = 2;
  env.cutoff = 12;
  cli::Overrides flags;
  flags.seed = 3;
  flags.out = out.string();
  std::ostringstream log;
  const auto r = cli::run_scenario(s, env, flags, log);
  CHECK(r.report["seed"] == 3);
  CHECK(r.report["cutoff"] == 12);

  setenv("QFL_TOL", "0.125", 1);
  setenv("QFL_SEED", "99", 1);
  const cli::Overrides from_env = cli::env_overrides();
  CHECK(*from_env.tol == 0.125);
  CHECK(*from_env.seed == 99u);
  setenv("QFL_CUTOFF", "abc", 1);
  CHECK_THROWS(cli::env_overrides());
  unsetenv("QFL_TOL");
  unsetenv("QFL_SEED");
  unsetenv("QFL_CUTOFF");
}

TEST_CASE("reports are deterministic apart from the timestamp") {
  const json s = json::parse(R"({"command": "sample-field", "seed": 5,
      "inputs": {"kind": "levy", "H": [[1, 0], [0, -2]], "u": [0.7, 0.7], "count": 50}})");
  const auto a = run(s, scratch_dir("det_a"));
  const auto b = run(s, scratch_dir("det_b"));
  REQUIRE(a.exit_code == cli::kOk);
  json ja = a.report, jb = b.report;
  ja.erase("timestamp");
  jb.erase("timestamp");
  ja.erase("csv");
  jb.erase("csv");
  CHECK(ja.dump() == jb.dump());
}

TEST_CASE("remaining commands run") {
  const fs::path out = scratch_dir("misc");
  const std::string pair = R"({"K": [[-0.5, 0.3], [-0.3, -0.5]], "C": [[1, 0], [0, 1]]})";
  const std::string state = R"({"l": [0.1], "m": [0.2], "S": [[0.6, 0], [0, 0.6]]})";
  CHECK(run(json::parse(R"({"command": "decompose", "inputs": {"pair": )" + pair + "}}"), out).exit_code == 0);
  CHECK(run(json::parse(R"({"command": "dilate", "inputs": {"pair": )" + pair + "}}"), out).exit_code == 0);
  CHECK(run(json::parse(R"({"command": "weyl", "inputs": {"t": 0.5, "z": [[[0.3, 0.1]]], "state": )" + state +
                        R"(, "pair": )" + pair + "}}"),
            out)
            .exit_code == 0);
  const auto tab = run(json::parse(R"({"command": "ito-table", "inputs": {"d": 2}})"), out);
  CHECK(tab.exit_code == 0);
  CHECK(tab.report["results"]["poisson"]["matches"] == true);
  const auto uni = run(json::parse(R"({"command": "unitarity", "seed": 3,
      "inputs": {"random": {"count": 5, "d": 2, "dim": 2}}})"), out);
  CHECK(uni.exit_code == 0);
  const auto gauss = run(json::parse(R"({"command": "sample-field", "seed": 1,
      "inputs": {"kind": "gaussian", "u0": [[0.1, 0.2]], "us": [[1], [2]], "count": 100}})"), out);
  CHECK(gauss.exit_code == 0);
  CHECK(fs::exists(gauss.csv_path));
  const auto kern = run(json::parse(R"({"command": "sample-field",
      "inputs": {"kind": "kernel", "kernel": {"K": [[1, 0.5], [0.5, 1]], "group": [[2, 1]]}, "z": [1, [0, 1]]}})"), out);
  CHECK(kern.exit_code == 0);
  CHECK(kern.report["results"]["vacuum_variance"].get<double>() == doctest::Approx(1.0));
}

#include "qfl/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "qfl/dilation.hpp"
#include "qfl/error.hpp"
#include "qfl/fields.hpp"
#include "qfl/fock.hpp"
#include "qfl/gaussian_state.hpp"
#include "qfl/ito.hpp"
#include "qfl/json_io.hpp"
#include "qfl/quasifree.hpp"

#ifndef QFL_VERSION
#define QFL_VERSION "0.0.0"
#endif

namespace qfl::cli {

using nlohmann::json;
namespace fs = std::filesystem;
namespace jio = qfl::json_io;

namespace {

const std::map<std::string, double> kCheckDefaults = {
    {"validate-state", 1e-9}, {"evolve", 1e-9},        {"weyl", 1e-9},
    {"decompose", 1e-8},      {"dilate", 1e-8},        {"verify-oracle", 1e-5},
    {"ito-table", 1e-12},     {"unitarity", 1e-12},    {"sample-field", 1e-12},
};

struct Context {
  std::string command;
  json inputs;
  std::uint64_t seed = 0;
  int cutoff = 30;
  std::map<std::string, double> tol;
  fs::path out_dir;
  std::string name;

  double check() const { return tol.at("check"); }
};

// What a command produces: results, named pass/fail checks and an optional CSV.
struct Outcome {
  json results = json::object();
  std::map<std::string, bool> checks;
  std::string csv;
  std::vector<std::string> csv_columns;
};

std::vector<double> times_from(const json& j) {
  const RealVector v = jio::real_vector_from(j);
  std::vector<double> times(v.data(), v.data() + v.size());
  for (double t : times) {
    if (!(t >= 0.0)) throw InvalidArgument("times must be nonnegative");
  }
  return times;
}

std::vector<std::string> moment_columns(int n) {
  std::vector<std::string> cols{"t"};
  for (int j = 1; j <= n; ++j) cols.push_back("l_" + std::to_string(j));
  for (int j = 1; j <= n; ++j) cols.push_back("m_" + std::to_string(j));
  for (int i = 1; i <= 2 * n; ++i) {
    for (int j = 1; j <= 2 * n; ++j) cols.push_back("S_" + std::to_string(i) + "_" + std::to_string(j));
  }
  return cols;
}

std::vector<std::string> sample_columns(Eigen::Index k) {
  std::vector<std::string> cols;
  for (Eigen::Index j = 1; j <= k; ++j) cols.push_back("x_" + std::to_string(j));
  return cols;
}

Outcome cmd_validate_state(const Context& ctx) {
  const GaussianState state = jio::state_from(jio::require(ctx.inputs, "state"));
  const StateDiagnostic diag = validate(state, ctx.check());
  Outcome out;
  out.results = {{"is_valid", diag.is_valid},
                 {"min_eigenvalue", diag.min_eigenvalue},
                 {"symmetry_defect", diag.symmetry_defect}};
  out.checks["valid_state"] = diag.is_valid;
  return out;
}

Outcome cmd_evolve(const Context& ctx) {
  const GaussianState state = jio::state_from(jio::require(ctx.inputs, "state"));
  const QuasifreePair pair = jio::pair_from(jio::require(ctx.inputs, "pair"), ctx.tol.at("psd"));
  const std::vector<double> times = times_from(jio::require(ctx.inputs, "times"));
  const auto traj = evolve_trajectory(state, pair, times, ctx.tol.at("psd"));
  Outcome out;
  std::vector<Moments> moments;
  json states = json::array();
  bool all_valid = true;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    moments.push_back({traj[k].l(), traj[k].m(), traj[k].S()});
    json s = jio::to_json(traj[k]);
    s["t"] = times[k];
    states.push_back(s);
    all_valid = all_valid && validate(traj[k], ctx.check()).is_valid;
  }
  out.results["states"] = states;
  out.checks["states_valid"] = all_valid;
  std::ostringstream csv;
  write_moment_csv(csv, times, moments);
  out.csv = csv.str();
  out.csv_columns = moment_columns(state.n());
  return out;
}

Outcome cmd_weyl(const Context& ctx) {
  Outcome out;
  std::vector<ComplexVector> points;
  for (const auto& z : jio::require(ctx.inputs, "z")) points.push_back(jio::complex_vector_from(z));
  if (ctx.inputs.contains("state")) {
    const GaussianState state = jio::state_from(ctx.inputs["state"]);
    json values = json::array();
    bool bounded = true;
    for (const auto& z : points) {
      const cplx v = weyl_transform(state, z, ctx.tol.at("psd"));
      bounded = bounded && std::abs(v) <= 1.0 + ctx.check();
      values.push_back(jio::to_json(v));
    }
    out.results["transform"] = values;
    out.checks["transform_bounded"] = bounded;
  }
  if (ctx.inputs.contains("pair")) {
    const QuasifreePair pair = jio::pair_from(ctx.inputs["pair"], ctx.tol.at("psd"));
    const double t = jio::require(ctx.inputs, "t").get<double>();
    json actions = json::array();
    bool contractive = true;
    for (const auto& z : points) {
      const WeylActionResult r = weyl_action(pair, t, z);
      contractive = contractive && r.damping_exponent >= -ctx.check();
      actions.push_back({{"z_out", jio::to_json(r.z_out)}, {"damping_exponent", r.damping_exponent}});
    }
    out.results["action"] = actions;
    out.checks["action_contractive"] = contractive;
  }
  if (!ctx.inputs.contains("state") && !ctx.inputs.contains("pair")) {
    throw MalformedInput("weyl needs \"state\" or \"pair\"");
  }
  return out;
}

json residuals_json(const DecompositionResiduals& r) {
  return {{"c_residual", r.c_residual},
          {"k_residual", r.k_residual},
          {"symplectic_defect", r.symplectic_defect},
          {"hamiltonian_residual", r.hamiltonian_residual}};
}

bool residuals_ok(const DecompositionResiduals& r, double tol) {
  return r.c_residual <= tol && r.k_residual <= tol && r.symplectic_defect <= tol &&
         r.hamiltonian_residual <= tol;
}

Outcome cmd_decompose(const Context& ctx) {
  const QuasifreePair pair = jio::pair_from(jio::require(ctx.inputs, "pair"), ctx.tol.at("psd"));
  const DilationSpec spec = decompose(pair, ctx.tol.at("rank"));
  const DecompositionResiduals res = reconstruction_residuals(spec);
  Outcome out;
  out.results = {{"dilation", jio::to_json(spec)}, {"residuals", residuals_json(res)}};
  out.checks["reconstruction"] = residuals_ok(res, ctx.check());
  return out;
}

Outcome cmd_dilate(const Context& ctx) {
  DilationSpec spec;
  if (ctx.inputs.contains("dilation")) {
    spec = jio::dilation_from(ctx.inputs["dilation"]);
  } else {
    spec = decompose(jio::pair_from(jio::require(ctx.inputs, "pair"), ctx.tol.at("psd")), ctx.tol.at("rank"));
  }
  const DilationReport rep = dilation_report(spec);
  const DecompositionResiduals res = reconstruction_residuals(spec);
  json couplings = json::array();
  for (const auto& [u, v] : rep.couplings) couplings.push_back({{"u", jio::to_json(u)}, {"v", jio::to_json(v)}});
  json ham = json::array();
  for (const auto& h : rep.hamiltonian) ham.push_back({{"lambda", h.lambda}, {"w", jio::to_json(h.w)}});
  Outcome out;
  out.results = {{"n", rep.n},
                 {"noise_dimension", rep.noise_dimension},
                 {"hamiltonian_rank", rep.hamiltonian_rank},
                 {"pure_hamiltonian", rep.pure_hamiltonian},
                 {"trivial", rep.trivial},
                 {"couplings", couplings},
                 {"hamiltonian", ham},
                 {"Kprime", jio::to_json(rep.k_prime)},
                 {"summary", rep.summary},
                 {"residuals", residuals_json(res)}};
  out.checks["reconstruction"] = residuals_ok(res, ctx.check());
  return out;
}

Outcome cmd_verify_oracle(const Context& ctx) {
  const GaussianState state = jio::state_from(jio::require(ctx.inputs, "state"));
  const QuasifreePair pair = jio::pair_from(jio::require(ctx.inputs, "pair"), ctx.tol.at("psd"));
  const std::vector<double> times = times_from(jio::require(ctx.inputs, "times"));
  OracleOptions opts;
  opts.cutoff = ctx.cutoff;
  opts.seed = ctx.seed;
  opts.rank_tol = ctx.tol.at("rank");
  if (ctx.inputs.contains("steps_per_unit")) opts.steps_per_unit = ctx.inputs["steps_per_unit"].get<int>();
  if (ctx.inputs.contains("weyl_points")) {
    for (const auto& z : ctx.inputs["weyl_points"]) opts.weyl_points.push_back(jio::complex_vector_from(z));
  }
  const auto reports = oracle_trajectory(state, pair, times, opts);
  Outcome out;
  json rows = json::array();
  double mean_err = 0.0, cov_err = 0.0, weyl_err = 0.0, leak = 0.0;
  std::vector<Moments> fock;
  for (const auto& r : reports) {
    rows.push_back({{"t", r.t},
                    {"mean_error", r.mean_error},
                    {"cov_error", r.cov_error},
                    {"weyl_error", r.weyl_error},
                    {"leakage", r.leakage},
                    {"closed_form", jio::to_json(r.closed_form)}});
    mean_err = std::max(mean_err, r.mean_error);
    cov_err = std::max(cov_err, r.cov_error);
    weyl_err = std::max(weyl_err, r.weyl_error);
    leak = std::max(leak, r.leakage);
    fock.push_back(r.fock);
  }
  out.results = {{"times", rows},
                 {"max_mean_error", mean_err},
                 {"max_cov_error", cov_err},
                 {"max_weyl_error", weyl_err},
                 {"max_leakage", leak},
                 {"steps_per_unit", opts.steps_per_unit}};
  out.checks["mean"] = mean_err <= ctx.check();
  out.checks["covariance"] = cov_err <= ctx.check();
  out.checks["weyl"] = weyl_err <= ctx.check();
  out.checks["truncation_trusted"] = leak <= kTrustedLeakage;
  std::ostringstream csv;
  write_moment_csv(csv, times, fock);
  out.csv = csv.str();
  out.csv_columns = moment_columns(state.n());
  return out;
}

Outcome cmd_ito_table(const Context& ctx) {
  const int d = ctx.inputs.value("d", 1);
  const std::string which = ctx.inputs.value("table", std::string("both"));
  if (which != "quadrature" && which != "poisson" && which != "both") {
    throw InvalidArgument("ito-table: table must be quadrature, poisson or both");
  }
  Outcome out;
  if (which != "poisson") {
    const auto t = ito::quadrature_table(d);
    out.results["quadrature"] = {{"rendered", t.render()}, {"matches", t.matches}};
    out.checks["quadrature_table"] = t.matches;
  }
  if (which != "quadrature") {
    const auto t = ito::poisson_table(d);
    out.results["poisson"] = {{"rendered", t.render()}, {"matches", t.matches}};
    out.checks["poisson_table"] = t.matches;
  }
  return out;
}

Outcome cmd_unitarity(const Context& ctx) {
  std::vector<ito::HPData> draws;
  if (ctx.inputs.contains("random")) {
    const json& r = ctx.inputs["random"];
    const int count = r.value("count", 1);
    const int d = r.value("d", 1);
    const int dim = r.value("dim", 2);
    if (count < 1) throw InvalidArgument("unitarity: count must be >= 1");
    std::mt19937_64 rng(ctx.seed);
    for (int k = 0; k < count; ++k) draws.push_back(ito::random_hp_data(d, dim, rng));
  } else {
    ito::HPData data;
    data.s = jio::complex_matrix_from(jio::require(ctx.inputs, "S"));
    for (const auto& l : jio::require(ctx.inputs, "L")) data.ls.push_back(jio::complex_matrix_from(l));
    data.h = jio::complex_matrix_from(jio::require(ctx.inputs, "H"));
    draws.push_back(std::move(data));
  }
  Outcome out;
  json rows = json::array();
  bool all = true;
  double worst = 0.0;
  for (const auto& data : draws) {
    const auto coeffs = ito::hp_coefficients(data.s, data.ls, data.h);
    const auto rep = ito::unitarity_report(coeffs, ctx.check());
    const ComplexMatrix id = ComplexMatrix::Identity(data.h.rows(), data.h.cols());
    const double flow_at_identity =
        max_abs(ito::flow_generator(data.s, data.ls, data.h, id).theta[0][0]);
    rows.push_back({{"unitary", rep.unitary},
                    {"first_residual", rep.first_residual},
                    {"second_residual", rep.second_residual},
                    {"lindblad_at_identity", flow_at_identity}});
    all = all && rep.unitary;
    worst = std::max(worst, flow_at_identity);
  }
  out.results = {{"draws", rows}};
  out.checks["unitary"] = all;
  out.checks["lindblad_annihilates_identity"] = worst <= ctx.check() * 10.0;
  return out;
}

Outcome cmd_sample_field(const Context& ctx) {
  const std::string kind = jio::require(ctx.inputs, "kind").get<std::string>();
  const int count = ctx.inputs.value("count", 1000);
  Outcome out;
  if (kind == "gaussian") {
    const ComplexVector u0 = jio::complex_vector_from(jio::require(ctx.inputs, "u0"));
    std::vector<ComplexVector> us;
    for (const auto& u : jio::require(ctx.inputs, "us")) us.push_back(jio::complex_vector_from(u));
    const std::string fam = ctx.inputs.value("family", std::string("p"));
    if (fam != "p" && fam != "q") throw InvalidArgument("sample-field: family must be p or q");
    const FieldLaw law = coherent_gaussian_field(
        u0, us, fam == "p" ? FieldFamily::momentum : FieldFamily::position, ctx.check());
    const RealMatrix draws = sample(law, count, ctx.seed);
    out.results["law"] = jio::to_json(law);
    out.results["count"] = count;
    out.results["empirical_mean"] = jio::to_json(sample_mean(draws));
    if (count > 1) out.results["empirical_covariance"] = jio::to_json(sample_covariance(draws));
    std::ostringstream csv;
    write_samples_csv(csv, draws);
    out.csv = csv.str();
    out.csv_columns = sample_columns(draws.cols());
  } else if (kind == "levy") {
    const LevyLaw law = levy_law(jio::complex_matrix_from(jio::require(ctx.inputs, "H")),
                                 jio::complex_vector_from(jio::require(ctx.inputs, "u")), ctx.check());
    const RealVector draws = sample(law, count, ctx.seed);
    out.results["law"] = jio::to_json(law);
    out.results["count"] = count;
    out.results["law_mean"] = law.mean();
    out.results["law_variance"] = law.variance();
    out.results["empirical_mean"] = draws.mean();
    std::ostringstream csv;
    write_samples_csv(csv, RealMatrix(draws));
    out.csv = csv.str();
    out.csv_columns = sample_columns(1);
  } else if (kind == "kernel") {
    const KernelModel model = jio::kernel_from(jio::require(ctx.inputs, "kernel"));
    const ComplexMatrix f = gns_factor(model, ctx.tol.at("psd"));
    const double gram_err = max_abs(ComplexMatrix(f.adjoint() * f - model.K));
    out.results["gns_vectors"] = jio::to_json(ComplexMatrix(f.transpose()));
    out.results["gram_error"] = gram_err;
    out.checks["gram_identity"] = gram_err <= 1e-10 * (1.0 + max_abs(model.K));
    if (ctx.inputs.contains("z")) {
      const ComplexVector z = jio::complex_vector_from(ctx.inputs["z"]);
      const double var = vacuum_field_variance(z, model);
      out.results["vacuum_variance"] = var;
      bool invariant = true;
      for (const auto& perm : model.group) {
        ComplexVector moved(z.size());
        for (Eigen::Index j = 0; j < z.size(); ++j) moved(perm[j]) = z(j);
        invariant = invariant && std::abs(vacuum_field_variance(moved, model) - var) <= 1e-12 * (1.0 + var);
      }
      out.checks["variance_invariant"] = invariant;
    }
  } else {
    throw InvalidArgument("sample-field: kind must be gaussian, levy or kernel");
  }
  return out;
}

const std::map<std::string, std::function<Outcome(const Context&)>> kCommands = {
    {"validate-state", cmd_validate_state}, {"evolve", cmd_evolve},
    {"weyl", cmd_weyl},                     {"decompose", cmd_decompose},
    {"dilate", cmd_dilate},                 {"verify-oracle", cmd_verify_oracle},
    {"ito-table", cmd_ito_table},           {"unitarity", cmd_unitarity},
    {"sample-field", cmd_sample_field},
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomically(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << text;
    if (!os.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

template <typename T>
T scenario_value(const json& scenario, const std::string& key, T fallback) {
  if (!scenario.contains(key)) return fallback;
  try {
    return scenario[key].get<T>();
  } catch (const json::exception&) {
    throw MalformedInput("field \"" + key + "\" has the wrong type");
  }
}

Context resolve(const json& scenario, const Overrides& env, const Overrides& flags) {
  if (!scenario.is_object()) throw MalformedInput("scenario must be a JSON object");
  Context ctx;
  ctx.command = scenario_value<std::string>(scenario, "command", "");
  if (!kCommands.count(ctx.command)) throw MalformedInput("unknown command \"" + ctx.command + "\"");
  ctx.inputs = scenario.value("inputs", json::object());
  ctx.seed = scenario_value<std::uint64_t>(scenario, "seed", 0);
  ctx.cutoff = scenario_value<int>(scenario, "cutoff", 30);
  std::string out = scenario_value<std::string>(scenario, "out", ".");
  ctx.name = scenario_value<std::string>(scenario, "name", ctx.command);
  ctx.tol = {{"psd", kDefaultPsdTol}, {"rank", kDefaultRankTol}, {"check", kCheckDefaults.at(ctx.command)}};
  if (scenario.contains("tolerances")) {
    const json& t = scenario["tolerances"];
    if (!t.is_object()) throw MalformedInput("\"tolerances\" must be an object");
    for (const auto& [key, value] : t.items()) {
      if (!value.is_number()) throw MalformedInput("tolerance \"" + key + "\" must be a number");
      ctx.tol[key] = value.get<double>();
    }
  }
  for (const Overrides* o : {&env, &flags}) {
    if (o->out) out = *o->out;
    if (o->seed) ctx.seed = *o->seed;
    if (o->cutoff) ctx.cutoff = *o->cutoff;
    if (o->tol) ctx.tol["check"] = *o->tol;
  }
  for (const auto& [key, value] : ctx.tol) {
    if (!(value > 0.0)) throw InvalidArgument("tolerance \"" + key + "\" must be positive");
  }
  if (ctx.cutoff < 2) throw InvalidArgument("cutoff must be >= 2");
  ctx.out_dir = out;
  return ctx;
}

}  // namespace

Overrides env_overrides() {
  Overrides o;
  auto get = [](const char* key) -> std::optional<std::string> {
    const char* v = std::getenv(key);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  try {
    if (auto v = get("QFL_OUT")) o.out = *v;
    if (auto v = get("QFL_SEED")) o.seed = std::stoull(*v);
    if (auto v = get("QFL_CUTOFF")) o.cutoff = std::stoi(*v);
    if (auto v = get("QFL_TOL")) o.tol = std::stod(*v);
  } catch (const std::logic_error&) {
    throw MalformedInput("unparseable QFL_* environment override");
  }
  return o;
}

RunResult run_scenario(const json& scenario, const Overrides& env, const Overrides& flags, std::ostream& log) {
  RunResult result;
  Context ctx;
  bool resolved = false;
  json report = {{"version", QFL_VERSION}, {"scenario", scenario}};
  try {
    ctx = resolve(scenario, env, flags);
    resolved = true;
    report["command"] = ctx.command;
    report["inputs"] = ctx.inputs;
    report["seed"] = ctx.seed;
    report["cutoff"] = ctx.cutoff;
    report["tolerances"] = ctx.tol;
    report.erase("scenario");

    const Outcome outcome = kCommands.at(ctx.command)(ctx);
    bool passed = true;
    for (const auto& [name, ok] : outcome.checks) passed = passed && ok;
    report["results"] = outcome.results;
    report["checks"] = outcome.checks;
    report["passed"] = passed;
    result.exit_code = passed ? kOk : kCheckFailure;
    if (!outcome.csv.empty()) {
      const fs::path csv = ctx.out_dir / (ctx.name + ".csv");
      write_atomically(csv, outcome.csv);
      report["csv"] = {{"path", csv.string()}, {"columns", outcome.csv_columns}};
      result.csv_path = csv.string();
    }
  } catch (const MalformedInput& e) {
    result.exit_code = kMalformedInput;
    report["error"] = e.what();
  } catch (const json::exception& e) {
    result.exit_code = kMalformedInput;
    report["error"] = std::string("malformed input: ") + e.what();
  } catch (const DimensionCapExceeded& e) {
    result.exit_code = kDimensionCap;
    report["error"] = e.what();
  } catch (const InvalidArgument& e) {
    result.exit_code = kValidationFailure;
    report["error"] = e.what();
  } catch (const Error& e) {
    result.exit_code = kCheckFailure;
    report["error"] = e.what();
  }
  report["exit_code"] = result.exit_code;
  report["timestamp"] = utc_timestamp();
  if (report.contains("error")) log << "qfl: " << report["error"].get<std::string>() << '\n';
  if (resolved) {
    try {
      const fs::path path = ctx.out_dir / (ctx.name + ".json");
      write_atomically(path, report.dump(2) + "\n");
      result.report_path = path.string();
    } catch (const std::exception& e) {
      log << "qfl: " << e.what() << '\n';
      if (result.exit_code == kOk) result.exit_code = kValidationFailure;
    }
  }
  result.report = std::move(report);
  return result;
}

int main(int argc, char** argv) {
  CLI::App app{"Quasifree semigroups, Gaussian states and their stochastic dilations"};
  app.set_version_flag("--version", std::string(QFL_VERSION));
  std::string scenario_path;
  Overrides flags;
  std::string out;
  std::uint64_t seed = 0;
  int cutoff = 0;
  double tol = 0.0;
  app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  auto* out_opt = app.add_option("--out", out, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
  auto* cutoff_opt = app.add_option("--cutoff", cutoff, "Fock cutoff per mode");
  auto* tol_opt = app.add_option("--tol", tol, "Pass/fail tolerance of the command");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationFailure;
  }
  if (*out_opt) flags.out = out;
  if (*seed_opt) flags.seed = seed;
  if (*cutoff_opt) flags.cutoff = cutoff;
  if (*tol_opt) flags.tol = tol;

  json scenario;
  Overrides env;
  try {
    env = env_overrides();
    scenario = jio::read_file(scenario_path);
  } catch (const MalformedInput& e) {
    std::cerr << "qfl: " << e.what() << '\n';
    return kMalformedInput;
  }
  const RunResult r = run_scenario(scenario, env, flags, std::cerr);
  if (!r.report_path.empty()) std::cout << r.report_path << '\n';
  return r.exit_code;
}

}  // namespace qfl::cli

// pcdispatch: polynomial-chaos surrogates for stochastic economic dispatch.
//
// Subcommands: build, eval, mc, convergence, validate, grid.
// Exit codes: 0 success, 1 internal/solver error, 2 input/parse error,
// 3 domain error (demand outside the surrogate's load box).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcd/commitment.hpp"
#include "pcd/core_model.hpp"
#include "pcd/estimators.hpp"
#include "pcd/parallel.hpp"
#include "pcd/pce.hpp"
#include "pcd/quadrature.hpp"

namespace {

using namespace pcd;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
  int exit_code;
};

CommitmentSchedule load_commitment(const std::string& spec, const CaseDefinition& c) {
  const int G = static_cast<int>(c.generators.size());
  const int T = c.loads.periods();
  if (spec == "all-on") return CommitmentSchedule::all_on(G, T);
  std::ifstream in(spec);
  if (!in) throw CliError(2, "commitment file not found: " + spec);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CliError(2, "malformed commitment file " + spec + ": " + e.what());
  }
  if (!j.contains("x") || !j.at("x").is_array())
    throw CliError(2, "commitment file must contain an 'x' array of generator rows");
  CommitmentSchedule x;
  x.n_gens = static_cast<int>(j.at("x").size());
  if (x.n_gens != G) throw CliError(2, "commitment has the wrong number of generator rows");
  x.n_periods = T;
  for (const auto& row : j.at("x")) {
    if (static_cast<int>(row.size()) != T)
      throw CliError(2, "commitment row length does not match the horizon");
    for (const auto& v : row) {
      const int b = v.get<int>();
      if (b != 0 && b != 1) throw CliError(2, "commitment entries must be 0 or 1");
      x.x.push_back(static_cast<std::uint8_t>(b));
    }
  }
  return x;
}

std::vector<double> parse_demand(const std::string& spec, int periods) {
  std::string text;
  if (std::filesystem::exists(spec)) {
    std::ifstream in(spec);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else if (spec.find(',') != std::string::npos) {
    text = spec;  // inline comma-separated values
  } else {
    throw CliError(2, "demand file not found: " + spec);
  }
  for (char& ch : text)
    if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';

  std::vector<double> values;
  std::istringstream in(text);
  std::string tok;
  bool skipped_header = false;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      values.push_back(v);
    } catch (const std::exception&) {
      if (!skipped_header && values.empty()) {
        skipped_header = true;  // tolerate one header row of labels
        continue;
      }
      throw CliError(2, "demand file contains a non-numeric token: " + tok);
    }
  }
  // rows of "t,value" are accepted as well: strip the index column
  if (static_cast<int>(values.size()) == 2 * periods) {
    bool indexed = true;
    for (int t = 0; t < periods; ++t)
      if (values[2 * t] != static_cast<double>(t + 1)) indexed = false;
    if (indexed) {
      std::vector<double> stripped(periods);
      for (int t = 0; t < periods; ++t) stripped[t] = values[2 * t + 1];
      values = std::move(stripped);
    }
  }
  if (static_cast<int>(values.size()) != periods)
    throw CliError(2, "demand has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(periods));
  return values;
}

void check_surrogate_matches(const PCExpansion& pce, const CaseDefinition& c,
                             const CommitmentSchedule& x) {
  if (pce.meta.case_hash != 0 && pce.meta.case_hash != c.hash())
    throw CliError(2, "surrogate was built for a different case (hash mismatch)");
  if (!pce.meta.commitment.empty() && pce.meta.commitment != x.row_strings())
    throw CliError(2, "surrogate was built for a different commitment");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

int cmd_build(const std::string& case_path, const std::string& commitment, int order, int level,
              const std::string& out_path, int threads) {
  CaseDefinition c = load_case(case_path);
  CommitmentSchedule x = load_commitment(commitment, c);
  const auto t0 = std::chrono::steady_clock::now();
  SparseGrid grid = smolyak_grid(c.loads.periods(), level);
  MultiIndexSet set = total_degree_indices(c.loads.periods(), order);
  PCExpansion pce = project(c, x, set, grid, nullptr, threads);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_pce(pce, out_path);
  std::cout << "nodes: " << grid.size() << "\n"
            << "terms: " << set.size() << "\n"
            << "c0 (expected cost): " << fmt(pce_mean(pce)) << "\n"
            << "variance: " << fmt(pce_variance(pce)) << "\n";
  if (pce.meta.exactness_warning)
    std::cout << "warning: projection degree exceeds the grid's exactness\n";
  std::cout << "build time: " << fmt(secs) << " s\n"
            << "written: " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& surrogate_path, const std::string& case_path,
             const std::string& commitment, const std::string& demand_spec, bool compare) {
  std::optional<PCExpansion> pce;
  std::optional<CaseDefinition> c;
  std::optional<CommitmentSchedule> x;
  if (!surrogate_path.empty()) pce = load_pce(surrogate_path);
  if (!case_path.empty()) {
    c = load_case(case_path);
    x = load_commitment(commitment, *c);
  }
  if (!pce && !c) throw CliError(2, "eval needs --surrogate and/or --case");
  const int periods = pce ? pce->box.periods() : c->loads.periods();
  const std::vector<double> demand = parse_demand(demand_spec, periods);

  if (compare) {
    if (!pce || !c) throw CliError(2, "--compare needs both --surrogate and --case");
    check_surrogate_matches(*pce, *c, *x);
    const double approx = surrogate_eval(*pce, demand);
    const double direct = EdEvaluator(*c, *x).evaluate(demand);
    const double rel = std::abs(direct) > 1e-9 ? std::abs(approx - direct) / std::abs(direct)
                                               : std::abs(approx - direct);
    std::cout << "surrogate: " << fmt(approx) << "\n"
              << "direct:    " << fmt(direct) << "\n"
              << "rel_discrepancy: " << fmt(rel) << "\n";
    return 0;
  }
  if (pce) {
    std::cout << fmt(surrogate_eval(*pce, demand)) << "\n";
  } else {
    std::cout << fmt(EdEvaluator(*c, *x).evaluate(demand)) << "\n";
  }
  return 0;
}

int cmd_mc(const std::string& case_path, const std::string& commitment,
           const std::string& surrogate_path, long n, std::uint64_t seed, int threads) {
  McEstimate est;
  if (!surrogate_path.empty()) {
    PCExpansion pce = load_pce(surrogate_path);
    if (!case_path.empty()) {
      CaseDefinition c = load_case(case_path);
      check_surrogate_matches(pce, c, load_commitment(commitment, c));
    }
    est = surrogate_mc(pce, n, seed, threads);
  } else {
    if (case_path.empty()) throw CliError(2, "mc needs --case or --surrogate");
    CaseDefinition c = load_case(case_path);
    CommitmentSchedule x = load_commitment(commitment, c);
    est = mc_expected_cost(c, x, n, seed, threads);
  }
  nlohmann::json j;
  j["mean"] = est.mean;
  if (std::isnan(est.std_error))
    j["std_error"] = nullptr;
  else
    j["std_error"] = est.std_error;
  j["n"] = est.n_samples;
  j["seed"] = est.seed;
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_convergence(const std::string& case_path, const std::string& commitment,
                    const std::string& mc_sizes_arg, const std::string& pce_arg, int n_seeds,
                    long truth_n, const std::string& out_path, int threads) {
  CaseDefinition c = load_case(case_path);
  CommitmentSchedule x = load_commitment(commitment, c);

  std::vector<long> mc_sizes;
  {
    std::istringstream in(mc_sizes_arg);
    std::string tok;
    while (std::getline(in, tok, ',')) mc_sizes.push_back(std::stol(tok));
  }
  std::vector<PceConfig> configs;
  {
    std::istringstream in(pce_arg);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw CliError(2, "--pce entries must be order:level pairs, got " + tok);
      configs.push_back(PceConfig{std::stoi(tok.substr(0, colon)),
                                  std::stoi(tok.substr(colon + 1))});
    }
  }
  if (n_seeds < 1) throw CliError(2, "--seeds must be >= 1");
  std::vector<std::uint64_t> seeds;
  for (int s = 1; s <= n_seeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));

  ConvergenceSeries series = convergence_study(c, x, mc_sizes, configs, seeds, truth_n, threads);
  std::ofstream out(out_path);
  if (!out) throw CliError(2, "cannot write " + out_path);
  out << convergence_csv(series);

  std::cout << "truth (" << series.truth_method << ", n=" << series.truth_n
            << "): " << fmt(series.truth) << "\n";
  std::cout << "mc slope: " << fmt(series.mc_slope);
  if (series.mc_slope_stderr)
    std::cout << " +/- " << fmt(*series.mc_slope_stderr) << " (across seeds)";
  std::cout << "\n";
  if (configs.size() >= 2) std::cout << "pce slope: " << fmt(series.pce_slope) << "\n";
  std::cout << "written: " << out_path << "\n";
  return 0;
}

int cmd_validate(const std::string& surrogate_path, const std::string& case_path,
                 const std::string& commitment, long cv_n, std::uint64_t seed, double tol_l2,
                 double tol_max_rel, int threads) {
  PCExpansion pce = load_pce(surrogate_path);
  CaseDefinition c = load_case(case_path);
  CommitmentSchedule x = load_commitment(commitment, c);
  check_surrogate_matches(pce, c, x);

  SparseGrid grid = smolyak_grid(c.loads.periods(),
                                 pce.meta.grid_level >= 0 ? pce.meta.grid_level : 3);
  NodeCache cache;
  TrainingError train = training_error(pce, c, x, grid, &cache, threads);
  CrossValidation cv = cross_validate(pce, c, x, cv_n, seed, threads);

  bool ok = true;
  auto report = [&](const std::string& name, double value, double tol) {
    const bool pass = value <= tol;
    ok = ok && pass;
    std::cout << name << " = " << fmt(value) << " (tol " << fmt(tol) << ") "
              << (pass ? "PASS" : "FAIL") << "\n";
  };
  report("training_l2", train.unweighted, tol_l2);
  std::cout << "training_l2_weighted = " << fmt(train.weighted) << " (informational)\n";
  report("cv_max_rel", cv.max_rel, tol_max_rel);
  std::cout << "cv_rms_rel = " << fmt(cv.rms_rel) << " (informational, n=" << cv_n << ")\n";
  return ok ? 0 : 1;
}

int cmd_grid(int dim, int level, const std::string& out_path) {
  SparseGrid grid = smolyak_grid(dim, level);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw CliError(2, "cannot write " + out_path);
    out = &file;
  }
  for (int d = 0; d < dim; ++d) *out << "x" << d + 1 << ",";
  *out << "weight\n";
  char buf[40];
  for (int i = 0; i < grid.size(); ++i) {
    for (int d = 0; d < dim; ++d) {
      std::snprintf(buf, sizeof(buf), "%.17g,", grid.point(i)[d]);
      *out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g\n", grid.weights[i]);
    *out << buf;
  }
  if (!out_path.empty()) std::cout << "nodes: " << grid.size() << "\nwritten: " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial-chaos surrogates for stochastic economic dispatch"};
  app.require_subcommand(1);
  int threads = 0;  // 0 -> PCDISPATCH_THREADS or hardware concurrency

  std::string case_path, commitment = "all-on", surrogate_path, demand_spec, out_path;
  int order = 2, level = 3;
  long n = 1000, cv_n = 10000, truth_n = 1000000;
  std::uint64_t seed = 1;
  bool compare = false;
  std::string mc_sizes = "100,1000,10000", pce_configs = "2:3";
  int n_seeds = 20;
  double tol_l2 = 1e-4, tol_max_rel = 5e-3;
  int dim = 2;

  auto* build = app.add_subcommand("build", "project a cost surrogate for one commitment");
  build->add_option("--case", case_path)->required();
  build->add_option("--commitment", commitment, "path to a commitment JSON or 'all-on'");
  build->add_option("--order", order, "total polynomial order");
  build->add_option("--level", level, "sparse grid level");
  build->add_option("--out", out_path)->required();
  build->add_option("--threads", threads);

  auto* eval = app.add_subcommand("eval", "evaluate the cost at one demand vector");
  eval->add_option("--surrogate", surrogate_path);
  eval->add_option("--case", case_path);
  eval->add_option("--commitment", commitment);
  eval->add_option("--demand", demand_spec)->required();
  eval->add_flag("--compare", compare, "print surrogate and direct values");

  auto* mc = app.add_subcommand("mc", "Monte Carlo expected cost");
  mc->add_option("--case", case_path);
  mc->add_option("--commitment", commitment);
  mc->add_option("--surrogate", surrogate_path, "sample the surrogate instead of the model");
  mc->add_option("--n", n)->required();
  mc->add_option("--seed", seed);
  mc->add_option("--threads", threads);

  auto* conv = app.add_subcommand("convergence", "MC vs PCE convergence series");
  conv->add_option("--case", case_path)->required();
  conv->add_option("--commitment", commitment);
  conv->add_option("--mc-sizes", mc_sizes, "comma-separated sample counts");
  conv->add_option("--pce", pce_configs, "comma-separated order:level pairs");
  conv->add_option("--seeds", n_seeds, "number of replicate seeds (1..k)");
  conv->add_option("--truth-n", truth_n, "sample count for the reference value");
  conv->add_option("--out", out_path)->required();
  conv->add_option("--threads", threads);

  auto* validate = app.add_subcommand("validate", "training and cross-validation errors");
  validate->add_option("--surrogate", surrogate_path)->required();
  validate->add_option("--case", case_path)->required();
  validate->add_option("--commitment", commitment);
  validate->add_option("--cv-n", cv_n, "cross-validation sample count");
  validate->add_option("--seed", seed);
  validate->add_option("--tol-l2", tol_l2, "training error threshold");
  validate->add_option("--tol-max-rel", tol_max_rel, "pointwise error threshold");
  validate->add_option("--threads", threads);

  auto* grid = app.add_subcommand("grid", "dump a sparse grid as CSV");
  grid->add_option("--dim", dim)->required();
  grid->add_option("--level", level)->required();
  grid->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    const int workers = pcd::default_threads(threads);
    if (build->parsed())
      return cmd_build(case_path, commitment, order, level, out_path, workers);
    if (eval->parsed())
      return cmd_eval(surrogate_path, case_path, commitment, demand_spec, compare);
    if (mc->parsed()) return cmd_mc(case_path, commitment, surrogate_path, n, seed, workers);
    if (conv->parsed())
      return cmd_convergence(case_path, commitment, mc_sizes, pce_configs, n_seeds, truth_n,
                             out_path, workers);
    if (validate->parsed())
      return cmd_validate(surrogate_path, case_path, commitment, cv_n, seed, tol_l2, tol_max_rel,
                          workers);
    if (grid->parsed()) return cmd_grid(dim, level, out_path);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const OutOfBoxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

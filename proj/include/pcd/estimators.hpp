#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcd/core_model.hpp"
#include "pcd/dispatch.hpp"
#include "pcd/pce.hpp"
#include "pcd/quadrature.hpp"

namespace pcd {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample std dev / sqrt(n); NaN when n < 2
  long n_samples = 0;
  std::uint64_t seed = 0;
};

// n demand vectors, flattened sample-major (sample i, period t at i*T + t).
// Each coordinate is uniform on [d_min[t], d_max[t]], drawn from a
// counter-based generator keyed by (seed, i, t): identical output for any
// platform or parallel split.
std::vector<double> sample_demands(const LoadBox& box, long n, std::uint64_t seed);

// Mean/std-error over a model evaluated at sample_demands draws; the shared
// path under both the dispatch and the surrogate estimators.
McEstimate mc_over_model(const LoadBox& box, long n, std::uint64_t seed,
                         const std::function<double(std::span<const double>)>& model,
                         int threads = 1);

// Monte Carlo estimate of the expected dispatch cost (one ED solve per draw).
McEstimate mc_expected_cost(const CaseDefinition& c, const CommitmentSchedule& x, long n,
                            std::uint64_t seed, int threads = 1);

// Same sample stream, but evaluating the surrogate through the batch kernel.
McEstimate surrogate_mc(const PCExpansion& pce, long n, std::uint64_t seed, int threads = 1);

// Relative L2 discrepancy between model and surrogate at the grid nodes,
// plain (unweighted) residual norms. A |weight|-weighted variant is also
// reported for comparison.
struct TrainingError {
  double unweighted = 0.0;
  double weighted = 0.0;
};
TrainingError training_error(const PCExpansion& pce, const CaseDefinition& c,
                             const CommitmentSchedule& x, const SparseGrid& grid,
                             NodeCache* cache = nullptr, int threads = 1);
double relative_l2_training_error(const PCExpansion& pce, const CaseDefinition& c,
                                  const CommitmentSchedule& x, const SparseGrid& grid,
                                  NodeCache* cache = nullptr, int threads = 1);
// Stub-model variant used to validate the metric itself.
TrainingError training_error_fn(const PCExpansion& pce, const SparseGrid& grid,
                                const std::function<double(std::span<const double>)>& fn);

// Pointwise comparison at n random in-box demands: max and RMS relative
// discrepancy (absolute where |Q| < 1e-9).
struct CrossValidation {
  double max_rel = 0.0;
  double rms_rel = 0.0;
};
CrossValidation cross_validate(const PCExpansion& pce, const CaseDefinition& c,
                               const CommitmentSchedule& x, long n, std::uint64_t seed,
                               int threads = 1);

struct ConvergenceRow {
  std::string method;  // "mc" or "pce"
  long n_evals = 0;
  double estimate = 0.0;
  double rel_error = 0.0;
  std::uint64_t seed = 0;
};

struct PceConfig {
  int order = 2;
  int level = 3;
};

struct ConvergenceSeries {
  std::vector<ConvergenceRow> rows;  // sorted by n_evals within each method
  double truth = 0.0;
  std::string truth_method;
  long truth_n = 0;
  double mc_slope = 0.0;   // log-log fit over per-size mean errors
  double pce_slope = 0.0;  // NaN when fewer than 2 points
  std::optional<double> mc_slope_stderr;  // across-seed spread, >= 2 seeds
};

// Convergence comparison behind the efficiency claim: MC estimates at the
// given sizes across seeds vs. PCE means at the given (order, level)
// configurations, all against a truth_n-sample direct MC reference (or an
// externally supplied truth value).
ConvergenceSeries convergence_study(const CaseDefinition& c, const CommitmentSchedule& x,
                                    const std::vector<long>& mc_sizes,
                                    const std::vector<PceConfig>& pce_configs,
                                    const std::vector<std::uint64_t>& seeds, long truth_n,
                                    int threads = 1,
                                    std::optional<double> truth_override = std::nullopt);

std::string convergence_csv(const ConvergenceSeries& series);

}  // namespace pcd

#include "pcd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "pcd/parallel.hpp"
#include "pcd/rng.hpp"

namespace pcd {

namespace {

constexpr std::uint64_t kTruthSeed = 0x7275747468ULL;  // reference-run stream

McEstimate summarize(std::vector<double>& values, std::uint64_t seed) {
  McEstimate est;
  est.n_samples = static_cast<long>(values.size());
  est.seed = seed;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  double ss = 0.0;
  for (double v : values) {
    const double d = v - est.mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(values.size() - 1);
  est.std_error = std::sqrt(var / static_cast<double>(values.size()));
  return est;
}

// Surrogate values at the grid nodes (already germ-space points): transpose
// to the kernels' SoA layout and run the selected batch kernel.
void eval_batch_point_major(const PCExpansion& pce, const SparseGrid& grid,
                            std::vector<double>& out) {
  const int T = grid.dim;
  const std::size_t N = static_cast<std::size_t>(grid.size());
  std::vector<double> xi(static_cast<std::size_t>(T) * N);
  for (std::size_t i = 0; i < N; ++i)
    for (int t = 0; t < T; ++t)
      xi[static_cast<std::size_t>(t) * N + i] = grid.nodes[i * T + t];
  const auto eval_batch = kernels::select_eval_batch();
  eval_batch(pce.plan, xi.data(), N, N, out.data());
}

}  // namespace

std::vector<double> sample_demands(const LoadBox& box, long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const int T = box.periods();
  std::vector<double> out(static_cast<std::size_t>(n) * T);
  for (long i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      const double u = uniform01(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(t));
      out[static_cast<std::size_t>(i) * T + t] = box.d_min[t] + u * (box.d_max[t] - box.d_min[t]);
    }
  }
  return out;
}

McEstimate mc_over_model(const LoadBox& box, long n, std::uint64_t seed,
                         const std::function<double(std::span<const double>)>& model,
                         int threads) {
  const int T = box.periods();
  const std::vector<double> demands = sample_demands(box, n, seed);
  std::vector<double> values(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    values[i] = model({demands.data() + i * T, static_cast<std::size_t>(T)});
  });
  return summarize(values, seed);
}

McEstimate mc_expected_cost(const CaseDefinition& c, const CommitmentSchedule& x, long n,
                            std::uint64_t seed, int threads) {
  const int T = c.loads.periods();
  const std::vector<double> demands = sample_demands(c.loads, n, seed);
  std::vector<double> values(n);
  const int nthreads = std::max(1, threads);
  std::vector<EdEvaluator> evals;
  evals.reserve(nthreads);
  for (int w = 0; w < nthreads; ++w) evals.emplace_back(c, x);
  parallel_for_workers(static_cast<std::size_t>(n), nthreads,
                       [&](std::size_t worker, std::size_t i) {
                         values[i] = evals[worker].evaluate(
                             {demands.data() + i * T, static_cast<std::size_t>(T)});
                       });
  return summarize(values, seed);
}

McEstimate surrogate_mc(const PCExpansion& pce, long n, std::uint64_t seed, int threads) {
  const int T = pce.box.periods();
  const std::vector<double> demands = sample_demands(pce.box, n, seed);
  std::vector<double> values(n);
  const auto eval_batch = kernels::select_eval_batch();

  // transpose demand blocks to xi in SoA layout, then run the batch kernel
  constexpr std::size_t kBlock = 8192;
  const std::size_t total = static_cast<std::size_t>(n);
  const std::size_t nblocks = (total + kBlock - 1) / kBlock;
  parallel_for(nblocks, threads, [&](std::size_t blk) {
    const std::size_t begin = blk * kBlock;
    const std::size_t count = std::min(kBlock, total - begin);
    std::vector<double> xi(static_cast<std::size_t>(T) * count);
    for (std::size_t i = 0; i < count; ++i) {
      const double* d = demands.data() + (begin + i) * T;
      for (int t = 0; t < T; ++t) {
        const double lo = pce.box.d_min[t], hi = pce.box.d_max[t];
        const double range = hi - lo;
        // same transform (including the clamp) as xi_from_demand
        xi[static_cast<std::size_t>(t) * count + i] =
            range > 0.0 ? std::clamp((2.0 * d[t] - (hi + lo)) / range, -1.0, 1.0) : 0.0;
      }
    }
    eval_batch(pce.plan, xi.data(), count, count, values.data() + begin);
  });
  return summarize(values, seed);
}

TrainingError training_error_fn(const PCExpansion& pce, const SparseGrid& grid,
                                const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> values(grid.size());
  for (int i = 0; i < grid.size(); ++i) values[i] = fn(grid.point(i));
  std::vector<double> approx(grid.size());
  eval_batch_point_major(pce, grid, approx);
  TrainingError err;
  double num = 0.0, den = 0.0, wnum = 0.0, wden = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double d = values[i] - approx[i];
    num += d * d;
    den += values[i] * values[i];
    const double aw = std::abs(grid.weights[i]);
    wnum += aw * d * d;
    wden += aw * values[i] * values[i];
  }
  err.unweighted = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  err.weighted = wden > 0.0 ? std::sqrt(wnum / wden) : std::sqrt(wnum);
  return err;
}

TrainingError training_error(const PCExpansion& pce, const CaseDefinition& c,
                             const CommitmentSchedule& x, const SparseGrid& grid,
                             NodeCache* cache, int threads) {
  // model values at the training nodes, reusing cached ED solves
  std::vector<double> values(grid.size());
  std::vector<int> missing;
  if (cache) {
    for (int i = 0; i < grid.size(); ++i) {
      auto key = grid.key(i);
      auto it = cache->values.find(std::vector<NodeKey>(key.begin(), key.end()));
      if (it != cache->values.end())
        values[i] = it->second;
      else
        missing.push_back(i);
    }
  } else {
    missing.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) missing[i] = i;
  }
  if (!missing.empty()) {
    const int nthreads = std::max(1, threads);
    std::vector<EdEvaluator> evals;
    evals.reserve(nthreads);
    for (int w = 0; w < nthreads; ++w) evals.emplace_back(c, x);
    parallel_for_workers(missing.size(), nthreads, [&](std::size_t worker, std::size_t j) {
      const int i = missing[j];
      values[i] = evals[worker].evaluate(demand_from_xi(c.loads, grid.point(i)));
    });
    if (cache)
      for (int i : missing) {
        auto key = grid.key(i);
        cache->values[std::vector<NodeKey>(key.begin(), key.end())] = values[i];
      }
  }

  std::vector<double> approx(grid.size());
  eval_batch_point_major(pce, grid, approx);
  TrainingError err;
  double num = 0.0, den = 0.0, wnum = 0.0, wden = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double d = values[i] - approx[i];
    num += d * d;
    den += values[i] * values[i];
    const double aw = std::abs(grid.weights[i]);
    wnum += aw * d * d;
    wden += aw * values[i] * values[i];
  }
  err.unweighted = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  err.weighted = wden > 0.0 ? std::sqrt(wnum / wden) : std::sqrt(wnum);
  return err;
}

double relative_l2_training_error(const PCExpansion& pce, const CaseDefinition& c,
                                  const CommitmentSchedule& x, const SparseGrid& grid,
                                  NodeCache* cache, int threads) {
  return training_error(pce, c, x, grid, cache, threads).unweighted;
}

CrossValidation cross_validate(const PCExpansion& pce, const CaseDefinition& c,
                               const CommitmentSchedule& x, long n, std::uint64_t seed,
                               int threads) {
  const int T = c.loads.periods();
  const std::vector<double> demands = sample_demands(c.loads, n, seed);
  std::vector<double> truth(n), approx(n);
  const int nthreads = std::max(1, threads);
  std::vector<EdEvaluator> evals;
  evals.reserve(nthreads);
  for (int w = 0; w < nthreads; ++w) evals.emplace_back(c, x);
  parallel_for_workers(static_cast<std::size_t>(n), nthreads,
                       [&](std::size_t worker, std::size_t i) {
                         std::span<const double> d{demands.data() + i * T,
                                                   static_cast<std::size_t>(T)};
                         truth[i] = evals[worker].evaluate(d);
                         approx[i] = surrogate_eval(pce, d);
                       });
  CrossValidation cv;
  double ss = 0.0;
  for (long i = 0; i < n; ++i) {
    const double diff = std::abs(truth[i] - approx[i]);
    const double rel = std::abs(truth[i]) < 1e-9 ? diff : diff / std::abs(truth[i]);
    cv.max_rel = std::max(cv.max_rel, rel);
    ss += rel * rel;
  }
  cv.rms_rel = std::sqrt(ss / static_cast<double>(n));
  return cv;
}

namespace {

// least-squares slope of log10(err) against log10(n)
double loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& [x, y] : pts) {
    if (!(x > 0.0) || !(y > 0.0)) continue;
    const double lx = std::log10(x), ly = std::log10(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

ConvergenceSeries convergence_study(const CaseDefinition& c, const CommitmentSchedule& x,
                                    const std::vector<long>& mc_sizes,
                                    const std::vector<PceConfig>& pce_configs,
                                    const std::vector<std::uint64_t>& seeds, long truth_n,
                                    int threads, std::optional<double> truth_override) {
  ConvergenceSeries series;

  if (c.loads.degenerate()) {
    // no uncertainty: every estimator equals the nominal dispatch cost
    EdEvaluator ev(c, x);
    const double q = ev.evaluate(c.loads.nominal);
    series.truth = q;
    series.truth_method = "degenerate";
    series.truth_n = 1;
    for (long n : mc_sizes) {
      (void)n;
      series.rows.push_back({"mc", 1, q, 0.0, seeds.empty() ? 0 : seeds.front()});
    }
    for (const auto& cfg : pce_configs) {
      (void)cfg;
      series.rows.push_back({"pce", 1, q, 0.0, 0});
    }
    series.mc_slope = std::numeric_limits<double>::quiet_NaN();
    series.pce_slope = std::numeric_limits<double>::quiet_NaN();
    return series;
  }

  if (truth_override) {
    series.truth = *truth_override;
    series.truth_method = "override";
    series.truth_n = 0;
  } else {
    McEstimate ref = mc_expected_cost(c, x, truth_n, kTruthSeed, threads);
    series.truth = ref.mean;
    series.truth_method = "direct-mc";
    series.truth_n = truth_n;
  }
  const double denom = std::abs(series.truth);

  std::vector<std::pair<double, double>> mc_points;
  std::vector<double> per_seed_slope_data;
  std::vector<std::vector<double>> seed_errors(seeds.size());
  for (long n : mc_sizes) {
    double mean_err = 0.0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      McEstimate est = mc_expected_cost(c, x, n, seeds[s], threads);
      const double rel = std::abs(est.mean - series.truth) / denom;
      series.rows.push_back({"mc", n, est.mean, rel, seeds[s]});
      mean_err += rel;
      seed_errors[s].push_back(rel);
    }
    mean_err /= static_cast<double>(seeds.size());
    mc_points.emplace_back(static_cast<double>(n), mean_err);
  }
  series.mc_slope = loglog_slope(mc_points);
  if (seeds.size() >= 2) {
    // spread of single-seed slopes around the fit
    std::vector<double> slopes;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < mc_sizes.size(); ++k)
        pts.emplace_back(static_cast<double>(mc_sizes[k]), seed_errors[s][k]);
      const double sl = loglog_slope(pts);
      if (std::isfinite(sl)) slopes.push_back(sl);
    }
    if (slopes.size() >= 2) {
      double mean = 0.0;
      for (double v : slopes) mean += v;
      mean /= static_cast<double>(slopes.size());
      double ss = 0.0;
      for (double v : slopes) ss += (v - mean) * (v - mean);
      series.mc_slope_stderr =
          std::sqrt(ss / static_cast<double>(slopes.size() - 1) /
                    static_cast<double>(slopes.size()));
    }
  }

  NodeCache cache;
  std::vector<std::pair<double, double>> pce_points;
  for (const auto& cfg : pce_configs) {
    SparseGrid grid = smolyak_grid(c.loads.periods(), cfg.level);
    MultiIndexSet idx = total_degree_indices(c.loads.periods(), cfg.order);
    PCExpansion pce = project(c, x, idx, grid, &cache, threads);
    const double mean = pce_mean(pce);
    const double rel = std::abs(mean - series.truth) / denom;
    series.rows.push_back({"pce", grid.size(), mean, rel, 0});
    pce_points.emplace_back(static_cast<double>(grid.size()), rel);
  }
  series.pce_slope = loglog_slope(pce_points);
  return series;
}

std::string convergence_csv(const ConvergenceSeries& series) {
  std::string out = "method,n_evals,estimate,rel_error,seed\n";
  char buf[128];
  for (const auto& row : series.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%ld,%.17g,%.17g,%llu\n", row.method.c_str(), row.n_evals,
                  row.estimate, row.rel_error, static_cast<unsigned long long>(row.seed));
    out += buf;
  }
  return out;
}

}  // namespace pcd

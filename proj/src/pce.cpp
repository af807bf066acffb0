#include "pcd/pce.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pcd/parallel.hpp"

namespace pcd {

namespace {

std::uint64_t binom_checked(int n, int k, std::size_t cap) {
  // (n choose k) with overflow guard against the cap
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
    if (r > 16 * cap) return r;  // already far past any usable size
  }
  return r;
}

}  // namespace

MultiIndexSet total_degree_indices(int n, int p, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (p < 0) throw std::invalid_argument("order must be >= 0");
  const std::uint64_t count = binom_checked(n + p, p, cap);
  if (count > cap)
    throw ResourceError("multi-index set of " + std::to_string(count) +
                        " terms exceeds the cap of " + std::to_string(cap));

  MultiIndexSet set;
  set.n = n;
  set.p = p;
  set.indices.reserve(static_cast<std::size_t>(count) * n);

  std::vector<int> idx(n, 0);
  // within one total degree, leading positions take the largest remainder first
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == n - 1) {
      idx[pos] = remaining;
      set.indices.insert(set.indices.end(), idx.begin(), idx.end());
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      idx[pos] = v;
      rec(pos + 1, remaining - v);
    }
  };
  for (int d = 0; d <= p; ++d) rec(0, d);
  return set;
}

double legendre_eval(int degree, double xi) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  if (std::abs(xi) > 1.0 + 1e-12)
    throw std::domain_error("Legendre argument outside [-1, 1]");
  if (degree == 0) return 1.0;
  double prev = 1.0, cur = xi;
  for (int j = 2; j <= degree; ++j) {
    const double a = (2.0 * j - 1.0) / j;
    const double b = (j - 1.0) / j;
    const double next = a * (xi * cur) - b * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double basis_eval(std::span<const int> idx, std::span<const double> xi) {
  if (idx.size() != xi.size()) throw std::invalid_argument("index/point dimension mismatch");
  double v = 1.0;
  for (std::size_t d = 0; d < idx.size(); ++d)
    if (idx[d] > 0) v *= legendre_eval(idx[d], xi[d]);
  return v;
}

double basis_norm_sq(std::span<const int> idx) {
  double v = 1.0;
  for (int d : idx) v *= 1.0 / (2.0 * d + 1.0);
  return v;
}

std::vector<double> xi_from_demand(const LoadBox& box, std::span<const double> demand) {
  const int T = box.periods();
  if (static_cast<int>(demand.size()) != T)
    throw std::invalid_argument("demand vector length does not match the box");
  std::vector<double> xi(T);
  for (int t = 0; t < T; ++t) {
    const double lo = box.d_min[t], hi = box.d_max[t];
    const double range = hi - lo;
    const double slack = 1e-9 * std::max(1.0, std::abs(hi));
    if (demand[t] < lo - slack || demand[t] > hi + slack)
      throw OutOfBoxError("demand " + std::to_string(demand[t]) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "] in period " +
                          std::to_string(t + 1));
    if (range <= 0.0) {
      xi[t] = 0.0;
    } else {
      double v = (2.0 * demand[t] - (hi + lo)) / range;
      xi[t] = std::clamp(v, -1.0, 1.0);
    }
  }
  return xi;
}

std::vector<double> demand_from_xi(const LoadBox& box, std::span<const double> xi) {
  const int T = box.periods();
  if (static_cast<int>(xi.size()) != T)
    throw std::invalid_argument("point dimension does not match the box");
  std::vector<double> d(T);
  for (int t = 0; t < T; ++t) {
    if (std::abs(xi[t]) > 1.0 + 1e-12)
      throw std::domain_error("germ coordinate outside [-1, 1] in period " +
                              std::to_string(t + 1));
    d[t] = 0.5 * (box.d_max[t] - box.d_min[t]) * xi[t] + 0.5 * (box.d_max[t] + box.d_min[t]);
  }
  return d;
}

void PCExpansion::finalize() {
  plan = kernels::make_plan(index_set.n, index_set.indices, coefficients);
}

namespace {

// Coefficients from precomputed node values; reduction in node order.
void accumulate_coefficients(PCExpansion& pce, const MultiIndexSet& set, const SparseGrid& grid,
                             std::span<const double> values) {
  const std::size_t P1 = set.size();
  pce.coefficients.assign(P1, 0.0);
  const int max_deg = set.p;
  std::vector<double> psi(static_cast<std::size_t>(grid.dim) * (max_deg + 1));
  for (int i = 0; i < grid.size(); ++i) {
    const auto point = grid.point(i);
    for (int d = 0; d < grid.dim; ++d) {
      double* col = psi.data() + static_cast<std::size_t>(d) * (max_deg + 1);
      col[0] = 1.0;
      if (max_deg >= 1) col[1] = point[d];
      for (int j = 2; j <= max_deg; ++j) {
        const double a = (2.0 * j - 1.0) / j;
        const double b = (j - 1.0) / j;
        col[j] = a * (point[d] * col[j - 1]) - b * col[j - 2];
      }
    }
    const double wq = grid.weights[i] * values[i];
    for (std::size_t k = 0; k < P1; ++k) {
      double basis = 1.0;
      const auto idx = set.at(k);
      for (int d = 0; d < grid.dim; ++d)
        if (idx[d] > 0) basis *= psi[static_cast<std::size_t>(d) * (max_deg + 1) + idx[d]];
      pce.coefficients[k] += wq * basis;
    }
  }
  for (std::size_t k = 0; k < P1; ++k) pce.coefficients[k] /= basis_norm_sq(set.at(k));
}

}  // namespace

PCExpansion project_function(const MultiIndexSet& index_set, const SparseGrid& grid,
                             const std::function<double(std::span<const double>)>& fn,
                             int threads) {
  if (grid.dim != index_set.n)
    throw std::invalid_argument("grid dimension does not match the index set");
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    values[i] = fn(grid.point(static_cast<int>(i)));
  });

  PCExpansion pce;
  pce.index_set = index_set;
  // unit box: the germ domain itself, so surrogate_eval maps points 1:1
  pce.box.nominal.assign(index_set.n, 0.0);
  pce.box.d_min.assign(index_set.n, -1.0);
  pce.box.d_max.assign(index_set.n, 1.0);
  pce.meta.grid_level = grid.level;
  pce.meta.n_nodes = grid.size();
  pce.meta.exactness_warning = 2 * index_set.p > grid.exactness_degree();
  accumulate_coefficients(pce, index_set, grid, values);
  pce.finalize();
  return pce;
}

PCExpansion project(const CaseDefinition& c, const CommitmentSchedule& x,
                    const MultiIndexSet& index_set, const SparseGrid& grid, NodeCache* cache,
                    int threads) {
  if (grid.dim != c.loads.periods())
    throw std::invalid_argument("grid dimension does not match the case horizon");
  if (grid.dim != index_set.n)
    throw std::invalid_argument("grid dimension does not match the index set");

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

  {
    // one evaluator per worker; solves are independent
    const int nthreads = std::max(1, threads);
    std::vector<EdEvaluator> evals;
    evals.reserve(nthreads);
    for (int w = 0; w < nthreads; ++w) evals.emplace_back(c, x);
    parallel_for_workers(missing.size(), nthreads, [&](std::size_t worker, std::size_t j) {
      const int i = missing[j];
      values[i] = evals[worker].evaluate(demand_from_xi(c.loads, grid.point(i)));
    });
  }
  if (cache) {
    for (int i : missing) {
      auto key = grid.key(i);
      cache->values[std::vector<NodeKey>(key.begin(), key.end())] = values[i];
    }
  }

  PCExpansion pce;
  pce.index_set = index_set;
  pce.box = c.loads;
  pce.meta.grid_level = grid.level;
  pce.meta.n_nodes = grid.size();
  pce.meta.case_hash = c.hash();
  pce.meta.commitment = x.row_strings();
  pce.meta.exactness_warning = 2 * index_set.p > grid.exactness_degree();
  accumulate_coefficients(pce, index_set, grid, values);
  pce.finalize();
  return pce;
}

double surrogate_eval(const PCExpansion& pce, std::span<const double> demand) {
  const std::vector<double> xi = xi_from_demand(pce.box, demand);
  return kernels::eval_point(pce.plan, xi.data());
}

double pce_mean(const PCExpansion& pce) { return pce.coefficients.at(0); }

double pce_variance(const PCExpansion& pce) {
  double var = 0.0;
  for (std::size_t k = 1; k < pce.coefficients.size(); ++k)
    var += pce.coefficients[k] * pce.coefficients[k] * basis_norm_sq(pce.index_set.at(k));
  return var;
}

nlohmann::json pce_to_json(const PCExpansion& pce) {
  nlohmann::json j;
  j["n"] = pce.index_set.n;
  j["p"] = pce.index_set.p;
  nlohmann::json idx = nlohmann::json::array();
  for (std::size_t k = 0; k < pce.index_set.size(); ++k) {
    const auto row = pce.index_set.at(k);
    idx.push_back(std::vector<int>(row.begin(), row.end()));
  }
  j["indices"] = std::move(idx);
  j["coefficients"] = pce.coefficients;
  j["box"]["periods"] = pce.box.periods();
  j["box"]["nominal"] = pce.box.nominal;
  j["box"]["d_min"] = pce.box.d_min;
  j["box"]["d_max"] = pce.box.d_max;
  char hash_hex[24];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(pce.meta.case_hash));
  j["meta"]["grid_level"] = pce.meta.grid_level;
  j["meta"]["n_nodes"] = pce.meta.n_nodes;
  j["meta"]["case_hash"] = hash_hex;
  j["meta"]["commitment"] = pce.meta.commitment;
  j["meta"]["exactness_warning"] = pce.meta.exactness_warning;
  return j;
}

PCExpansion pce_from_json(const nlohmann::json& j) {
  PCExpansion pce;
  const int n = j.at("n").get<int>();
  const int p = j.at("p").get<int>();
  pce.index_set = total_degree_indices(n, p);
  // the stored indices must be exactly the canonical graded-lex set
  const auto& idx = j.at("indices");
  if (idx.size() != pce.index_set.size())
    throw ParseError("surrogate file has an unexpected index count");
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto row = pce.index_set.at(k);
    const auto& stored = idx.at(k);
    for (int d = 0; d < n; ++d)
      if (stored.at(d).get<int>() != row[d])
        throw ParseError("surrogate file index set is not in canonical order");
  }
  pce.coefficients = j.at("coefficients").get<std::vector<double>>();
  if (pce.coefficients.size() != pce.index_set.size())
    throw ParseError("surrogate file coefficient count mismatch");
  pce.box.nominal = j.at("box").at("nominal").get<std::vector<double>>();
  pce.box.d_min = j.at("box").at("d_min").get<std::vector<double>>();
  pce.box.d_max = j.at("box").at("d_max").get<std::vector<double>>();
  if (pce.box.periods() != n) throw ParseError("surrogate box does not match its dimension");
  const auto& meta = j.at("meta");
  pce.meta.grid_level = meta.at("grid_level").get<int>();
  pce.meta.n_nodes = meta.at("n_nodes").get<int>();
  pce.meta.case_hash = std::stoull(meta.at("case_hash").get<std::string>(), nullptr, 16);
  pce.meta.commitment = meta.at("commitment").get<std::vector<std::string>>();
  pce.meta.exactness_warning = meta.value("exactness_warning", false);
  pce.finalize();
  return pce;
}

void save_pce(const PCExpansion& pce, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write surrogate file: " + path);
  out << pce_to_json(pce).dump(2) << '\n';
}

PCExpansion load_pce(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("surrogate file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed surrogate file " + path + ": " + e.what());
  }
  try {
    return pce_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed surrogate file " + path + ": " + e.what());
  }
}

}  // namespace pcd

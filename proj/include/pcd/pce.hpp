#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcd/core_model.hpp"
#include "pcd/dispatch.hpp"
#include "pcd/kernels/surrogate_kernels.hpp"
#include "pcd/quadrature.hpp"

namespace pcd {

// A demand (or evaluation point) outside the load box / germ domain.
class OutOfBoxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All multi-indices of total degree <= p in n variables, graded
// lexicographic: ascending total degree, higher leading entries first
// within a degree. Index 0 is the zero tuple.
struct MultiIndexSet {
  int n = 0;
  int p = 0;
  std::vector<int> indices;  // row-major, n entries per index

  std::size_t size() const { return indices.size() / static_cast<std::size_t>(n); }
  std::span<const int> at(std::size_t k) const {
    return {indices.data() + k * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
  int total_degree(std::size_t k) const {
    int s = 0;
    for (int v : at(k)) s += v;
    return s;
  }
};

MultiIndexSet total_degree_indices(int n, int p, std::size_t cap = 1000000);

// Standard (unnormalized) Legendre polynomial, psi_j(1) = 1.
double legendre_eval(int degree, double xi);
// Product of univariate Legendre values.
double basis_eval(std::span<const int> idx, std::span<const double> xi);
// Mean square of the basis under the uniform density: prod 1/(2*idx_i + 1).
double basis_norm_sq(std::span<const int> idx);

// Affine maps between demand space and the germ domain [-1, 1]^T.
// Degenerate periods (d_min == d_max) map to 0.
std::vector<double> xi_from_demand(const LoadBox& box, std::span<const double> demand);
std::vector<double> demand_from_xi(const LoadBox& box, std::span<const double> xi);

// Polynomial-chaos surrogate of the dispatch cost for one commitment.
struct PCExpansion {
  MultiIndexSet index_set;
  std::vector<double> coefficients;
  LoadBox box;
  struct Meta {
    int grid_level = -1;
    int n_nodes = 0;
    std::uint64_t case_hash = 0;
    std::vector<std::string> commitment;  // one 0/1 string per generator
    bool exactness_warning = false;       // projection degree exceeds grid exactness
  } meta;

  kernels::SurrogatePlan plan;  // derived, rebuilt on load

  void finalize();  // rebuilds plan from indices/coefficients
};

// Galerkin projection of an arbitrary function on the germ domain; the
// coefficient reduction runs in fixed node order.
PCExpansion project_function(const MultiIndexSet& index_set, const SparseGrid& grid,
                             const std::function<double(std::span<const double>)>& fn,
                             int threads = 1);

// Projection of the dispatch cost: one ED solve per grid node, cached by
// canonical node identity so nested refinements reuse prior solves.
PCExpansion project(const CaseDefinition& c, const CommitmentSchedule& x,
                    const MultiIndexSet& index_set, const SparseGrid& grid,
                    NodeCache* cache = nullptr, int threads = 1);

double surrogate_eval(const PCExpansion& pce, std::span<const double> demand);
double pce_mean(const PCExpansion& pce);      // c_0
double pce_variance(const PCExpansion& pce);  // sum_{k>=1} c_k^2 <Psi_k^2>

nlohmann::json pce_to_json(const PCExpansion& pce);
PCExpansion pce_from_json(const nlohmann::json& j);
void save_pce(const PCExpansion& pce, const std::string& path);
PCExpansion load_pce(const std::string& path);

}  // namespace pcd

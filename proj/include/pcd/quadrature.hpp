#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcd {

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One-dimensional nested Clenshaw-Curtis rule on [-1, 1], probability
// normalized (the weights integrate the uniform density, so they sum to 1).
// Node counts: 1 at level 0, 2^l + 1 at level l >= 1.
struct QuadratureRule1D {
  int level = 0;
  std::vector<double> nodes;    // ascending, exact -1/0/+1 endpoints
  std::vector<double> weights;
};

QuadratureRule1D clenshaw_curtis(int level);

// Canonical identity of a Clenshaw-Curtis abscissa: x = cos(pi * num / den)
// with num/den in lowest terms and den a power of two. Nodes shared between
// nesting levels reduce to the same key, so dedup and cached model
// evaluations use exact comparisons, never floating-point tolerances.
struct NodeKey {
  std::int32_t num = 1;
  std::int32_t den = 2;  // num/den = 1/2 -> x = 0

  // ordered by ascending x, i.e. descending angle fraction num/den;
  // exact integer comparison, fractions are in lowest terms
  friend std::strong_ordering operator<=>(const NodeKey& a, const NodeKey& b) {
    const std::int64_t fa = static_cast<std::int64_t>(a.num) * b.den;
    const std::int64_t fb = static_cast<std::int64_t>(b.num) * a.den;
    if (fa > fb) return std::strong_ordering::less;
    if (fa < fb) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend bool operator==(const NodeKey& a, const NodeKey& b) {
    return a.num == b.num && a.den == b.den;
  }
};

// x value of a canonical key; bit-identical for the same key at any level.
double node_value(NodeKey k);
// Key of node j (ascending order) of the level-l rule.
NodeKey node_key(int level, int j);

// Smolyak sparse grid on [-1, 1]^dim with combination-weighted tensor
// products of the nested Clenshaw-Curtis rules. Weights may be negative and
// sum to 1. Nodes are stored point-major and sorted by canonical key.
struct SparseGrid {
  int dim = 0;
  int level = 0;
  std::vector<double> nodes;     // size() * dim, point-major
  std::vector<double> weights;   // size()
  std::vector<NodeKey> keys;     // size() * dim, canonical ids

  int size() const { return static_cast<int>(weights.size()); }
  std::span<const double> point(int i) const {
    return {nodes.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const NodeKey> key(int i) const {
    return {keys.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  // Total polynomial degree integrated exactly: 2 * level + 1.
  int exactness_degree() const { return 2 * level + 1; }
};

SparseGrid smolyak_grid(int dim, int level, std::size_t node_cap = 1000000);

// Weighted sum of f over the grid, accumulated in node order. Errors thrown
// by f are annotated with the offending node.
double integrate(const SparseGrid& grid,
                 const std::function<double(std::span<const double>)>& f);

// Cache of model evaluations keyed by canonical node identity; nested grid
// refinements reuse values computed at coarser levels.
struct NodeCache {
  std::map<std::vector<NodeKey>, double> values;
};

}  // namespace pcd

#include "pcd/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

namespace pcd {

namespace {

int rule_size(int level) { return level == 0 ? 1 : (1 << level) + 1; }

// Classical Clenshaw-Curtis weights for m = N + 1 nodes (Lebesgue measure,
// summing to 2), computed for the descending cos(j*pi/N) ordering.
std::vector<double> cc_weights_lebesgue(int N) {
  std::vector<double> w(N + 1, 0.0);
  const int half = N / 2;
  for (int j = 0; j <= half; ++j) {
    double sum = 0.0;
    for (int k = 1; k <= half; ++k) {
      const double b = (2 * k == N) ? 1.0 : 2.0;
      sum += b / (4.0 * k * k - 1.0) *
             std::cos(2.0 * k * j * std::numbers::pi / N);
    }
    const double cj = (j == 0 || j == N) ? 1.0 : 2.0;
    w[j] = cj / N * (1.0 - sum);
    w[N - j] = w[j];  // symmetric by construction
  }
  return w;
}

}  // namespace

double node_value(NodeKey k) {
  if (k.den == 1) return k.num == 0 ? 1.0 : -1.0;
  if (k.den == 2) return 0.0;
  return std::cos(std::numbers::pi * static_cast<double>(k.num) /
                  static_cast<double>(k.den));
}

NodeKey node_key(int level, int j) {
  if (level == 0) return NodeKey{1, 2};  // the midpoint
  const int N = 1 << level;
  int num = N - j;  // ascending node order corresponds to descending angle
  int den = N;
  while (num % 2 == 0 && den > 1) {
    num /= 2;
    den /= 2;
  }
  return NodeKey{num, den};
}

QuadratureRule1D clenshaw_curtis(int level) {
  if (level < 0) throw std::invalid_argument("quadrature level must be >= 0");
  QuadratureRule1D rule;
  rule.level = level;
  const int m = rule_size(level);
  rule.nodes.resize(m);
  rule.weights.resize(m);
  if (level == 0) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 1.0;
    return rule;
  }
  const int N = m - 1;
  const std::vector<double> w = cc_weights_lebesgue(N);
  for (int j = 0; j < m; ++j) {
    rule.nodes[j] = node_value(node_key(level, j));
    rule.weights[j] = 0.5 * w[N - j];  // probability normalization, ascending order
  }
  return rule;
}

namespace {

std::int64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void enumerate_level_vectors(int dim, int lo, int hi,
                             const std::function<void(std::span<const int>)>& visit) {
  std::vector<int> levels(dim, 0);
  // all vectors with lo <= sum <= hi
  std::function<void(int, int)> rec = [&](int pos, int sum) {
    if (pos == dim) {
      if (sum >= lo) visit(levels);
      return;
    }
    for (int l = 0; sum + l <= hi; ++l) {
      levels[pos] = l;
      rec(pos + 1, sum + l);
    }
  };
  rec(0, 0);
}

}  // namespace

SparseGrid smolyak_grid(int dim, int level, std::size_t node_cap) {
  if (dim < 1) throw std::invalid_argument("grid dimension must be >= 1");
  if (level < 0) throw std::invalid_argument("grid level must be >= 0");

  std::vector<QuadratureRule1D> rules;
  for (int l = 0; l <= level; ++l) rules.push_back(clenshaw_curtis(l));

  const int lo = std::max(0, level - dim + 1);
  std::map<std::vector<NodeKey>, double> merged;

  std::vector<NodeKey> key(dim);
  std::vector<int> pos(dim);
  enumerate_level_vectors(dim, lo, level, [&](std::span<const int> levels) {
    int sum = 0;
    for (int l : levels) sum += l;
    const int deficit = level - sum;
    const double coeff = ((deficit % 2) ? -1.0 : 1.0) *
                         static_cast<double>(binom(dim - 1, deficit));
    // tensor product over the per-dimension rules
    std::fill(pos.begin(), pos.end(), 0);
    while (true) {
      double w = coeff;
      for (int d = 0; d < dim; ++d) {
        const auto& r = rules[levels[d]];
        w *= r.weights[pos[d]];
        key[d] = node_key(levels[d], pos[d]);
      }
      merged[key] += w;
      if (merged.size() > node_cap)
        throw ResourceError("sparse grid would exceed the node cap of " +
                            std::to_string(node_cap));
      int d = 0;
      for (; d < dim; ++d) {
        if (++pos[d] < rule_size(levels[d])) break;
        pos[d] = 0;
      }
      if (d == dim) break;
    }
  });

  SparseGrid grid;
  grid.dim = dim;
  grid.level = level;
  grid.nodes.reserve(merged.size() * dim);
  grid.keys.reserve(merged.size() * dim);
  grid.weights.reserve(merged.size());
  for (const auto& [k, w] : merged) {
    for (int d = 0; d < dim; ++d) {
      grid.keys.push_back(k[d]);
      grid.nodes.push_back(node_value(k[d]));
    }
    grid.weights.push_back(w);
  }
  return grid;
}

double integrate(const SparseGrid& grid,
                 const std::function<double(std::span<const double>)>& f) {
  double acc = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    double v;
    try {
      v = f(grid.point(i));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "integrand failed at node " << i << " (";
      for (int d = 0; d < grid.dim; ++d) msg << (d ? ", " : "") << grid.point(i)[d];
      msg << "): " << e.what();
      throw std::runtime_error(msg.str());
    }
    acc += grid.weights[i] * v;
  }
  return acc;
}

}  // namespace pcd

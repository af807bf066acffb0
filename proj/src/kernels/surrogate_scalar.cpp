#include "pcd/kernels/surrogate_kernels.hpp"

#include <stdexcept>

namespace pcd::kernels {

SurrogatePlan make_plan(int n_dims, std::span<const int> indices_flat,
                        std::span<const double> coeffs) {
  if (n_dims < 1) throw std::invalid_argument("plan needs at least one dimension");
  if (indices_flat.size() != coeffs.size() * static_cast<std::size_t>(n_dims))
    throw std::invalid_argument("index/coefficient size mismatch");
  SurrogatePlan plan;
  plan.n_dims = n_dims;
  plan.coeffs.assign(coeffs.begin(), coeffs.end());
  plan.term_offsets.reserve(coeffs.size() + 1);
  plan.term_offsets.push_back(0);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    for (int d = 0; d < n_dims; ++d) {
      const int deg = indices_flat[k * n_dims + d];
      if (deg < 0) throw std::invalid_argument("negative polynomial degree");
      if (deg == 0) continue;
      plan.term_dims.push_back(d);
      plan.term_degs.push_back(deg);
      if (deg > plan.max_degree) plan.max_degree = deg;
    }
    plan.term_offsets.push_back(static_cast<std::int32_t>(plan.term_dims.size()));
  }
  plan.rec_a.resize(plan.max_degree + 1, 0.0);
  plan.rec_b.resize(plan.max_degree + 1, 0.0);
  for (int j = 2; j <= plan.max_degree; ++j) {
    plan.rec_a[j] = (2.0 * j - 1.0) / j;
    plan.rec_b[j] = (j - 1.0) / j;
  }
  return plan;
}

namespace detail {

// Shared per-point algorithm; the vector kernel mirrors this sequence
// lane for lane.
inline double eval_point_strided(const SurrogatePlan& plan, const double* xi,
                                 std::size_t stride, double* psi) {
  const int K = plan.max_degree + 1;
  for (int d = 0; d < plan.n_dims; ++d) {
    const double x = xi[static_cast<std::size_t>(d) * stride];
    double* col = psi + static_cast<std::size_t>(d) * K;
    col[0] = 1.0;
    if (K > 1) col[1] = x;
    for (int j = 2; j < K; ++j)
      col[j] = plan.rec_a[j] * (x * col[j - 1]) - plan.rec_b[j] * col[j - 2];
  }
  double acc = 0.0;
  const std::size_t nk = plan.coeffs.size();
  for (std::size_t k = 0; k < nk; ++k) {
    double term = plan.coeffs[k];
    for (std::int32_t p = plan.term_offsets[k]; p < plan.term_offsets[k + 1]; ++p)
      term *= psi[static_cast<std::size_t>(plan.term_dims[p]) * K + plan.term_degs[p]];
    acc += term;
  }
  return acc;
}

}  // namespace detail

void eval_batch_scalar(const SurrogatePlan& plan, const double* xi, std::size_t n_points,
                       std::size_t stride, double* out) {
  thread_local std::vector<double> psi;
  psi.resize(static_cast<std::size_t>(plan.n_dims) * (plan.max_degree + 1));
  for (std::size_t i = 0; i < n_points; ++i)
    out[i] = detail::eval_point_strided(plan, xi + i, stride, psi.data());
}

double eval_point(const SurrogatePlan& plan, const double* xi_point) {
  thread_local std::vector<double> psi;
  psi.resize(static_cast<std::size_t>(plan.n_dims) * (plan.max_degree + 1));
  return detail::eval_point_strided(plan, xi_point, 1, psi.data());
}

}  // namespace pcd::kernels

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pcd::kernels {

// Flattened evaluation plan for a tensor-Legendre polynomial expansion:
// out = sum_k coeffs[k] * prod_terms psi_deg(xi_dim). Terms store only the
// nonzero degrees of each multi-index. rec_a/rec_b hold the three-term
// recurrence factors, precomputed once so the scalar and vector kernels run
// the exact same arithmetic.
struct SurrogatePlan {
  int n_dims = 0;
  int max_degree = 0;
  std::vector<double> coeffs;
  std::vector<std::int32_t> term_offsets;  // coeffs.size() + 1 entries
  std::vector<std::int32_t> term_dims;
  std::vector<std::int32_t> term_degs;
  std::vector<double> rec_a;  // psi_j = rec_a[j] * (x * psi_{j-1}) - rec_b[j] * psi_{j-2}
  std::vector<double> rec_b;
};

// indices_flat holds multi-indices row-major, n_dims entries each.
SurrogatePlan make_plan(int n_dims, std::span<const int> indices_flat,
                        std::span<const double> coeffs);

// xi is dimension-major (SoA): coordinate d of point i at xi[d * stride + i].
// Both kernels produce bit-identical results; the AVX2 variant processes
// four points per lane group and uses no FMA so each lane matches the scalar
// operation sequence exactly.
void eval_batch_scalar(const SurrogatePlan& plan, const double* xi, std::size_t n_points,
                       std::size_t stride, double* out);
#if defined(__x86_64__) || defined(_M_X64)
void eval_batch_avx2(const SurrogatePlan& plan, const double* xi, std::size_t n_points,
                     std::size_t stride, double* out);
#endif

// Single point with unit stride.
double eval_point(const SurrogatePlan& plan, const double* xi_point);

using EvalBatchFn = void (*)(const SurrogatePlan&, const double*, std::size_t, std::size_t,
                             double*);

// Picks the widest kernel supported by the running CPU.
EvalBatchFn select_eval_batch();
const char* active_kernel_name();

}  // namespace pcd::kernels

#include "pcd/kernels/surrogate_kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <vector>

namespace pcd::kernels {

// Four points per vector register. Multiplies and adds only (no FMA), in the
// same order as the scalar kernel, so every lane is bit-identical to the
// scalar result for the same point.
void eval_batch_avx2(const SurrogatePlan& plan, const double* xi, std::size_t n_points,
                     std::size_t stride, double* out) {
  const int K = plan.max_degree + 1;
  thread_local std::vector<double> psi_store;  // 4 lanes per (dim, degree) slot
  psi_store.resize(static_cast<std::size_t>(plan.n_dims) * K * 4);
  double* psi = psi_store.data();

  std::size_t i = 0;
  for (; i + 4 <= n_points; i += 4) {
    for (int d = 0; d < plan.n_dims; ++d) {
      const __m256d x = _mm256_loadu_pd(xi + static_cast<std::size_t>(d) * stride + i);
      double* col = psi + static_cast<std::size_t>(d) * K * 4;
      _mm256_storeu_pd(col, _mm256_set1_pd(1.0));
      if (K > 1) _mm256_storeu_pd(col + 4, x);
      for (int j = 2; j < K; ++j) {
        const __m256d a = _mm256_set1_pd(plan.rec_a[j]);
        const __m256d b = _mm256_set1_pd(plan.rec_b[j]);
        const __m256d pj1 = _mm256_loadu_pd(col + static_cast<std::size_t>(j - 1) * 4);
        const __m256d pj2 = _mm256_loadu_pd(col + static_cast<std::size_t>(j - 2) * 4);
        _mm256_storeu_pd(col + static_cast<std::size_t>(j) * 4,
                         _mm256_sub_pd(_mm256_mul_pd(a, _mm256_mul_pd(x, pj1)),
                                       _mm256_mul_pd(b, pj2)));
      }
    }
    __m256d acc = _mm256_setzero_pd();
    const std::size_t nk = plan.coeffs.size();
    for (std::size_t k = 0; k < nk; ++k) {
      __m256d term = _mm256_set1_pd(plan.coeffs[k]);
      for (std::int32_t p = plan.term_offsets[k]; p < plan.term_offsets[k + 1]; ++p) {
        const std::size_t slot =
            (static_cast<std::size_t>(plan.term_dims[p]) * K + plan.term_degs[p]) * 4;
        term = _mm256_mul_pd(term, _mm256_loadu_pd(psi + slot));
      }
      acc = _mm256_add_pd(acc, term);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  // remainder through the scalar kernel (same arithmetic)
  if (i < n_points) eval_batch_scalar(plan, xi + i, n_points - i, stride, out + i);
}

}  // namespace pcd::kernels

#endif  // x86_64

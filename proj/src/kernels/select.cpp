#include "pcd/kernels/surrogate_kernels.hpp"

namespace pcd::kernels {

namespace {

bool avx2_supported() {
#if defined(PCD_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

EvalBatchFn select_eval_batch() {
#if defined(PCD_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  if (avx2_supported()) return &eval_batch_avx2;
#endif
  return &eval_batch_scalar;
}

const char* active_kernel_name() {
#if defined(PCD_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  if (avx2_supported()) return "avx2";
#endif
  return "scalar";
}

}  // namespace pcd::kernels

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "pcd/kernels/surrogate_kernels.hpp"
#include "pcd/pce.hpp"

using namespace pcd;

namespace {

kernels::SurrogatePlan random_plan(std::mt19937_64& rng, int n, int p) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto set = total_degree_indices(n, p);
  std::vector<double> coeffs(set.size());
  for (auto& c : coeffs) c = u(rng);
  return kernels::make_plan(n, set.indices, coeffs);
}

std::vector<double> random_points_soa(std::mt19937_64& rng, int n, std::size_t count) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xi(static_cast<std::size_t>(n) * count);
  for (auto& v : xi) v = u(rng);
  return xi;
}

}  // namespace

TEST_CASE("plan evaluation matches the basis_eval reference") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 5}, {3, 3}, {6, 2}, {24, 2}}) {
    auto set = total_degree_indices(n, p);
    std::vector<double> coeffs(set.size());
    for (auto& c : coeffs) c = u(rng);
    auto plan = kernels::make_plan(n, set.indices, coeffs);
    for (int probe = 0; probe < 20; ++probe) {
      std::vector<double> x(n);
      for (auto& v : x) v = u(rng);
      double want = 0.0;
      for (std::size_t k = 0; k < set.size(); ++k) want += coeffs[k] * basis_eval(set.at(k), x);
      const double got = kernels::eval_point(plan, x.data());
      CHECK(got == doctest::Approx(want).epsilon(1e-12).scale(std::max(1.0, std::abs(want))));
    }
  }
}

TEST_CASE("scalar and vector kernels are bit-identical") {
#if defined(__x86_64__) || defined(_M_X64)
  if (kernels::select_eval_batch() == &kernels::eval_batch_scalar) {
    MESSAGE("AVX2 unavailable on this host; dispatch equivalence is trivial");
    return;
  }
  std::mt19937_64 rng(77);
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 6}, {2, 4}, {6, 2}, {24, 2}, {5, 3}}) {
    auto plan = random_plan(rng, n, p);
    for (std::size_t count : {1ul, 3ul, 4ul, 5ul, 17ul, 1024ul}) {
      auto xi = random_points_soa(rng, n, count);
      std::vector<double> a(count), b(count);
      kernels::eval_batch_scalar(plan, xi.data(), count, count, a.data());
      kernels::eval_batch_avx2(plan, xi.data(), count, count, b.data());
      for (std::size_t i = 0; i < count; ++i) CHECK(a[i] == b[i]);  // exact
    }
  }
#endif
}

TEST_CASE("single-point eval equals batch lane values exactly") {
  std::mt19937_64 rng(78);
  auto plan = random_plan(rng, 6, 3);
  const std::size_t count = 64;
  auto xi = random_points_soa(rng, 6, count);
  std::vector<double> batch(count);
  kernels::select_eval_batch()(plan, xi.data(), count, count, batch.data());
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> point(6);
    for (int d = 0; d < 6; ++d) point[d] = xi[static_cast<std::size_t>(d) * count + i];
    CHECK(kernels::eval_point(plan, point.data()) == batch[i]);
  }
}

TEST_CASE("batch throughput on the 24-dimensional order-2 expansion") {
  std::mt19937_64 rng(5150);
  auto plan = random_plan(rng, 24, 2);
  const std::size_t count = 200000;
  auto xi = random_points_soa(rng, 24, count);
  std::vector<double> out(count);

  auto fn = kernels::select_eval_batch();
  const auto start = std::chrono::steady_clock::now();
  fn(plan, xi.data(), count, count, out.data());
  const auto stop = std::chrono::steady_clock::now();
  const double secs = std::chrono::duration<double>(stop - start).count();
  const double rate = static_cast<double>(count) / secs;
  MESSAGE("kernel ", std::string(kernels::active_kernel_name()), ": ", rate, " evals/s");
  CHECK(rate >= 1e5);  // single-thread floor on commodity hardware
}

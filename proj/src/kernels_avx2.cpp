// Compiled with -mavx2 (and without FMA contraction) only.
#include <immintrin.h>

#include <algorithm>
#include <cstddef>

#include "adlearn/kernels.hpp"

namespace adlearn::kernels::detail {

namespace {

constexpr std::size_t kLanes = 8;

// Copies up to 8 gains into a padded block, repeating the last one.
void load_block(const double* thetas, std::size_t k, std::size_t base, double* block) {
  const std::size_t m = std::min(kLanes, k - base);
  for (std::size_t j = 0; j < kLanes; ++j) block[j] = thetas[base + std::min(j, m - 1)];
}

}  // namespace

void nls_objective_avx2(const double* thetas, std::size_t k, double a_start, const double* y, const double* z,
                        std::size_t n, double* out) {
  alignas(32) double block[kLanes];
  alignas(32) double res[kLanes];
  for (std::size_t base = 0; base < k; base += kLanes) {
    load_block(thetas, k, base, block);
    const __m256d th0 = _mm256_load_pd(block);
    const __m256d th1 = _mm256_load_pd(block + 4);
    __m256d a0 = _mm256_set1_pd(a_start);
    __m256d a1 = a0;
    __m256d q0 = _mm256_setzero_pd();
    __m256d q1 = q0;
    for (std::size_t i = 0; i < n; ++i) {
      const __m256d tt = _mm256_set1_pd(static_cast<double>(i + 1));
      const __m256d zi = _mm256_set1_pd(z[i]);
      const __m256d yi = _mm256_set1_pd(y[i]);
      const __m256d d0 = _mm256_sub_pd(zi, a0);
      const __m256d d1 = _mm256_sub_pd(zi, a1);
      q0 = _mm256_add_pd(q0, _mm256_mul_pd(d0, d0));
      q1 = _mm256_add_pd(q1, _mm256_mul_pd(d1, d1));
      const __m256d g0 = _mm256_div_pd(th0, tt);
      const __m256d g1 = _mm256_div_pd(th1, tt);
      a0 = _mm256_add_pd(a0, _mm256_mul_pd(g0, _mm256_sub_pd(yi, a0)));
      a1 = _mm256_add_pd(a1, _mm256_mul_pd(g1, _mm256_sub_pd(yi, a1)));
    }
    _mm256_store_pd(res, q0);
    _mm256_store_pd(res + 4, q1);
    const std::size_t m = std::min(kLanes, k - base);
    std::copy(res, res + m, out + base);
  }
}

void profile_moments_avx2(const double* thetas, std::size_t k, double alpha, const double* y, std::size_t n,
                          double* sxy, double* sxx) {
  alignas(32) double block[kLanes];
  alignas(32) double rxy[kLanes];
  alignas(32) double rxx[kLanes];
  const __m256d al = _mm256_set1_pd(alpha);
  for (std::size_t base = 0; base < k; base += kLanes) {
    load_block(thetas, k, base, block);
    const __m256d th0 = _mm256_load_pd(block);
    const __m256d th1 = _mm256_load_pd(block + 4);
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = a0;
    __m256d xy0 = a0, xy1 = a0, xx0 = a0, xx1 = a0;
    for (std::size_t i = 0; i < n; ++i) {
      const __m256d tt = _mm256_set1_pd(static_cast<double>(i + 1));
      const __m256d ys = _mm256_sub_pd(_mm256_set1_pd(y[i]), al);
      xy0 = _mm256_add_pd(xy0, _mm256_mul_pd(ys, a0));
      xy1 = _mm256_add_pd(xy1, _mm256_mul_pd(ys, a1));
      xx0 = _mm256_add_pd(xx0, _mm256_mul_pd(a0, a0));
      xx1 = _mm256_add_pd(xx1, _mm256_mul_pd(a1, a1));
      const __m256d g0 = _mm256_div_pd(th0, tt);
      const __m256d g1 = _mm256_div_pd(th1, tt);
      a0 = _mm256_add_pd(a0, _mm256_mul_pd(g0, _mm256_sub_pd(ys, a0)));
      a1 = _mm256_add_pd(a1, _mm256_mul_pd(g1, _mm256_sub_pd(ys, a1)));
    }
    _mm256_store_pd(rxy, xy0);
    _mm256_store_pd(rxy + 4, xy1);
    _mm256_store_pd(rxx, xx0);
    _mm256_store_pd(rxx + 4, xx1);
    const std::size_t m = std::min(kLanes, k - base);
    std::copy(rxy, rxy + m, sxy + base);
    std::copy(rxx, rxx + m, sxx + base);
  }
}

}  // namespace adlearn::kernels::detail

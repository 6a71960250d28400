#include <immintrin.h>

#include <cmath>

#include "fastslow/kernels.hpp"

namespace fastslow::kernels {

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  __m256d vnan = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    vnan = _mm256_or_pd(vnan, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
    vmax = _mm256_max_pd(vmax, d);
  }
  if (_mm256_movemask_pd(vnan) != 0) return std::nan("");
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double m = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return d;
    if (d > m) m = d;
  }
  return m;
}

std::uint64_t count_quadratic_below_avx2(const double* xs, std::size_t nx, const double* ys, std::size_t ny,
                                         double qx, double qy, double level) {
  const __m256d vqx = _mm256_set1_pd(qx);
  std::uint64_t count = 0;
  for (std::size_t j = 0; j < ny; ++j) {
    // Same operation order as the scalar kernel, so the comparison is bit-identical.
    const double rest = level - qy * ys[j] * ys[j];
    const __m256d vrest = _mm256_set1_pd(rest);
    std::size_t i = 0;
    for (; i + 4 <= nx; i += 4) {
      const __m256d x = _mm256_loadu_pd(xs + i);
      const __m256d q = _mm256_mul_pd(_mm256_mul_pd(vqx, x), x);
      const int mask = _mm256_movemask_pd(_mm256_cmp_pd(q, vrest, _CMP_LE_OQ));
      count += static_cast<std::uint64_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    }
    for (; i < nx; ++i) {
      if (qx * xs[i] * xs[i] <= rest) ++count;
    }
  }
  return count;
}

}  // namespace fastslow::kernels

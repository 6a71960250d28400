#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fastslow/kernels.hpp"

namespace fastslow {
namespace kernels {

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return d;
    if (d > m) m = d;
  }
  return m;
}

std::uint64_t count_quadratic_below_scalar(const double* xs, std::size_t nx, const double* ys, std::size_t ny,
                                           double qx, double qy, double level) {
  std::uint64_t count = 0;
  for (std::size_t j = 0; j < ny; ++j) {
    const double rest = level - qy * ys[j] * ys[j];
    for (std::size_t i = 0; i < nx; ++i) {
      if (qx * xs[i] * xs[i] <= rest) ++count;
    }
  }
  return count;
}

}  // namespace kernels

bool avx2_available() {
#if defined(FASTSLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

KernelPath choose_path() {
  if (const char* env = std::getenv("FASTSLOW_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return KernelPath::scalar;
  }
  return avx2_available() ? KernelPath::avx2 : KernelPath::scalar;
}

}  // namespace

KernelPath active_kernel_path() {
  static const KernelPath path = choose_path();
  return path;
}

std::string_view to_string(KernelPath path) { return path == KernelPath::avx2 ? "avx2" : "scalar"; }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: length mismatch");
#if defined(FASTSLOW_HAVE_AVX2)
  if (active_kernel_path() == KernelPath::avx2) return kernels::max_abs_diff_avx2(a.data(), b.data(), a.size());
#endif
  return kernels::max_abs_diff_scalar(a.data(), b.data(), a.size());
}

std::uint64_t count_quadratic_below(std::span<const double> xs, std::span<const double> ys, double qx,
                                    double qy, double level) {
#if defined(FASTSLOW_HAVE_AVX2)
  if (active_kernel_path() == KernelPath::avx2) {
    return kernels::count_quadratic_below_avx2(xs.data(), xs.size(), ys.data(), ys.size(), qx, qy, level);
  }
#endif
  return kernels::count_quadratic_below_scalar(xs.data(), xs.size(), ys.data(), ys.size(), qx, qy, level);
}

}  // namespace fastslow

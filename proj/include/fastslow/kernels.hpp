#pragma once

// Batch kernels with a scalar reference and an AVX2 variant chosen at runtime.
// FASTSLOW_SIMD=scalar forces the reference path.

#include <cstdint>
#include <span>
#include <string_view>

namespace fastslow {

enum class KernelPath { scalar, avx2 };

/// Path used by the dispatching entry points below (decided once per process).
KernelPath active_kernel_path();
std::string_view to_string(KernelPath path);
bool avx2_available();

/// max_i |a_i - b_i|; NaN in either input propagates as NaN.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Number of grid pairs (x_i, y_j) with qx x_i^2 + qy y_j^2 <= level.
std::uint64_t count_quadratic_below(std::span<const double> xs, std::span<const double> ys, double qx,
                                    double qy, double level);

namespace kernels {

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n);
std::uint64_t count_quadratic_below_scalar(const double* xs, std::size_t nx, const double* ys, std::size_t ny,
                                           double qx, double qy, double level);

#if defined(FASTSLOW_HAVE_AVX2)
double max_abs_diff_avx2(const double* a, const double* b, std::size_t n);
std::uint64_t count_quadratic_below_avx2(const double* xs, std::size_t nx, const double* ys, std::size_t ny,
                                         double qx, double qy, double level);
#endif

}  // namespace kernels
}  // namespace fastslow

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fastslow/integrate.hpp"

namespace fastslow {

struct FloorFrac {
  std::int64_t n = 0;  // largest integer <= x
  double r = 0.0;      // x - n, in [0, 1)
};

FloorFrac floor_frac(double x);

/// h_eps(t, s) = eps * floor(t / eps) + eps * s.
double two_scale_compose(double t, double s, double epsilon);

/// Combines the five samples of v that determine (L_eps v)(r, s):
///   a = v(eps (n + s)),  b = v(eps (n + 1 + s)),
///   c = v(eps (n + 1)),  d = v(eps (n + 2)),  e = v(eps n),
/// where n = floor(r / eps) and f = frac(r / eps).
inline double l_eps_combine(double f, double s, double a, double b, double c, double d, double e) {
  const double w_s = a + f * (b - a);
  const double w_one = c + f * (d - c);
  const double w_zero = e + f * (c - e);
  return w_s - s * (w_one - w_zero);
}

/// The two-scale interpolation operator: v o h_eps, linearly interpolated in the slow
/// argument between cell nodes, then corrected by J so that s -> 1 matches s = 0.
/// Arguments of v beyond [0, domain_max] are clamped, and clamped() reports it.
class TwoScaleInterpolant {
 public:
  TwoScaleInterpolant(std::function<double(double)> v, double epsilon, double domain_max);

  double operator()(double r, double s) const;
  bool clamped() const { return clamped_; }

 private:
  double sample(double x) const;

  std::function<double(double)> v_;
  double epsilon_;
  double domain_max_;
  mutable bool clamped_ = false;
};

struct TwoScaleGrid {
  std::size_t r_points = 512;
  std::size_t s_points = 256;
};

struct TwoScaleError {
  double sup_error = 0.0;
  double r_max = 0.0;
  bool clamped = false;  // some stencil point fell beyond the phase range of the trajectory
};

/// sup over the (r, s) grid of |L_eps(u o phi0^{-1} o pi)(r, s) - limit(phi0^{-1}(pi r), s)|,
/// with r uniform on [0, r_max] and s uniform on [0, 1). r_max defaults to phi0(horizon)/pi of
/// `phase` and must not exceed it; stencil points up to 2 eps beyond r_max use the rest of
/// the phase trajectory when it extends further.
template <std::size_t N>
TwoScaleError nonlinear_two_scale_error(const std::function<double(double)>& u_eps,
                                        const std::function<double(double, double)>& limit,
                                        const Trajectory<N>& phase, double epsilon, double r_max,
                                        const TwoScaleGrid& grid = {});

struct WindowedAverage {
  double value = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t periods = 0;
  bool one_sided = false;  // window clipped at an end of [0, T] and trimmed to whole periods
};

/// Mean of `signal` over the time interval in which the fast phase 2 phi0 / eps advances
/// by 2 pi m, centred on phi0(t). Near the ends the window is clipped, then trimmed to a
/// whole number (>= 1) of fast periods.
template <std::size_t N>
WindowedAverage windowed_average(const std::function<double(double)>& signal, double t, std::size_t m,
                                 double epsilon, const Trajectory<N>& phase, double t_max = -1.0);

struct OrderFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Least-squares slope of log(error) against log(epsilon).
OrderFit estimate_order(std::span<const double> epsilons, std::span<const double> errors);

/// Simpson's rule on [a, b] with an even number of subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t intervals);

}  // namespace fastslow

#include "fastslow/detail/averaging.ipp"

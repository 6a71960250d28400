#pragma once

#include <cmath>
#include <numbers>
#include <sstream>

#include "fastslow/homogenized.hpp"
#include "fastslow/kernels.hpp"

namespace fastslow {

template <std::size_t N>
TwoScaleError nonlinear_two_scale_error(const std::function<double(double)>& u_eps,
                                        const std::function<double(double, double)>& limit,
                                        const Trajectory<N>& phase, double epsilon, double r_max,
                                        const TwoScaleGrid& grid) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (grid.r_points < 2 || grid.s_points < 1) throw ConfigError("two-scale grid too small");
  const double r_avail = phase.states.back()[0] / std::numbers::pi;
  if (r_max < 0.0) r_max = r_avail;
  if (r_max > r_avail * (1.0 + 1e-14)) {
    std::ostringstream msg;
    msg << "two-scale r range " << r_max << " exceeds phi0(T)/pi = " << r_avail;
    throw ConfigError(msg.str());
  }
  r_max = std::min(r_max, r_avail);

  TwoScaleError out;
  out.r_max = r_max;
  auto v = [&](double x) {
    if (x > r_avail) {
      out.clamped = true;
      x = r_avail;
    }
    return u_eps(invert_phase(phase, x));
  };

  const std::size_t S = grid.s_points;
  std::vector<double> s_grid(S);
  for (std::size_t j = 0; j < S; ++j) s_grid[j] = static_cast<double>(j) / static_cast<double>(S);

  // table[m][j] = v(eps (m + s_j)); rows 0 .. n_max + 2 cover every stencil.
  const std::int64_t n_max = floor_frac(r_max / epsilon).n;
  const std::size_t rows = static_cast<std::size_t>(n_max) + 3;
  std::vector<double> table(rows * S);
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t j = 0; j < S; ++j) table[m * S + j] = v(epsilon * (static_cast<double>(m) + s_grid[j]));
  }

  std::vector<double> approx(S), exact(S);
  for (std::size_t i = 0; i < grid.r_points; ++i) {
    const double r = r_max * static_cast<double>(i) / static_cast<double>(grid.r_points - 1);
    const FloorFrac nf = floor_frac(r / epsilon);
    const auto n = static_cast<std::size_t>(nf.n);
    const double* row0 = &table[n * S];
    const double* row1 = &table[(n + 1) * S];
    const double c = row1[0];
    const double d = table[(n + 2) * S];
    const double e = row0[0];
    const double t = invert_phase(phase, r);
    for (std::size_t j = 0; j < S; ++j) {
      approx[j] = l_eps_combine(nf.r, s_grid[j], row0[j], row1[j], c, d, e);
      exact[j] = limit(t, s_grid[j]);
    }
    out.sup_error = std::max(out.sup_error, max_abs_diff(approx, exact));
  }
  return out;
}

template <std::size_t N>
WindowedAverage windowed_average(const std::function<double(double)>& signal, double t, std::size_t m,
                                 double epsilon, const Trajectory<N>& phase, double t_max) {
  if (m < 1) throw ConfigError("window must span at least one fast period");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const double period = std::numbers::pi * epsilon;  // phi0 advance per fast period
  const double phi_end = t_max < 0.0 ? phase.states.back()[0] : dense_eval(phase, t_max)[0];
  const double centre = dense_eval(phase, t)[0];
  const double half = 0.5 * period * static_cast<double>(m);

  double lo = centre - half;
  double hi = centre + half;
  WindowedAverage out;
  out.periods = m;
  if (lo < 0.0 || hi > phi_end) {
    out.one_sided = true;
    const bool low_clip = lo < 0.0;
    lo = std::max(lo, 0.0);
    hi = std::min(hi, phi_end);
    const auto k = static_cast<std::size_t>(std::floor((hi - lo) / period * (1.0 + 1e-12)));
    if (k < 1) throw ConfigError("averaging window does not fit a single fast period inside [0, T]");
    out.periods = k;
    if (low_clip) {
      hi = lo + static_cast<double>(k) * period;
    } else {
      lo = hi - static_cast<double>(k) * period;
    }
  }
  out.t_lo = invert_phase(phase, lo / std::numbers::pi);
  out.t_hi = invert_phase(phase, std::min(hi, phase.states.back()[0]) / std::numbers::pi);
  const double integral = simpson(signal, out.t_lo, out.t_hi, 64 * out.periods);
  out.value = integral / (out.t_hi - out.t_lo);
  return out;
}

}  // namespace fastslow

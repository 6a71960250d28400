#pragma once

// Explicit time integration with stored node derivatives and cubic Hermite dense output.
//
// All integrators are templated on the state dimension and on the vector field, which is
// any callable `std::array<double, N>(double t, const std::array<double, N>& x)`.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fastslow/errors.hpp"

namespace fastslow {

template <std::size_t N>
using Vec = std::array<double, N>;

struct TrajectoryMeta {
  std::string integrator;
  double step = 0.0;  // fixed step, or the smallest accepted step for controlled runs
  double rtol = 0.0;
  double atol = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double error_estimate = 0.0;  // Richardson estimate for reference trajectories, else 0
};

template <std::size_t N>
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec<N>> states;
  std::vector<Vec<N>> derivs;
  TrajectoryMeta meta;

  std::size_t size() const { return times.size(); }
  double horizon() const { return times.back(); }
};

namespace detail {

template <std::size_t N>
Vec<N> axpy(const Vec<N>& x, double a, const Vec<N>& y) {
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = x[i] + a * y[i];
  return r;
}

template <std::size_t N>
void require_finite(double t, const Vec<N>& x) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << t << ": (";
      for (std::size_t i = 0; i < N; ++i) msg << (i ? ", " : "") << x[i];
      msg << ")";
      throw NumericalError(msg.str());
    }
  }
}

template <std::size_t N, class Rhs>
Vec<N> rk4_step(Rhs& rhs, double t, const Vec<N>& x, const Vec<N>& k1, double h) {
  const Vec<N> k2 = rhs(t + 0.5 * h, axpy(x, 0.5 * h, k1));
  const Vec<N> k3 = rhs(t + 0.5 * h, axpy(x, 0.5 * h, k2));
  const Vec<N> k4 = rhs(t + h, axpy(x, h, k3));
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta with fixed step h; the final step is shortened to
/// land exactly on the horizon.
template <std::size_t N, class Rhs>
Trajectory<N> integrate_fixed(Rhs&& rhs, const Vec<N>& x0, double horizon, double h) {
  if (!(h > 0.0) || !(h <= horizon)) {
    throw ConfigError("fixed step must satisfy 0 < h <= horizon");
  }
  const auto full_steps = static_cast<std::size_t>(std::floor(horizon / h));
  // A remainder below a few ulp of the horizon is absorbed into the last full step.
  const double remainder = horizon - static_cast<double>(full_steps) * h;
  const bool extra = remainder > 1e-12 * horizon;
  const std::size_t steps = full_steps + (extra ? 1 : 0);

  Trajectory<N> traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.derivs.reserve(steps + 1);

  Vec<N> x = x0;
  detail::require_finite(0.0, x);
  Vec<N> k1 = rhs(0.0, x);
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  traj.derivs.push_back(k1);

  for (std::size_t n = 0; n < steps; ++n) {
    const double t = traj.times.back();
    double t_next = (n + 1 == steps) ? horizon : static_cast<double>(n + 1) * h;
    x = detail::rk4_step(rhs, t, x, k1, t_next - t);
    detail::require_finite(t_next, x);
    k1 = rhs(t_next, x);
    traj.times.push_back(t_next);
    traj.states.push_back(x);
    traj.derivs.push_back(k1);
  }

  traj.meta.integrator = "rk4-fixed";
  traj.meta.step = h;
  traj.meta.accepted = steps;
  return traj;
}

struct ControlOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_initial = 0.0;  // 0: chosen from the initial derivative
  double h_max = std::numeric_limits<double>::infinity();
  double h_min = 1e-14;
  std::size_t max_steps = 10'000'000;
};

/// Dormand-Prince 5(4) with a PI step-size controller. The local error of every accepted
/// step satisfies |err_i| <= atol + rtol * max(|x_i|, |x_new_i|) component-wise.
template <std::size_t N, class Rhs>
Trajectory<N> integrate_controlled(Rhs&& rhs, const Vec<N>& x0, double horizon, const ControlOptions& opt) {
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");

  // Dormand-Prince tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  Trajectory<N> traj;
  Vec<N> x = x0;
  detail::require_finite(0.0, x);
  Vec<N> k1 = rhs(0.0, x);
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  traj.derivs.push_back(k1);

  double h = opt.h_initial;
  if (!(h > 0.0)) {
    double scale = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(x[i]);
      scale = std::max(scale, std::abs(k1[i]) / sc);
    }
    h = scale > 0.0 ? 0.01 * std::pow(scale, -0.2) : 1e-3 * horizon;
  }
  h = std::min({h, opt.h_max, horizon});

  double t = 0.0;
  double err_prev = 1e-4;
  double h_smallest = std::numeric_limits<double>::infinity();
  std::size_t accepted = 0, rejected = 0;

  while (t < horizon) {
    if (accepted + rejected > opt.max_steps) throw NumericalError("controlled integrator exceeded max_steps");
    bool last = false;
    if (t + h >= horizon || horizon - (t + h) < 1e-12 * horizon) {
      h = horizon - t;
      last = true;
    }
    if (h < opt.h_min) {
      std::ostringstream msg;
      msg << "step size underflow (h = " << h << ") at t = " << t;
      throw NumericalError(msg.str());
    }

    using detail::axpy;
    Vec<N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * a21 * k1[i];
    const Vec<N> k2 = rhs(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const Vec<N> k3 = rhs(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const Vec<N> k4 = rhs(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const Vec<N> k5 = rhs(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const Vec<N> k6 = rhs(t + h, tmp);
    Vec<N> x_new;
    for (std::size_t i = 0; i < N; ++i)
      x_new[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const double t_new = last ? horizon : t + h;
    const Vec<N> k7 = rhs(t_new, x_new);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(x[i]), std::abs(x_new[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) {
      detail::require_finite(t_new, x_new);
      throw NumericalError("non-finite local error estimate");
    }

    if (err <= 1.0) {
      ++accepted;
      h_smallest = std::min(h_smallest, h);
      t = t_new;
      x = x_new;
      k1 = k7;
      traj.times.push_back(t);
      traj.states.push_back(x);
      traj.derivs.push_back(k1);
      // PI controller (Gustafsson) with the usual safety factors.
      double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      factor = std::clamp(factor, 0.2, 5.0);
      err_prev = std::max(err, 1e-4);
      h = std::min(h * factor, opt.h_max);
    } else {
      ++rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }

  traj.meta.integrator = "dopri5-pi";
  traj.meta.step = h_smallest;
  traj.meta.rtol = opt.rtol;
  traj.meta.atol = opt.atol;
  traj.meta.accepted = accepted;
  traj.meta.rejected = rejected;
  return traj;
}

/// Index i of the node interval [times[i], times[i+1]] containing t.
template <std::size_t N>
std::size_t bracket(const Trajectory<N>& traj, double t) {
  const auto& ts = traj.times;
  if (ts.size() < 2) return 0;
  if (!(t >= ts.front() && t <= ts.back())) {
    std::ostringstream msg;
    msg << "dense evaluation at t = " << t << " outside [" << ts.front() << ", " << ts.back() << "]";
    throw ConfigError(msg.str());
  }
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t i = static_cast<std::size_t>(it - ts.begin());
  if (i == 0) return 0;
  return std::min(i - 1, ts.size() - 2);
}

/// Cubic Hermite interpolation on the bracketing interval; exact at nodes.
template <std::size_t N>
Vec<N> dense_eval(const Trajectory<N>& traj, double t) {
  const std::size_t i = bracket(traj, t);
  if (traj.size() == 1 || t == traj.times[i]) return traj.states[i];
  if (t == traj.times[i + 1]) return traj.states[i + 1];
  const double t0 = traj.times[i];
  const double h = traj.times[i + 1] - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  const Vec<N>& x0 = traj.states[i];
  const Vec<N>& x1 = traj.states[i + 1];
  const Vec<N>& d0 = traj.derivs[i];
  const Vec<N>& d1 = traj.derivs[i + 1];
  Vec<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out[k] = h00 * x0[k] + h10 * h * d0[k] + h01 * x1[k] + h11 * h * d1[k];
  }
  return out;
}

template <std::size_t N>
std::vector<Vec<N>> sample(const Trajectory<N>& traj, std::span<const double> grid) {
  std::vector<Vec<N>> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(dense_eval(traj, t));
  return out;
}

/// n points uniformly spaced over [0, horizon], both ends included.
std::vector<double> uniform_grid(double horizon, std::size_t n);

/// Fixed-step RK4 at base_h and base_h / 2. The global error of the finer run is estimated
/// by Richardson extrapolation, max_nodes |x_h - x_{h/2}| / 15; the finer trajectory is
/// returned carrying that estimate. Throws NumericalError if the estimate exceeds error_cap.
template <std::size_t N, class Rhs>
Trajectory<N> reference_solution(Rhs&& rhs, const Vec<N>& x0, double horizon, double base_h,
                                 double error_cap = std::numeric_limits<double>::infinity()) {
  const Trajectory<N> coarse = integrate_fixed(rhs, x0, horizon, base_h);
  Trajectory<N> fine = integrate_fixed(rhs, x0, horizon, 0.5 * base_h);
  double diff = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const Vec<N> xf = dense_eval(fine, coarse.times[i]);
    for (std::size_t k = 0; k < N; ++k) diff = std::max(diff, std::abs(coarse.states[i][k] - xf[k]));
  }
  fine.meta.integrator = "rk4-richardson";
  fine.meta.error_estimate = diff / 15.0;
  if (fine.meta.error_estimate > error_cap) {
    std::ostringstream msg;
    msg << "reference solution error estimate " << fine.meta.error_estimate << " exceeds cap " << error_cap;
    throw NumericalError(msg.str());
  }
  return fine;
}

}  // namespace fastslow

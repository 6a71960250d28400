#pragma once

#include <algorithm>
#include <numbers>
#include <sstream>

namespace fastslow {

template <std::size_t N>
double invert_phase(const Trajectory<N>& traj, double r, double tol) {
  const double target = std::numbers::pi * r;
  const double phi_end = traj.states.back()[0];
  if (!(target >= traj.states.front()[0] && target <= phi_end)) {
    std::ostringstream msg;
    msg << "phase inversion target pi*" << r << " outside [" << traj.states.front()[0] << ", " << phi_end << "]";
    throw ConfigError(msg.str());
  }
  // Locate the node interval through the stored (monotone) phase values.
  auto it = std::lower_bound(traj.states.begin(), traj.states.end(), target,
                             [](const Vec<N>& s, double v) { return s[0] < v; });
  std::size_t i = static_cast<std::size_t>(it - traj.states.begin());
  if (i < traj.size() && traj.states[i][0] == target) return traj.times[i];
  double lo = traj.times[i - 1];
  double hi = traj.times[i];
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f = dense_eval(traj, mid)[0] - target;
    if (std::abs(f) <= tol || mid == lo || mid == hi) return mid;
    (f < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace fastslow

#pragma once

#include <array>

#include "fastslow/integrate.hpp"
#include "fastslow/model.hpp"

namespace fastslow {

/// Leading-order state. theta0 is carried for completeness and stays at theta*.
struct HomogenizedState {
  double phi0 = 0.0;
  double y0 = 0.0;
  double p0 = 0.0;
  double theta0 = 0.0;

  Vec<3> to_array() const { return {phi0, y0, p0}; }
  static HomogenizedState from_array(const Vec<3>& a, double theta_star) { return {a[0], a[1], a[2], theta_star}; }
};

/// (phi0', y0', p0') = (omega(y0), p0, -theta* omega'(y0)).
Vec<3> homogenized_rhs(const HomogenizedState& s, const FrequencyModel& fm, double theta_star);

/// E0 = p0^2/2 + theta* omega(y0), a first integral of the homogenized flow.
double homogenized_energy(const HomogenizedState& s, const FrequencyModel& fm, double theta_star);

Trajectory<3> solve_homogenized(const SystemParams& params, const FrequencyModel& fm, const ControlOptions& opt);

/// Time t with phi0(t) = pi r. Component 0 of the trajectory must be the (strictly
/// increasing) leading-order phase. Bisection on the dense output to |phi0(t) - pi r| <= tol.
template <std::size_t N>
double invert_phase(const Trajectory<N>& traj, double r, double tol = 1e-12);

}  // namespace fastslow

#include "fastslow/detail/invert_phase.ipp"

#include "fastslow/homogenized.hpp"

namespace fastslow {

Vec<3> homogenized_rhs(const HomogenizedState& s, const FrequencyModel& fm, double theta_star) {
  const FrequencyJet j = fm.jet(s.y0);
  return {j.value, s.p0, -theta_star * j.d1};
}

double homogenized_energy(const HomogenizedState& s, const FrequencyModel& fm, double theta_star) {
  return 0.5 * s.p0 * s.p0 + theta_star * fm.omega(s.y0);
}

Trajectory<3> solve_homogenized(const SystemParams& params, const FrequencyModel& fm, const ControlOptions& opt) {
  params.validate();
  const double theta_star = derived_constants(params, fm).theta_star;
  auto rhs = [&](double, const Vec<3>& x) {
    return homogenized_rhs(HomogenizedState::from_array(x, theta_star), fm, theta_star);
  };
  return integrate_controlled(rhs, Vec<3>{0.0, params.y_star, params.p_star}, params.horizon, opt);
}

}  // namespace fastslow

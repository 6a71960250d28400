#include "fastslow/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fastslow/errors.hpp"

namespace fastslow {

namespace {

// 2 pi split so that kTwoPiHi + kTwoPiLo matches 2 pi to ~1e-32.
constexpr double kTwoPiHi = 6.283185307179586232;
constexpr double kTwoPiLo = 2.4492935982947064e-16;
constexpr double kInvTwoPi = 0.15915494309189533577;

}  // namespace

double reduce_fast_angle(double phi, double epsilon, double multiple) {
  const double num = multiple * phi;
  const double hi = num / epsilon;
  // Exact remainder of the division: num - hi * epsilon.
  const double lo = std::fma(-hi, epsilon, num) / epsilon;
  const double n = std::nearbyint(hi * kInvTwoPi);
  double r = std::fma(-n, kTwoPiHi, hi);
  r = std::fma(-n, kTwoPiLo, r) + lo;
  if (r > std::numbers::pi) r -= 2.0 * std::numbers::pi;
  if (r < -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

FastPhase FastPhase::from_angle(double angle) {
  FastPhase f;
  f.sin2 = std::sin(angle);
  f.cos2 = std::cos(angle);
  f.sin4 = 2.0 * f.sin2 * f.cos2;
  f.cos4 = f.cos2 * f.cos2 - f.sin2 * f.sin2;
  return f;
}

FastPhase FastPhase::at(double phi, double epsilon) {
  return from_angle(reduce_fast_angle(phi, epsilon, 2.0));
}

void require_positive_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    std::ostringstream msg;
    msg << "epsilon must be positive and finite, got " << epsilon;
    throw ConfigError(msg.str());
  }
}

CartesianState cartesian_rhs(const CartesianState& s, double epsilon, const FrequencyModel& fm) {
  require_positive_epsilon(epsilon);
  const FrequencyJet j = fm.jet(s.y);
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  return {s.eta, -inv_eps2 * j.value * j.d1 * s.z * s.z, s.zeta, -inv_eps2 * j.value * j.value * s.z};
}

ActionAngleState action_angle_rhs(const ActionAngleState& s, double epsilon, const FrequencyModel& fm) {
  require_positive_epsilon(epsilon);
  if (s.theta < 0.0) throw ConfigError("action theta must be non-negative");

  const FrequencyJet j = fm.jet(s.y);
  const double w = j.value;
  const double w1 = j.d1;
  const double w2 = j.d2;
  const FastPhase f = FastPhase::at(s.phi, epsilon);
  const double e = epsilon;
  const double th = s.theta;
  const double p = s.p;
  const double s2sq = f.sin2 * f.sin2;

  ActionAngleState d;
  d.phi = w + e * p * w1 / (2.0 * w) * f.sin2 + e * e * th * w1 * w1 / (4.0 * w * w) * s2sq;
  d.theta = -th * p * w1 / w * f.cos2 - e * th * th * w1 * w1 / (4.0 * w * w) * f.sin4;
  d.y = p + e * th * w1 / (2.0 * w) * f.sin2;
  d.p = -th * w1 + e * th * p * w1 * w1 / (2.0 * w * w) * f.sin2 - e * th * p * w2 / (2.0 * w) * f.sin2 +
        e * e * th * th * w1 * w1 * w1 / (4.0 * w * w * w) * s2sq -
        e * e * th * th * w1 * w2 / (4.0 * w * w) * s2sq;
  return d;
}

ActionAngleState action_angle_rhs_log_form(const ActionAngleState& s, double epsilon,
                                           const FrequencyModel& fm) {
  require_positive_epsilon(epsilon);
  if (s.theta < 0.0) throw ConfigError("action theta must be non-negative");

  const FrequencyJet j = fm.jet(s.y);
  const LogDerivatives ld = log_derivatives(j);
  const FastPhase f = FastPhase::at(s.phi, epsilon);

  // Velocity first, then the time derivatives of L along the motion.
  const double ydot = s.p + 0.5 * epsilon * s.theta * ld.dyL * f.sin2;
  const double dtL = ld.dyL * ydot;
  const double dtdyL = ld.dy2L * ydot;

  ActionAngleState d;
  d.phi = j.value + 0.5 * epsilon * dtL * f.sin2;
  d.theta = -s.theta * dtL * f.cos2;
  d.y = ydot;
  d.p = -s.theta * j.d1 - 0.5 * epsilon * s.theta * dtdyL * f.sin2;
  return d;
}

ActionAngleConversion to_action_angle(const CartesianState& s, double epsilon, const FrequencyModel& fm,
                                      std::optional<double> phi_reference) {
  require_positive_epsilon(epsilon);
  const FrequencyJet j = fm.jet(s.y);
  const double w = j.value;
  const double scaled_z = w * s.z / epsilon;

  ActionAngleConversion out;
  out.state.y = s.y;
  out.state.theta = (s.zeta * s.zeta + scaled_z * scaled_z) / (2.0 * w);
  if (out.state.theta == 0.0) {
    out.degenerate = true;
    out.state.phi = phi_reference.value_or(0.0);
    out.state.p = s.eta;
    return out;
  }

  double phi = epsilon * std::atan2(scaled_z, s.zeta);
  if (phi_reference) {
    const double period = 2.0 * std::numbers::pi * epsilon;
    phi += period * std::nearbyint((*phi_reference - phi) / period);
  }
  out.state.phi = phi;
  // eta - epsilon theta omega'/(2 omega) sin(2 phi/epsilon), with sin(2 phi/epsilon) written
  // through z and zeta directly.
  out.state.p = s.eta - j.d1 * s.z * s.zeta / (2.0 * w);
  return out;
}

CartesianState from_action_angle(const ActionAngleState& s, double epsilon, const FrequencyModel& fm) {
  require_positive_epsilon(epsilon);
  if (s.theta < 0.0) throw ConfigError("action theta must be non-negative");
  const FrequencyJet j = fm.jet(s.y);
  const double w = j.value;
  const double angle = reduce_fast_angle(s.phi, epsilon, 1.0);
  const double sn = std::sin(angle);
  const double cs = std::cos(angle);

  CartesianState c;
  c.y = s.y;
  c.z = epsilon * std::sqrt(2.0 * s.theta / w) * sn;
  c.zeta = std::sqrt(2.0 * s.theta * w) * cs;
  c.eta = s.p + epsilon * s.theta * j.d1 / (2.0 * w) * (2.0 * sn * cs);
  return c;
}

double energy_cartesian(const CartesianState& s, double epsilon, const FrequencyModel& fm) {
  require_positive_epsilon(epsilon);
  const double w = fm.omega(s.y);
  const double scaled_z = w * s.z / epsilon;
  return 0.5 * s.eta * s.eta + 0.5 * s.zeta * s.zeta + 0.5 * scaled_z * scaled_z;
}

double energy_action_angle(const ActionAngleState& s, double epsilon, const FrequencyModel& fm) {
  require_positive_epsilon(epsilon);
  const FrequencyJet j = fm.jet(s.y);
  const double w = j.value;
  const FastPhase f = FastPhase::at(s.phi, epsilon);
  const double q = s.theta * j.d1 / w * f.sin2;
  return 0.5 * s.p * s.p + s.theta * w + 0.5 * epsilon * s.p * q + epsilon * epsilon / 8.0 * q * q;
}

EnergySplit split_energy(const CartesianState& s, double epsilon, const FrequencyModel& fm) {
  require_positive_epsilon(epsilon);
  const double w = fm.omega(s.y);
  const double scaled_z = w * s.z / epsilon;
  EnergySplit e;
  e.perp = 0.5 * s.zeta * s.zeta + 0.5 * scaled_z * scaled_z;
  e.parallel = 0.5 * s.eta * s.eta;
  return e;
}

EnergySplit split_energy(const ActionAngleState& s, double epsilon, const FrequencyModel& fm) {
  EnergySplit e;
  e.perp = s.theta * fm.omega(s.y);
  e.parallel = energy_action_angle(s, epsilon, fm) - e.perp;
  return e;
}

double full_system_step(double epsilon, const FrequencyModel& fm, double step_factor) {
  require_positive_epsilon(epsilon);
  if (!(step_factor > 0.0)) throw ConfigError("step factor must be positive");
  return 2.0 * std::numbers::pi * epsilon / (step_factor * fm.upper_bound());
}

ActionAngleState initial_action_angle(const SystemParams& params, const FrequencyModel& fm) {
  const DerivedConstants dc = derived_constants(params, fm);
  return {0.0, dc.theta_star, params.y_star, params.p_star};
}

CartesianState initial_cartesian(const SystemParams& params) {
  return {params.y_star, params.p_star, 0.0, params.u_star};
}

namespace {

double aligned_step(double h, double grid_spacing) {
  if (!(grid_spacing > 0.0)) return h;
  return grid_spacing / std::ceil(grid_spacing / h);
}

}  // namespace

Trajectory<4> solve_full_action_angle(const SystemParams& params, const FrequencyModel& fm, double epsilon,
                                      double step_factor, double grid_spacing, double error_cap) {
  params.validate();
  const double h = aligned_step(full_system_step(epsilon, fm, step_factor), grid_spacing);
  auto rhs = [&](double, const Vec<4>& x) {
    return action_angle_rhs(ActionAngleState::from_array(x), epsilon, fm).to_array();
  };
  return reference_solution(rhs, initial_action_angle(params, fm).to_array(), params.horizon, h, error_cap);
}

Trajectory<4> solve_full_cartesian(const SystemParams& params, const FrequencyModel& fm, double epsilon,
                                   double step_factor, double grid_spacing, double error_cap) {
  params.validate();
  const double h = aligned_step(full_system_step(epsilon, fm, step_factor), grid_spacing);
  auto rhs = [&](double, const Vec<4>& x) {
    return cartesian_rhs(CartesianState::from_array(x), epsilon, fm).to_array();
  };
  return reference_solution(rhs, initial_cartesian(params).to_array(), params.horizon, h, error_cap);
}

}  // namespace fastslow

#pragma once

#include <array>
#include <optional>

#include "fastslow/integrate.hpp"
#include "fastslow/model.hpp"

namespace fastslow {

/// Canonical coordinates (y, eta; z, zeta) of the two-degree-of-freedom system.
struct CartesianState {
  double y = 0.0;
  double eta = 0.0;
  double z = 0.0;
  double zeta = 0.0;

  std::array<double, 4> to_array() const { return {y, eta, z, zeta}; }
  static CartesianState from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
};

/// Action-angle coordinates for the fast oscillator plus the transformed slow momentum p.
struct ActionAngleState {
  double phi = 0.0;
  double theta = 0.0;
  double y = 0.0;
  double p = 0.0;

  std::array<double, 4> to_array() const { return {phi, theta, y, p}; }
  static ActionAngleState from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
};

/// Computes (multiple * phi / epsilon) mod 2 pi, in [-pi, pi].
///
/// The quotient is carried as a double-double (hi + lo, using the exact fma remainder of
/// the division) and reduced against a two-part 2 pi, so the reduced angle stays accurate
/// to ~1e-16 even when the raw argument is in the 1e4..1e6 range. `multiple` must be a
/// power of two so that multiple * phi is exact.
double reduce_fast_angle(double phi, double epsilon, double multiple);

/// sin and cos of the fast phase 2 phi / epsilon and of its double 4 phi / epsilon.
struct FastPhase {
  double sin2 = 0.0;
  double cos2 = 1.0;
  double sin4 = 0.0;
  double cos4 = 1.0;

  static FastPhase at(double phi, double epsilon);
  /// Same harmonics for an already reduced angle (e.g. 2 pi s on the torus).
  static FastPhase from_angle(double angle);
};

void require_positive_epsilon(double epsilon);

CartesianState cartesian_rhs(const CartesianState& s, double epsilon, const FrequencyModel& fm);

/// Exact equations of motion in action-angle variables, written with omega and its
/// derivatives (all epsilon and epsilon^2 terms retained).
ActionAngleState action_angle_rhs(const ActionAngleState& s, double epsilon, const FrequencyModel& fm);

/// The same vector field written with log-derivatives of omega; used as an
/// independent route for the equivalence check.
ActionAngleState action_angle_rhs_log_form(const ActionAngleState& s, double epsilon,
                                           const FrequencyModel& fm);

struct ActionAngleConversion {
  ActionAngleState state;
  bool degenerate = false;  // theta == 0: the angle is undefined and set to 0 (or the reference)
};

/// Cartesian -> action-angle. When `phi_reference` is given, the angle branch
/// (multiples of 2 pi epsilon) closest to the reference is chosen, which keeps a
/// transformed trajectory continuous.
ActionAngleConversion to_action_angle(const CartesianState& s, double epsilon, const FrequencyModel& fm,
                                      std::optional<double> phi_reference = std::nullopt);

CartesianState from_action_angle(const ActionAngleState& s, double epsilon, const FrequencyModel& fm);

double energy_cartesian(const CartesianState& s, double epsilon, const FrequencyModel& fm);
double energy_action_angle(const ActionAngleState& s, double epsilon, const FrequencyModel& fm);

struct EnergySplit {
  double perp = 0.0;      // fast oscillator ("heat bath") energy
  double parallel = 0.0;  // everything else
};

EnergySplit split_energy(const CartesianState& s, double epsilon, const FrequencyModel& fm);
EnergySplit split_energy(const ActionAngleState& s, double epsilon, const FrequencyModel& fm);

/// Fixed step for the full system: 2 pi epsilon / (factor * omega_max).
double full_system_step(double epsilon, const FrequencyModel& fm, double step_factor);

/// Action-angle state at t = 0 for the given initial data: (0, theta*, y*, p*).
ActionAngleState initial_action_angle(const SystemParams& params, const FrequencyModel& fm);
CartesianState initial_cartesian(const SystemParams& params);

/// Reference-quality (step-halving) RK4 solutions of the full system. The step is reduced
/// so that `grid_spacing` (if positive) is a whole multiple of it.
Trajectory<4> solve_full_action_angle(const SystemParams& params, const FrequencyModel& fm, double epsilon,
                                      double step_factor, double grid_spacing = 0.0,
                                      double error_cap = std::numeric_limits<double>::infinity());
Trajectory<4> solve_full_cartesian(const SystemParams& params, const FrequencyModel& fm, double epsilon,
                                   double step_factor, double grid_spacing = 0.0,
                                   double error_cap = std::numeric_limits<double>::infinity());

}  // namespace fastslow

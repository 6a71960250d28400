#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fastslow/expansion.hpp"

namespace fastslow {

struct ThermoState {
  double temperature = 0.0;  // theta omega(y)
  double entropy = 0.0;      // log(theta) + C, C = -log(theta*)
  double force = 0.0;        // theta omega'(y)
};

ThermoState thermo_state(double theta, double y, const FrequencyModel& fm, const DerivedConstants& constants);

struct ThermoExpansion {
  double T0 = 0.0;
  double F0 = 0.0;
  double S0 = 0.0;
  double S1_osc = 0.0;        // [theta1] / theta*
  double S2_full = 0.0;       // (theta2_bar + [theta2]) / theta* - ([theta1]/theta*)^2 / 2
  double S2_bar = 0.0;        // theta2_bar / theta* - (dtL / (4 omega))^2
  double S2_doublebar = 0.0;  // theta2_bar / theta*
};

ThermoExpansion expand_thermo(const ExpansionPoint& point, const CorrectorValues& cv, double theta_star,
                              const FrequencyModel& fm);

struct EnergyExpansion {
  double E0_perp = 0.0;
  double E0_par = 0.0;
  double E1_perp_osc = 0.0;
  double E1_par_osc = 0.0;
  double E2_perp_osc = 0.0;
  double E2_par_osc = 0.0;
  double E2_perp_bar = 0.0;
  double E2_par_bar = 0.0;
  double A_bar = 0.0;
  double E2_bar = 0.0;
};

EnergyExpansion energy_expansion(const ExpansionPoint& point, const CorrectorValues& cv, double epsilon,
                                 double theta_star, const FrequencyModel& fm);

struct AveragedEnergyBundle {
  double A_bar = 0.0;
  double S2_doublebar_closed = 0.0;  // (p0 omega' / (2 omega^2))^2 / 2 + C
  double E2_bar = 0.0;               // A_bar + F0 y2_bar + T0 S2_doublebar_closed
  double dE2_dy0 = 0.0;
  double dE2_dp0 = 0.0;
  double coefficient_y2_bar = 0.0;         // d E2_bar / d y2_bar
  double coefficient_S2_doublebar = 0.0;   // d E2_bar / d S2_doublebar
};

AveragedEnergyBundle averaged_energy_bundle(const ExpansionPoint& point, const FrequencyModel& fm,
                                          const DerivedConstants& constants);

/// Fourth-order finite-difference derivative on a uniform grid (one-sided stencils in the
/// two points nearest each end). Needs at least five samples.
std::vector<double> derivative_uniform(std::span<const double> values, double dt);

struct FirstLawSeries {
  double dt = 0.0;
  std::vector<double> E2_perp_bar, y2_bar, S2_doublebar, F0, T0;
};

struct FirstLawResult {
  std::vector<double> residual;  // dE2perp/dt - F0 dy2bar/dt - T0 dS2bb/dt
  double max_residual = 0.0;
};

FirstLawResult check_first_law(const FirstLawSeries& series);

/// Leading-order analogue dE0perp/dt - F0 dy0/dt (S0 is constant).
FirstLawResult check_first_law_leading(double dt, std::span<const double> E0_perp, std::span<const double> y0,
                                       std::span<const double> F0);

/// One-period mean of zeta^2 = 2 E cos^2(omega t), by the composite trapezoid rule.
double hertz_temperature_oracle(double E_perp, double y, const FrequencyModel& fm, std::size_t period_samples);

enum class VolumeMethod { closed_form, area_quadrature };

struct PhaseSpaceVolumeOptions {
  VolumeMethod method = VolumeMethod::closed_form;
  bool scaled = false;       // fast coordinates with potential omega^2 z^2 / (2 eps^2)
  std::size_t cells = 2000;  // per axis, for the quadrature
};

double phase_space_volume(double E_perp, double y, const FrequencyModel& fm, double epsilon,
                          const PhaseSpaceVolumeOptions& opt = {});

struct EquipartitionResult {
  double max_gap = 0.0;  // max over the evaluation times of |<K - U>|
  double sup_xi = 0.0;   // sup |z zeta| over the evaluation times
  bool any_one_sided = false;
};

EquipartitionResult equipartition_check(const std::function<CartesianState(double)>& state, double epsilon,
                                        const FrequencyModel& fm, const Trajectory<7>& expansion,
                                        std::span<const double> times, std::size_t window_periods,
                                        double t_max = -1.0);

}  // namespace fastslow

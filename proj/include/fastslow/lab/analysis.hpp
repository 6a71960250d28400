#pragma once

#include <map>
#include <string>
#include <vector>

#include "fastslow/expansion.hpp"
#include "fastslow/lab/config.hpp"
#include "fastslow/thermo.hpp"

namespace fastslow::lab {

ResidualSettings residual_settings(const RunConfig& cfg, std::size_t workers);
ControlOptions expansion_options(const RunConfig& cfg, double grid_spacing);

/// Averaged expansion on the output grid, with the identities that must hold along it.
struct ThermoReport {
  bool degenerate = false;
  std::vector<double> grid;
  std::vector<double> T0, F0, S0, S2_doublebar, E2_perp_bar, E2_par_bar, E2_bar;
  std::vector<double> first_law_residual;         // total derivatives, as stated
  std::vector<double> quasi_static_residual;      // y0 held fixed inside E2perp
  double leading_first_law = 0.0;
  double second_first_law = 0.0;
  double quasi_static_first_law = 0.0;
  double e2_bar_sup = 0.0;
  double averaged_identity_sup = 0.0;
  double closed_form_sup = 0.0;  // |theta2_bar - theta* S2bb_closed|
  double theta2_bar_initial = 0.0;
  double closed_form_initial = 0.0;
  double hamilton_y_sup = 0.0;   // |dy2bar/dt - dE2/dp0|
  double hamilton_p_sup = 0.0;   // |dp2bar/dt + dE2/dy0|
  double energy_split_sup = 0.0; // |E2perp_bar + E2par_bar - E2_bar|
  // Per epsilon (config order).
  std::vector<double> epsilons;
  std::vector<double> equipartition_gap;
  std::vector<double> sup_xi;
  std::vector<double> theta_gap;  // sup |theta - theta*|
  std::vector<double> temperature_gap;  // sup |T_eps - T0| / eps
  bool equipartition_one_sided = false;
};

ThermoReport run_thermo_analysis(const RunConfig& cfg, std::size_t workers);

const std::vector<std::string>& twoscale_variables();

struct TwoScaleRow {
  double epsilon = 0.0;
  std::map<std::string, double> sup_error;
  bool clamped = false;
};

/// Full and averaged systems are integrated past the horizon (by 4 pi eps_max / omega_min)
/// so every interpolation stencil on [0, phi0(T)/pi] stays inside the computed range.
std::vector<TwoScaleRow> run_twoscale_analysis(const RunConfig& cfg, std::size_t workers);

struct IdentityCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

std::vector<IdentityCheck> run_identity_suite(const RunConfig& cfg, std::size_t workers);

/// True when the sequence is strictly decreasing.
bool strictly_decreasing(const std::vector<double>& v);

}  // namespace fastslow::lab

#pragma once

#include <map>
#include <string>
#include <vector>

#include "fastslow/averaging.hpp"
#include "fastslow/dynamics.hpp"
#include "fastslow/homogenized.hpp"

namespace fastslow {

/// Oscillatory correctors evaluated at one time.
struct CorrectorValues {
  double theta1 = 0.0;
  double phi2 = 0.0;
  double y2 = 0.0;
  double p2 = 0.0;
  double theta2 = 0.0;
};

/// Averaged second-order corrections.
struct AveragedCorrection {
  double phi2_bar = 0.0;
  double theta2_bar = 0.0;
  double y2_bar = 0.0;
  double p2_bar = 0.0;
};

/// Correctors with the fast harmonics supplied directly (2 phi0 / eps or 2 pi s).
CorrectorValues correctors_at_phase(const HomogenizedState& base, double phi2_bar, const FastPhase& phase,
                                    const FrequencyModel& fm, double theta_star);

CorrectorValues correctors(const HomogenizedState& base, double phi2_bar, double epsilon, const FrequencyModel& fm,
                           double theta_star);

/// The corrector limit functions on the torus, s in [0, 1).
CorrectorValues two_scale_limits(double s, const HomogenizedState& base, double phi2_bar, const FrequencyModel& fm,
                                 double theta_star);

AveragedCorrection averaged_rhs(const AveragedCorrection& corr, const HomogenizedState& base,
                                const FrequencyModel& fm, double theta_star);

/// Negated correctors at t = 0, so the reconstruction matches the initial data.
AveragedCorrection initial_corrections(const SystemParams& params, const FrequencyModel& fm);

/// Joint state (phi0, y0, p0, phi2_bar, theta2_bar, y2_bar, p2_bar).
struct ExpansionPoint {
  HomogenizedState base;
  AveragedCorrection corr;

  Vec<7> to_array() const;
  static ExpansionPoint from_array(const Vec<7>& a, double theta_star);
};

Vec<7> expansion_rhs(const Vec<7>& x, const FrequencyModel& fm, double theta_star);

Trajectory<7> solve_expansion(const SystemParams& params, const FrequencyModel& fm, const ControlOptions& opt);

ExpansionPoint expansion_at(const Trajectory<7>& traj, double t, double theta_star);

ActionAngleState reconstruct(double epsilon, const ExpansionPoint& point, const CorrectorValues& cv,
                             double theta_star);

/// Algebraic identity linking the averaged corrections to the leading order; zero along
/// solutions started from initial_corrections().
double averaged_identity_residual(const ExpansionPoint& point, const FrequencyModel& fm, double theta_star);

/// omega [theta1] + theta* p0 omega' / (2 omega) sin(2 phi0 / eps); identically zero.
double first_order_energy_identity(const HomogenizedState& base, double epsilon, const FrequencyModel& fm,
                                   double theta_star, bool flip_corrector_sign = false);

struct ResidualSettings {
  double step_factor = 80.0;
  double rtol = 1e-12;
  double atol = 1e-14;
  std::size_t grid_points = 2001;
  std::size_t workers = 1;
  double reference_error_cap = std::numeric_limits<double>::infinity();
};

/// Residual variable names and the power of epsilon used to normalise each.
struct ResidualVariable {
  std::string name;
  int power;
};
const std::vector<ResidualVariable>& residual_variables();

struct EpsilonResidual {
  double epsilon = 0.0;
  std::map<std::string, double> sup;  // keyed by residual_variables() names
  double energy_drift = 0.0;          // sup |E - E*| of the full solution
  double reference_error = 0.0;       // Richardson estimate of the full solution
};

struct FittedOrder {
  OrderFit fit;
  bool accepted = false;  // R^2 >= 0.98
};

struct ResidualReport {
  std::vector<EpsilonResidual> rows;  // sorted by decreasing epsilon
  std::map<std::string, FittedOrder> orders;
  double normalized(std::size_t row, const std::string& name) const;
};

EpsilonResidual residuals_for_epsilon(const SystemParams& params, const FrequencyModel& fm, double epsilon,
                                      const Trajectory<7>& expansion, const Trajectory<4>& full,
                                      std::span<const double> grid);

/// Fits orders over the three smallest epsilons of an already computed set of rows.
std::map<std::string, FittedOrder> fit_orders(const std::vector<EpsilonResidual>& rows);

ResidualReport residual_norms(const SystemParams& params, const FrequencyModel& fm,
                              std::span<const double> epsilons, const ResidualSettings& settings);

}  // namespace fastslow

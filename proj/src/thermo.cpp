#include "fastslow/thermo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fastslow/kernels.hpp"

namespace fastslow {

ThermoState thermo_state(double theta, double y, const FrequencyModel& fm, const DerivedConstants& constants) {
  if (!(theta > 0.0)) throw std::domain_error("entropy undefined for non-positive action");
  const FrequencyJet j = fm.jet(y);
  return {theta * j.value, std::log(theta) + constants.entropy_constant, theta * j.d1};
}

ThermoExpansion expand_thermo(const ExpansionPoint& pt, const CorrectorValues& cv, double theta_star,
                              const FrequencyModel& fm) {
  const FrequencyJet j = fm.jet(pt.base.y0);
  const double dtL = pt.base.p0 * j.d1 / j.value;
  const double q = dtL / (4.0 * j.value);
  ThermoExpansion te;
  te.T0 = theta_star * j.value;
  te.F0 = theta_star * j.d1;
  te.S0 = 0.0;  // log(theta*) - log(theta*)
  te.S1_osc = cv.theta1 / theta_star;
  te.S2_full = (pt.corr.theta2_bar + cv.theta2) / theta_star - 0.5 * te.S1_osc * te.S1_osc;
  te.S2_bar = pt.corr.theta2_bar / theta_star - q * q;
  te.S2_doublebar = pt.corr.theta2_bar / theta_star;
  return te;
}

EnergyExpansion energy_expansion(const ExpansionPoint& pt, const CorrectorValues& cv, double epsilon,
                                 double theta_star, const FrequencyModel& fm) {
  const FrequencyJet j = fm.jet(pt.base.y0);
  const double w = j.value;
  const double th = theta_star;
  const double p0 = pt.base.p0;
  const double dyL = j.d1 / w;
  const double dtL = p0 * dyL;
  const FastPhase f = FastPhase::at(pt.base.phi0, epsilon);

  EnergyExpansion e;
  e.E0_perp = th * w;
  e.E0_par = 0.5 * p0 * p0;
  e.E1_perp_osc = w * cv.theta1;
  e.E1_par_osc = 0.5 * th * dtL * f.sin2;
  e.E2_perp_osc = w * (pt.corr.theta2_bar + cv.theta2) + th * j.d1 * (pt.corr.y2_bar + cv.y2);
  e.E2_par_osc = p0 * (pt.corr.p2_bar + cv.p2) + th * th * dyL * dyL / 8.0 * f.sin2 * f.sin2 +
                 th * dtL * (pt.corr.phi2_bar + cv.phi2) * f.cos2 + 0.5 * cv.theta1 * dtL * f.sin2;
  e.E2_perp_bar = th * j.d1 * pt.corr.y2_bar + w * pt.corr.theta2_bar;
  const double quarter = th * dyL / 4.0;
  e.E2_par_bar = p0 * pt.corr.p2_bar + quarter * quarter - th * dtL * dtL / (4.0 * w);
  const double k = p0 * j.d1 / (2.0 * w * w);
  e.A_bar = p0 * pt.corr.p2_bar + quarter * quarter - th * w * k * k;
  e.E2_bar = e.E2_perp_bar + e.E2_par_bar;
  return e;
}

AveragedEnergyBundle averaged_energy_bundle(const ExpansionPoint& pt, const FrequencyModel& fm,
                                            const DerivedConstants& dc) {
  const FrequencyJet j = fm.jet(pt.base.y0);
  const double w = j.value, w1 = j.d1, w2 = j.d2;
  const double th = dc.theta_star;
  const double p0 = pt.base.p0;
  const double C = dc.c_sbarbar2;
  const double T0 = th * w;
  const double F0 = th * w1;
  const double k = p0 * w1 / (2.0 * w * w);
  const double quarter = th * w1 / (4.0 * w);

  AveragedEnergyBundle b;
  b.A_bar = p0 * pt.corr.p2_bar + quarter * quarter - T0 * k * k;
  b.S2_doublebar_closed = 0.5 * k * k + C;
  b.E2_bar = b.A_bar + F0 * pt.corr.y2_bar + T0 * b.S2_doublebar_closed;
  b.coefficient_y2_bar = F0;
  b.coefficient_S2_doublebar = T0;
  b.dE2_dp0 = pt.corr.p2_bar - th * p0 * w1 * w1 / (4.0 * w * w * w);
  const double w_2 = w * w, w_3 = w_2 * w, w_4 = w_3 * w;
  b.dE2_dy0 = th * th / 16.0 * (2.0 * w1 * w2 / w_2 - 2.0 * w1 * w1 * w1 / w_3) -
              th * p0 * p0 / 8.0 * (2.0 * w1 * w2 / w_3 - 3.0 * w1 * w1 * w1 / w_4) + th * w2 * pt.corr.y2_bar +
              th * w1 * C;
  return b;
}

std::vector<double> derivative_uniform(std::span<const double> v, double dt) {
  const std::size_t n = v.size();
  if (n < 5) throw ConfigError("finite-difference derivative needs at least five samples");
  if (!(dt > 0.0)) throw ConfigError("grid spacing must be positive");
  std::vector<double> d(n);
  const double s = 1.0 / (12.0 * dt);
  d[0] = s * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]);
  d[1] = s * (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]);
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = s * (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]);
  d[n - 2] = -s * (-3.0 * v[n - 1] - 10.0 * v[n - 2] + 18.0 * v[n - 3] - 6.0 * v[n - 4] + v[n - 5]);
  d[n - 1] = -s * (-25.0 * v[n - 1] + 48.0 * v[n - 2] - 36.0 * v[n - 3] + 16.0 * v[n - 4] - 3.0 * v[n - 5]);
  return d;
}

FirstLawResult check_first_law(const FirstLawSeries& s) {
  const std::size_t n = s.E2_perp_bar.size();
  if (s.y2_bar.size() != n || s.S2_doublebar.size() != n || s.F0.size() != n || s.T0.size() != n) {
    throw ConfigError("first-law series must have equal lengths");
  }
  const auto dE = derivative_uniform(s.E2_perp_bar, s.dt);
  const auto dy = derivative_uniform(s.y2_bar, s.dt);
  const auto dS = derivative_uniform(s.S2_doublebar, s.dt);
  FirstLawResult r;
  r.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.residual[i] = dE[i] - s.F0[i] * dy[i] - s.T0[i] * dS[i];
    r.max_residual = std::max(r.max_residual, std::abs(r.residual[i]));
  }
  return r;
}

FirstLawResult check_first_law_leading(double dt, std::span<const double> E0_perp, std::span<const double> y0,
                                       std::span<const double> F0) {
  const std::size_t n = E0_perp.size();
  if (y0.size() != n || F0.size() != n) throw ConfigError("first-law series must have equal lengths");
  const auto dE = derivative_uniform(E0_perp, dt);
  const auto dy = derivative_uniform(y0, dt);
  FirstLawResult r;
  r.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.residual[i] = dE[i] - F0[i] * dy[i];
    r.max_residual = std::max(r.max_residual, std::abs(r.residual[i]));
  }
  return r;
}

double hertz_temperature_oracle(double E_perp, double y, const FrequencyModel& fm, std::size_t period_samples) {
  if (E_perp < 0.0) throw ConfigError("fast energy must be non-negative");
  if (period_samples < 3) throw ConfigError("need at least three samples per period");
  const double w = fm.omega(y);
  const double period = 2.0 * std::numbers::pi / w;
  const double h = period / static_cast<double>(period_samples);
  auto zeta_sq = [&](double t) {
    const double c = std::cos(w * t);
    return 2.0 * E_perp * c * c;
  };
  // Periodic integrand: the trapezoid rule reduces to a plain sum over one period.
  double sum = 0.5 * (zeta_sq(0.0) + zeta_sq(period));
  for (std::size_t i = 1; i < period_samples; ++i) sum += zeta_sq(static_cast<double>(i) * h);
  return sum * h / period;
}

double phase_space_volume(double E_perp, double y, const FrequencyModel& fm, double epsilon,
                          const PhaseSpaceVolumeOptions& opt) {
  if (E_perp < 0.0) throw ConfigError("fast energy must be non-negative");
  const double w = fm.omega(y);
  const double scale = opt.scaled ? epsilon : 1.0;
  if (opt.scaled) require_positive_epsilon(epsilon);
  if (opt.method == VolumeMethod::closed_form) return 2.0 * std::numbers::pi * scale * E_perp / w;
  if (E_perp == 0.0) return 0.0;
  if (opt.cells < 2) throw ConfigError("quadrature needs at least two cells per axis");

  // Region zeta^2 / 2 + (omega / scale)^2 z^2 / 2 <= E on its bounding box.
  const double zeta_max = std::sqrt(2.0 * E_perp);
  const double z_max = scale * zeta_max / w;
  const std::size_t n = opt.cells;
  const double dz = 2.0 * z_max / static_cast<double>(n);
  const double dzeta = 2.0 * zeta_max / static_cast<double>(n);
  std::vector<double> zs(n), zetas(n);
  for (std::size_t i = 0; i < n; ++i) {
    zs[i] = -z_max + (static_cast<double>(i) + 0.5) * dz;
    zetas[i] = -zeta_max + (static_cast<double>(i) + 0.5) * dzeta;
  }
  const double qz = 0.5 * (w / scale) * (w / scale);
  const std::uint64_t inside = count_quadratic_below(zs, zetas, qz, 0.5, E_perp);
  return static_cast<double>(inside) * dz * dzeta;
}

EquipartitionResult equipartition_check(const std::function<CartesianState(double)>& state, double epsilon,
                                        const FrequencyModel& fm, const Trajectory<7>& expansion,
                                        std::span<const double> times, std::size_t window_periods,
                                        double t_max) {
  require_positive_epsilon(epsilon);
  auto gap = [&](double t) {
    const CartesianState s = state(t);
    const double wz = fm.omega(s.y) * s.z / epsilon;
    return 0.5 * s.zeta * s.zeta - 0.5 * wz * wz;
  };
  EquipartitionResult r;
  for (double t : times) {
    const WindowedAverage avg = windowed_average(gap, t, window_periods, epsilon, expansion, t_max);
    r.max_gap = std::max(r.max_gap, std::abs(avg.value));
    r.any_one_sided = r.any_one_sided || avg.one_sided;
    const CartesianState s = state(t);
    r.sup_xi = std::max(r.sup_xi, std::abs(s.z * s.zeta));
  }
  return r;
}

}  // namespace fastslow

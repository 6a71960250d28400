#include "fastslow/lab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fastslow/parallel.hpp"

namespace fastslow::lab {

ResidualSettings residual_settings(const RunConfig& cfg, std::size_t workers) {
  ResidualSettings s;
  s.step_factor = cfg.step_factor;
  s.rtol = cfg.rtol;
  s.atol = cfg.atol;
  s.grid_points = cfg.grid_points;
  s.workers = workers;
  return s;
}

ControlOptions expansion_options(const RunConfig& cfg, double grid_spacing) {
  ControlOptions opt;
  opt.rtol = cfg.rtol;
  opt.atol = cfg.atol;
  opt.h_max = grid_spacing;
  return opt;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

ThermoReport run_thermo_analysis(const RunConfig& cfg, std::size_t workers) {
  cfg.validate();
  const FrequencyModel fm = cfg.frequency();
  const DerivedConstants dc = derived_constants(cfg.params, fm);
  ThermoReport rep;
  if (dc.degenerate_fast) {
    rep.degenerate = true;
    return rep;
  }
  const double th = dc.theta_star;
  rep.grid = uniform_grid(cfg.params.horizon, cfg.grid_points);
  const double dt = rep.grid[1] - rep.grid[0];
  const Trajectory<7> expansion = solve_expansion(cfg.params, fm, expansion_options(cfg, dt));

  const std::size_t n = rep.grid.size();
  std::vector<double> E0_perp(n), y0(n), y2_bar(n), p2_bar(n), dE_dp0(n), dE_dy0(n), partial_y0(n), p0(n);
  for (auto* v : {&rep.T0, &rep.F0, &rep.S0, &rep.S2_doublebar, &rep.E2_perp_bar, &rep.E2_par_bar, &rep.E2_bar}) {
    v->resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const ExpansionPoint pt = expansion_at(expansion, rep.grid[i], th);
    const CorrectorValues cv = correctors(pt.base, pt.corr.phi2_bar, cfg.epsilons.back(), fm, th);
    const ThermoExpansion te = expand_thermo(pt, cv, th, fm);
    const EnergyExpansion ee = energy_expansion(pt, cv, cfg.epsilons.back(), th, fm);
    const AveragedEnergyBundle b = averaged_energy_bundle(pt, fm, dc);
    const FrequencyJet j = fm.jet(pt.base.y0);
    rep.T0[i] = te.T0;
    rep.F0[i] = te.F0;
    rep.S0[i] = te.S0;
    rep.S2_doublebar[i] = te.S2_doublebar;
    rep.E2_perp_bar[i] = ee.E2_perp_bar;
    rep.E2_par_bar[i] = ee.E2_par_bar;
    rep.E2_bar[i] = ee.E2_bar;
    E0_perp[i] = ee.E0_perp;
    y0[i] = pt.base.y0;
    p0[i] = pt.base.p0;
    y2_bar[i] = pt.corr.y2_bar;
    p2_bar[i] = pt.corr.p2_bar;
    dE_dp0[i] = b.dE2_dp0;
    dE_dy0[i] = b.dE2_dy0;
    partial_y0[i] = th * j.d2 * pt.corr.y2_bar + j.d1 * pt.corr.theta2_bar;
    rep.e2_bar_sup = std::max(rep.e2_bar_sup, std::abs(ee.E2_bar));
    rep.energy_split_sup = std::max(rep.energy_split_sup, std::abs(ee.E2_bar - b.E2_bar));
    rep.averaged_identity_sup = std::max(rep.averaged_identity_sup, std::abs(averaged_identity_residual(pt, fm, th)));
    rep.closed_form_sup =
        std::max(rep.closed_form_sup, std::abs(pt.corr.theta2_bar - th * b.S2_doublebar_closed));
    if (i == 0) {
      rep.theta2_bar_initial = pt.corr.theta2_bar;
      rep.closed_form_initial = th * b.S2_doublebar_closed;
    }
  }

  rep.leading_first_law = check_first_law_leading(dt, E0_perp, y0, rep.F0).max_residual;
  const FirstLawResult fl = check_first_law({dt, rep.E2_perp_bar, y2_bar, rep.S2_doublebar, rep.F0, rep.T0});
  rep.first_law_residual = fl.residual;
  rep.second_first_law = fl.max_residual;
  rep.quasi_static_residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.quasi_static_residual[i] = fl.residual[i] - partial_y0[i] * p0[i];
    rep.quasi_static_first_law = std::max(rep.quasi_static_first_law, std::abs(rep.quasi_static_residual[i]));
  }

  const auto dy2 = derivative_uniform(y2_bar, dt);
  const auto dp2 = derivative_uniform(p2_bar, dt);
  for (std::size_t i = 0; i < n; ++i) {
    rep.hamilton_y_sup = std::max(rep.hamilton_y_sup, std::abs(dy2[i] - dE_dp0[i]));
    rep.hamilton_p_sup = std::max(rep.hamilton_p_sup, std::abs(dp2[i] + dE_dy0[i]));
  }

  // Full-system diagnostics per epsilon.
  const std::size_t m = cfg.epsilons.size();
  rep.epsilons = cfg.epsilons;
  rep.equipartition_gap.assign(m, 0.0);
  rep.sup_xi.assign(m, 0.0);
  rep.theta_gap.assign(m, 0.0);
  rep.temperature_gap.assign(m, 0.0);
  std::vector<char> one_sided(m, 0);
  std::vector<double> times;
  for (std::size_t i = 0; i < n; i += 10) times.push_back(rep.grid[i]);
  if (times.back() != rep.grid.back()) times.push_back(rep.grid.back());

  parallel_for(m, workers, [&](std::size_t k) {
    const double eps = cfg.epsilons[k];
    const Trajectory<4> full = solve_full_action_angle(cfg.params, fm, eps, cfg.step_factor, dt);
    auto cart = [&](double t) {
      return from_action_angle(ActionAngleState::from_array(dense_eval(full, t)), eps, fm);
    };
    const EquipartitionResult eq =
        equipartition_check(cart, eps, fm, expansion, times, cfg.window_periods, cfg.params.horizon);
    rep.equipartition_gap[k] = eq.max_gap;
    rep.sup_xi[k] = eq.sup_xi;
    one_sided[k] = eq.any_one_sided;
    for (double t : rep.grid) {
      const ActionAngleState s = ActionAngleState::from_array(dense_eval(full, t));
      const ExpansionPoint pt = expansion_at(expansion, t, th);
      rep.theta_gap[k] = std::max(rep.theta_gap[k], std::abs(s.theta - th));
      const double T_eps = thermo_state(s.theta, s.y, fm, dc).temperature;
      rep.temperature_gap[k] = std::max(rep.temperature_gap[k], std::abs(T_eps - th * fm.omega(pt.base.y0)) / eps);
    }
  });
  rep.equipartition_one_sided = std::any_of(one_sided.begin(), one_sided.end(), [](char c) { return c != 0; });
  return rep;
}

const std::vector<std::string>& twoscale_variables() {
  static const std::vector<std::string> vars = {"theta1", "phi2", "y2", "p2", "theta2"};
  return vars;
}

std::vector<TwoScaleRow> run_twoscale_analysis(const RunConfig& cfg, std::size_t workers) {
  cfg.validate();
  const FrequencyModel fm = cfg.frequency();
  const double th = derived_constants(cfg.params, fm).theta_star;
  const double T = cfg.params.horizon;
  const double dt = T / static_cast<double>(cfg.grid_points - 1);
  // phi0 advances by at least omega_min per unit time, so this covers 2 eps_max of r.
  const double extra = 4.0 * std::numbers::pi * cfg.epsilons.front() / fm.lower_bound();
  SystemParams extended = cfg.params;
  extended.horizon = dt * std::ceil((T + extra) / dt);

  const Trajectory<7> expansion = solve_expansion(extended, fm, expansion_options(cfg, dt));
  const double r_max = dense_eval(expansion, T)[0] / std::numbers::pi;
  TwoScaleGrid grid{cfg.r_points, cfg.s_points};

  std::vector<TwoScaleRow> rows(cfg.epsilons.size());
  parallel_for(rows.size(), workers, [&](std::size_t k) {
    const double eps = cfg.epsilons[k];
    const Trajectory<4> full = solve_full_action_angle(extended, fm, eps, cfg.step_factor, dt);
    auto at = [&](double t) {
      return std::pair{ActionAngleState::from_array(dense_eval(full, t)), expansion_at(expansion, t, th)};
    };
    auto limit_at = [&](double t, double s) {
      const ExpansionPoint pt = expansion_at(expansion, t, th);
      return std::pair{pt, two_scale_limits(s, pt.base, pt.corr.phi2_bar, fm, th)};
    };
    std::map<std::string, std::function<double(double)>> u;
    std::map<std::string, std::function<double(double, double)>> lim;
    u["theta1"] = [&](double t) { return (at(t).first.theta - th) / eps; };
    lim["theta1"] = [&](double t, double s) { return limit_at(t, s).second.theta1; };
    u["phi2"] = [&](double t) {
      const auto [s, pt] = at(t);
      return (s.phi - pt.base.phi0) / (eps * eps);
    };
    lim["phi2"] = [&](double t, double s) {
      const auto [pt, cv] = limit_at(t, s);
      return pt.corr.phi2_bar + cv.phi2;
    };
    u["y2"] = [&](double t) {
      const auto [s, pt] = at(t);
      return (s.y - pt.base.y0) / (eps * eps);
    };
    lim["y2"] = [&](double t, double s) {
      const auto [pt, cv] = limit_at(t, s);
      return pt.corr.y2_bar + cv.y2;
    };
    u["p2"] = [&](double t) {
      const auto [s, pt] = at(t);
      return (s.p - pt.base.p0) / (eps * eps);
    };
    lim["p2"] = [&](double t, double s) {
      const auto [pt, cv] = limit_at(t, s);
      return pt.corr.p2_bar + cv.p2;
    };
    u["theta2"] = [&](double t) {
      const auto [s, pt] = at(t);
      const double theta1_osc = correctors(pt.base, pt.corr.phi2_bar, eps, fm, th).theta1;
      return ((s.theta - th) / eps - theta1_osc) / eps;
    };
    lim["theta2"] = [&](double t, double s) {
      const auto [pt, cv] = limit_at(t, s);
      return pt.corr.theta2_bar + cv.theta2;
    };

    TwoScaleRow row;
    row.epsilon = eps;
    for (const auto& name : twoscale_variables()) {
      const TwoScaleError err = nonlinear_two_scale_error(u[name], lim[name], expansion, eps, r_max, grid);
      row.sup_error[name] = err.sup_error;
      row.clamped = row.clamped || err.clamped;
    }
    rows[k] = row;
  });
  return rows;
}

std::vector<IdentityCheck> run_identity_suite(const RunConfig& cfg, std::size_t workers) {
  (void)workers;
  cfg.validate();
  const FrequencyModel fm = cfg.frequency();
  const DerivedConstants dc = derived_constants(cfg.params, fm);
  const double th = dc.theta_star;
  const std::vector<double> grid = uniform_grid(cfg.params.horizon, cfg.grid_points);
  const Trajectory<7> expansion = solve_expansion(cfg.params, fm, expansion_options(cfg, grid[1] - grid[0]));

  double e1 = 0.0, avg_identity = 0.0, e2_bar = 0.0, closed = 0.0, recon0 = 0.0;
  for (double t : grid) {
    const ExpansionPoint pt = expansion_at(expansion, t, th);
    for (double eps : cfg.epsilons) {
      e1 = std::max(e1, std::abs(first_order_energy_identity(pt.base, eps, fm, th, cfg.flip_corrector_sign)));
    }
    avg_identity = std::max(avg_identity, std::abs(averaged_identity_residual(pt, fm, th)));
    const CorrectorValues cv = correctors(pt.base, pt.corr.phi2_bar, cfg.epsilons.back(), fm, th);
    e2_bar = std::max(e2_bar, std::abs(energy_expansion(pt, cv, cfg.epsilons.back(), th, fm).E2_bar));
    closed = std::max(closed, std::abs(pt.corr.theta2_bar - th * averaged_energy_bundle(pt, fm, dc).S2_doublebar_closed));
  }
  const ExpansionPoint start = expansion_at(expansion, 0.0, th);
  const ActionAngleState init = initial_action_angle(cfg.params, fm);
  for (double eps : cfg.epsilons) {
    const CorrectorValues cv = correctors(start.base, start.corr.phi2_bar, eps, fm, th);
    const ActionAngleState hat = reconstruct(eps, start, cv, th);
    for (double d : {hat.phi - init.phi, hat.theta - init.theta, hat.y - init.y, hat.p - init.p}) {
      recon0 = std::max(recon0, std::abs(d));
    }
  }

  // Deterministic sample states for the pointwise identities.
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> uy(-3.0, 3.0), up(-2.0, 2.0), uth(1e-6, 1.0), uphi(0.0, 5.0);
  double rhs_forms = 0.0, round_trip = 0.0, energy_agree = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const ActionAngleState s{uphi(rng), uth(rng), uy(rng), up(rng)};
    for (double eps : cfg.epsilons) {
      const auto a = action_angle_rhs(s, eps, fm).to_array();
      const auto b = action_angle_rhs_log_form(s, eps, fm).to_array();
      for (std::size_t i = 0; i < 4; ++i) {
        rhs_forms = std::max(rhs_forms, std::abs(a[i] - b[i]) / (1.0 + std::abs(a[i])));
      }
      const CartesianState c = from_action_angle(s, eps, fm);
      const ActionAngleState back = to_action_angle(c, eps, fm, s.phi).state;
      for (double d : {back.phi - s.phi, back.theta - s.theta, back.y - s.y, back.p - s.p}) {
        round_trip = std::max(round_trip, std::abs(d));
      }
      energy_agree = std::max(energy_agree, std::abs(energy_cartesian(c, eps, fm) - energy_action_angle(s, eps, fm)));
    }
  }

  std::uniform_real_distribution<double> probe(-10.0, 10.0);
  std::vector<double> probes(100);
  for (double& y : probes) y = probe(rng);
  const double fd = check_derivatives(fm, probes).worst();

  auto make = [](std::string name, double value, double tol) {
    return IdentityCheck{std::move(name), value, tol, value <= tol};
  };
  return {
      make("first_order_energy_vanishes", e1, 1e-13),
      make("averaged_correction_identity", avg_identity, 1e-8),
      make("averaged_second_order_energy_vanishes", e2_bar, 1e-8),
      make("averaged_entropy_closed_form", closed, 1e-8),
      make("rhs_forms_agree", rhs_forms, 1e-14),
      make("transform_round_trip", round_trip, 1e-12),
      make("energy_forms_agree", energy_agree, 1e-13),
      make("reconstruction_matches_initial_data", recon0, 1e-14),
      make("derivative_finite_differences", fd, 1e-6),
  };
}

}  // namespace fastslow::lab

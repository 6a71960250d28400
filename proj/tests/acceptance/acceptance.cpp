// Desk-scale acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fastslow/expansion.hpp"
#include "fastslow/lab/analysis.hpp"
#include "fastslow/lab/config.hpp"
#include "fastslow/parallel.hpp"
#include "fastslow/thermo.hpp"

using namespace fastslow;
using namespace fastslow::lab;

namespace {

struct Tally {
  int failed = 0;

  void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s criterion %2d  %-42s %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }

  // Evaluates one criterion; an exception counts as a failure of that criterion only.
  void run(int id, const std::string& what, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(id, what, ok, detail);
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + sci(v[i]);
  return s;
}

RunConfig desk_config() {
  RunConfig cfg;  // defaults are the desk-scale run
  cfg.output_directory = "acceptance_out";
  return cfg;
}

}  // namespace

int main() {
  const std::size_t workers = worker_count_from_env();
  const RunConfig cfg = desk_config();
  const FrequencyModel fm = cfg.frequency();
  const DerivedConstants dc = derived_constants(cfg.params, fm);
  const std::vector<double> grid = uniform_grid(cfg.params.horizon, cfg.grid_points);
  const double dt = grid[1] - grid[0];
  Tally tally;

  std::printf("kernel path: %s, workers: %zu\n", std::string(to_string(active_kernel_path())).c_str(), workers);

  ResidualReport sweep;
  bool sweep_ok = true;
  try {
    sweep = residual_norms(cfg.params, fm, cfg.epsilons, residual_settings(cfg, workers));
  } catch (const std::exception& e) {
    sweep_ok = false;
    std::printf("residual sweep failed: %s\n", e.what());
  }

  tally.run(1, "energy conservation", [&](std::string& d) {
    if (!sweep_ok) return false;
    double drift = 0.0, ref = 0.0;
    for (const auto& r : sweep.rows) {
      drift = std::max(drift, r.energy_drift);
      ref = std::max(ref, r.reference_error);
    }
    d = "max drift " + sci(drift) + " (reference error " + sci(ref) + ")";
    return drift <= 1e-8;
  });

  tally.run(2, "leading-order convergence", [&](std::string& d) {
    if (!sweep_ok) return false;
    const auto& y = sweep.orders.at("y_leading").fit;
    const auto& p = sweep.orders.at("p_leading").fit;
    d = "y order " + fixed(y.slope) + " R2 " + fixed(y.r_squared) + ", p order " + fixed(p.slope) + " R2 " +
        fixed(p.r_squared);
    return y.slope >= 1.9 && p.slope >= 1.9 && y.r_squared >= 0.98 && p.r_squared >= 0.98;
  });

  tally.run(3, "first-order theta corrector", [&](std::string& d) {
    if (!sweep_ok) return false;
    const auto& f = sweep.orders.at("theta_first").fit;
    d = "order " + fixed(f.slope) + " R2 " + fixed(f.r_squared);
    return f.slope >= 1.9;
  });

  tally.run(4, "second-order residuals / eps^2 decrease", [&](std::string& d) {
    if (!sweep_ok) return false;
    bool ok = true;
    for (const char* name : {"y_second", "p_second", "phi_second", "theta_second"}) {
      std::vector<double> v;
      for (std::size_t i = 0; i < sweep.rows.size(); ++i) v.push_back(sweep.normalized(i, name));
      ok = ok && strictly_decreasing(v);
      d += std::string(name) + " [" + join(v) + "] ";
    }
    return ok;
  });

  const Trajectory<7> expansion = [&] {
    ControlOptions opt = expansion_options(cfg, dt);
    return solve_expansion(cfg.params, fm, opt);
  }();

  tally.run(5, "first-order energy identity", [&](std::string& d) {
    double worst = 0.0;
    for (double eps : cfg.epsilons) {
      for (double t : grid) {
        const ExpansionPoint pt = expansion_at(expansion, t, dc.theta_star);
        worst = std::max(worst, std::abs(first_order_energy_identity(pt.base, eps, fm, dc.theta_star)));
      }
    }
    d = "max " + sci(worst);
    return worst <= 1e-13;
  });

  ThermoReport thermo;
  bool thermo_ok = true;
  try {
    thermo = run_thermo_analysis(cfg, workers);
  } catch (const std::exception& e) {
    thermo_ok = false;
    std::printf("thermo analysis failed: %s\n", e.what());
  }

  tally.run(6, "averaged correction identity", [&](std::string& d) {
    if (!thermo_ok) return false;
    d = "max " + sci(thermo.averaged_identity_sup);
    return thermo.averaged_identity_sup <= 1e-8;
  });

  tally.run(7, "averaged second-order energy vanishes", [&](std::string& d) {
    if (!thermo_ok) return false;
    d = "max " + sci(thermo.e2_bar_sup);
    return thermo.e2_bar_sup <= 1e-8;
  });

  tally.run(8, "averaged entropy closed form", [&](std::string& d) {
    if (!thermo_ok) return false;
    const double expected = -0.00634765625;
    d = "max " + sci(thermo.closed_form_sup) + ", t=0: " + sci(thermo.theta2_bar_initial) + " / " +
        sci(thermo.closed_form_initial);
    return thermo.closed_form_sup <= 1e-8 && std::abs(thermo.theta2_bar_initial - expected) <= 1e-15 &&
           std::abs(thermo.closed_form_initial - expected) <= 1e-15;
  });

  tally.run(9, "Hamilton-form equations", [&](std::string& d) {
    if (!thermo_ok) return false;
    d = "y " + sci(thermo.hamilton_y_sup) + ", p " + sci(thermo.hamilton_p_sup);
    return thermo.hamilton_y_sup <= 1e-7 && thermo.hamilton_p_sup <= 1e-7;
  });

  tally.run(10, "first law, leading and second order", [&](std::string& d) {
    if (!thermo_ok) return false;
    d = "leading " + sci(thermo.leading_first_law) + ", second " + sci(thermo.second_first_law) +
        " (y0 held fixed: " + sci(thermo.quasi_static_first_law) + ")";
    return thermo.leading_first_law <= 1e-8 && thermo.second_first_law <= 1e-6;
  });

  tally.run(11, "temperature and volume oracles", [&](std::string& d) {
    double t_gap = 0.0, v_gap = 0.0;
    PhaseSpaceVolumeOptions quad;
    quad.method = VolumeMethod::area_quadrature;
    for (int k = 0; k < 10; ++k) {
      const double E = 0.25 + 0.25 * k, y = -2.0 + 0.45 * k;
      t_gap = std::max(t_gap, std::abs(hertz_temperature_oracle(E, y, fm, 64) - E));
      const double exact = phase_space_volume(E, y, fm, 0.01);
      v_gap = std::max(v_gap, std::abs(phase_space_volume(E, y, fm, 0.01, quad) / exact - 1.0));
    }
    const double pi_gap = std::abs(phase_space_volume(1.0, 0.0, fm, 0.01) - std::numbers::pi);
    d = "temperature " + sci(t_gap) + ", volume rel " + sci(v_gap) + ", |Gamma(1,0) - pi| " + sci(pi_gap);
    return t_gap <= 1e-10 && v_gap <= 5e-3 && pi_gap <= 1e-15;
  });

  tally.run(12, "equipartition", [&](std::string& d) {
    if (!thermo_ok) return false;
    const OrderFit xi = estimate_order(thermo.epsilons, thermo.sup_xi);
    d = "gaps [" + join(thermo.equipartition_gap) + "], sup xi order " + fixed(xi.slope);
    return strictly_decreasing(thermo.equipartition_gap) && xi.slope >= 0.9;
  });

  tally.run(13, "two-scale convergence", [&](std::string& d) {
    const std::vector<TwoScaleRow> rows = run_twoscale_analysis(cfg, workers);
    bool ok = true;
    for (const auto& name : twoscale_variables()) {
      std::vector<double> v;
      for (const auto& r : rows) {
        v.push_back(r.sup_error.at(name));
        ok = ok && !r.clamped;
      }
      ok = ok && strictly_decreasing(v);
      d += name + " [" + join(v) + "] ";
    }
    return ok;
  });

  tally.run(14, "Cartesian versus action-angle", [&](std::string& d) {
    const double eps = 0.05;
    const Trajectory<4> cart = solve_full_cartesian(cfg.params, fm, eps, cfg.step_factor, dt);
    const Trajectory<4> aa = solve_full_action_angle(cfg.params, fm, eps, cfg.step_factor, dt);
    double gap[4] = {0, 0, 0, 0};
    for (double t : grid) {
      const ActionAngleState direct = ActionAngleState::from_array(dense_eval(aa, t));
      const ActionAngleState conv =
          to_action_angle(CartesianState::from_array(dense_eval(cart, t)), eps, fm, direct.phi).state;
      gap[0] = std::max(gap[0], std::abs(conv.phi - direct.phi));
      gap[1] = std::max(gap[1], std::abs(conv.theta - direct.theta));
      gap[2] = std::max(gap[2], std::abs(conv.y - direct.y));
      gap[3] = std::max(gap[3], std::abs(conv.p - direct.p));
    }
    d = "phi " + sci(gap[0]) + ", theta " + sci(gap[1]) + ", y " + sci(gap[2]) + ", p " + sci(gap[3]);
    return *std::max_element(gap, gap + 4) <= 1e-6;
  });

  tally.run(15, "degenerate controls", [&](std::string& d) {
    RunConfig flat = cfg;
    override_preset(flat, FrequencyPreset::constant);
    const FrequencyModel c = flat.frequency();
    const double th = derived_constants(flat.params, c).theta_star;
    double theta_gap = 0.0, p_gap = 0.0, corr = 0.0;
    for (double eps : flat.epsilons) {
      const Trajectory<4> full = solve_full_action_angle(flat.params, c, eps, flat.step_factor, dt);
      for (double t : grid) {
        const ActionAngleState s = ActionAngleState::from_array(dense_eval(full, t));
        theta_gap = std::max(theta_gap, std::abs(s.theta - th));
        p_gap = std::max(p_gap, std::abs(s.p - flat.params.p_star));
        const HomogenizedState base{c.omega(s.y) * t, s.y, s.p, th};
        const CorrectorValues cv = correctors(base, 0.0, eps, c, th);
        for (double v : {cv.theta1, cv.phi2, cv.y2, cv.p2, cv.theta2}) corr = std::max(corr, std::abs(v));
      }
    }
    std::vector<double> probes;
    for (int i = 0; i < 100; ++i) probes.push_back(-10.0 + 20.0 * i / 99.0);
    double deriv = 0.0;
    for (const FrequencyModel& m : {fm, c}) {
      deriv = std::max(deriv, check_derivatives(m, probes).worst());
    }
    RunConfig custom = cfg;
    override_preset(custom, FrequencyPreset::custom);
    deriv = std::max(deriv, check_derivatives(custom.frequency(), probes).worst());
    d = "theta " + sci(theta_gap) + ", p " + sci(p_gap) + ", correctors " + sci(corr) + ", derivatives rel " +
        sci(deriv);
    return theta_gap <= 1e-12 && p_gap <= 1e-12 && corr <= 1e-12 && deriv <= 1e-6;
  });

  std::printf("%d criteria failed\n", tally.failed);
  return tally.failed == 0 ? 0 : 1;
}

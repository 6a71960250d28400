#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fastslow/thermo.hpp"
#include "support.hpp"

using namespace fastslow;

namespace {

ControlOptions tight() {
  ControlOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  opt.h_max = 1e-3;
  return opt;
}

}  // namespace

TEST_SUITE("thermo") {
  TEST_CASE("thermodynamic state at the initial point") {
    const FrequencyModel fm = testing_support::sine_model();
    const DerivedConstants dc = derived_constants(testing_support::test_params(), fm);
    const ThermoState s = thermo_state(0.25, 0.0, fm, dc);
    CHECK(s.temperature == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(s.entropy) <= 1e-15);
    CHECK(s.force == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(thermo_state(0.0, 0.0, fm, dc), std::domain_error);
    CHECK_THROWS_AS(thermo_state(-1.0, 0.0, fm, dc), std::domain_error);
  }

  TEST_CASE("entropy is monotone in the action") {
    const FrequencyModel fm = testing_support::sine_model();
    const DerivedConstants dc = derived_constants(testing_support::test_params(), fm);
    double prev = -INFINITY;
    for (double th = 0.01; th < 3.0; th += 0.01) {
      const double s = thermo_state(th, 0.3, fm, dc).entropy;
      CHECK(s > prev);
      prev = s;
    }
  }

  TEST_CASE("leading coefficients of the bundle") {
    const FrequencyModel fm = testing_support::custom_model();
    const SystemParams p{0.2, 0.7, 1.3, 1.0};
    const DerivedConstants dc = derived_constants(p, fm);
    const ExpansionPoint pt{{0.0, 0.9, -0.4, dc.theta_star}, {0.01, 0.02, 0.03, 0.04}};
    const AveragedEnergyBundle b = averaged_energy_bundle(pt, fm, dc);
    const FrequencyJet j = fm.jet(0.9);
    CHECK(b.coefficient_y2_bar == doctest::Approx(dc.theta_star * j.d1).epsilon(1e-15));
    CHECK(b.coefficient_S2_doublebar == doctest::Approx(dc.theta_star * j.value).epsilon(1e-15));
    const ThermoState ts = thermo_state(dc.theta_star, 0.9, fm, dc);
    CHECK(b.coefficient_y2_bar == doctest::Approx(ts.force).epsilon(1e-15));
    CHECK(b.coefficient_S2_doublebar == doctest::Approx(ts.temperature).epsilon(1e-15));
  }

  TEST_CASE("Hamilton partials match finite differences of the averaged energy") {
    for (const FrequencyModel& fm : {testing_support::sine_model(), testing_support::custom_model()}) {
      const SystemParams p = testing_support::test_params();
      const DerivedConstants dc = derived_constants(p, fm);
      std::mt19937_64 rng(11);
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      for (int k = 0; k < 50; ++k) {
        const ExpansionPoint pt{{0.0, u(rng), u(rng), dc.theta_star}, {0.0, 0.0, 0.05 * u(rng), 0.05 * u(rng)}};
        auto energy = [&](double y, double pp) {
          ExpansionPoint q = pt;
          q.base.y0 = y;
          q.base.p0 = pp;
          return averaged_energy_bundle(q, fm, dc).E2_bar;
        };
        const double h = 1e-5;
        const double dy = (energy(pt.base.y0 + h, pt.base.p0) - energy(pt.base.y0 - h, pt.base.p0)) / (2 * h);
        const double dp = (energy(pt.base.y0, pt.base.p0 + h) - energy(pt.base.y0, pt.base.p0 - h)) / (2 * h);
        const AveragedEnergyBundle b = averaged_energy_bundle(pt, fm, dc);
        CHECK(b.dE2_dy0 == doctest::Approx(dy).epsilon(1e-6).scale(1e-3));
        CHECK(b.dE2_dp0 == doctest::Approx(dp).epsilon(1e-6).scale(1e-3));
      }
    }
  }

  TEST_CASE("energy expansion splits consistently") {
    const FrequencyModel fm = testing_support::sine_model();
    const SystemParams p = testing_support::test_params();
    const DerivedConstants dc = derived_constants(p, fm);
    const ExpansionPoint pt{{0.0, 0.0, 1.0, dc.theta_star}, initial_corrections(p, fm)};
    const CorrectorValues cv = correctors(pt.base, pt.corr.phi2_bar, 0.01, fm, dc.theta_star);
    const EnergyExpansion e = energy_expansion(pt, cv, 0.01, dc.theta_star, fm);
    CHECK(e.E0_perp + e.E0_par == doctest::Approx(dc.e_star).epsilon(1e-15));
    CHECK(std::abs(e.E1_perp_osc + e.E1_par_osc) <= 1e-15);
    CHECK(e.E2_bar == doctest::Approx(e.E2_perp_bar + e.E2_par_bar).epsilon(1e-15));
    CHECK(std::abs(e.E2_bar) <= 1e-14);
    // Full energy of the reconstruction agrees with E* through second order.
    for (double eps : {0.02, 0.01}) {
      const CorrectorValues c = correctors(pt.base, pt.corr.phi2_bar, eps, fm, dc.theta_star);
      const ActionAngleState s = reconstruct(eps, pt, c, dc.theta_star);
      CHECK(std::abs(energy_action_angle(s, eps, fm) - dc.e_star) <= 1e-14);
    }
  }

  TEST_CASE("averaged second-order entropy closed form along the expansion") {
    const FrequencyModel fm = testing_support::sine_model();
    const SystemParams p = testing_support::test_params();
    const DerivedConstants dc = derived_constants(p, fm);
    const Trajectory<7> traj = solve_expansion(p, fm, tight());
    for (int i = 0; i <= 50; ++i) {
      const ExpansionPoint pt = expansion_at(traj, i * 0.02, dc.theta_star);
      const AveragedEnergyBundle b = averaged_energy_bundle(pt, fm, dc);
      CHECK(pt.corr.theta2_bar / dc.theta_star == doctest::Approx(b.S2_doublebar_closed).epsilon(1e-9));
      CHECK(std::abs(b.E2_bar) <= 1e-10);
    }
  }

  TEST_CASE("fourth-order finite differences") {
    const double dt = 0.1;
    std::vector<double> quartic(11), sine_coarse(21), sine_fine(41);
    for (std::size_t i = 0; i < quartic.size(); ++i) {
      const double t = i * dt;
      quartic[i] = 1 - t + 2 * t * t - t * t * t + 0.5 * t * t * t * t;
    }
    const auto dq = derivative_uniform(quartic, dt);
    for (std::size_t i = 0; i < quartic.size(); ++i) {
      const double t = i * dt;
      CHECK(dq[i] == doctest::Approx(-1 + 4 * t - 3 * t * t + 2 * t * t * t).epsilon(1e-10));
    }
    auto err = [](std::vector<double>& v, double h) {
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(2.0 * i * h);
      const auto d = derivative_uniform(v, h);
      double e = 0;
      for (std::size_t i = 0; i < v.size(); ++i) e = std::max(e, std::abs(d[i] - 2.0 * std::cos(2.0 * i * h)));
      return e;
    };
    const double e1 = err(sine_coarse, 0.05), e2 = err(sine_fine, 0.025);
    CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.1));
    const std::vector<double> four{1, 2, 3, 4};
    CHECK_THROWS_AS(derivative_uniform(four, 0.1), ConfigError);
  }

  TEST_CASE("leading-order first law") {
    for (const FrequencyModel& fm : {testing_support::sine_model(), testing_support::constant_model()}) {
      const SystemParams p = testing_support::test_params();
      const DerivedConstants dc = derived_constants(p, fm);
      const Trajectory<3> traj = solve_homogenized(p, fm, tight());
      const std::size_t n = 401;
      const double dt = 1.0 / (n - 1);
      std::vector<double> E(n), y(n), F(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double yy = dense_eval(traj, i * dt)[1];
        const FrequencyJet j = fm.jet(yy);
        y[i] = yy;
        E[i] = dc.theta_star * j.value;
        F[i] = dc.theta_star * j.d1;
      }
      CHECK(check_first_law_leading(dt, E, y, F).max_residual <= 1e-8);
    }
  }

  TEST_CASE("first law for synthetic consistent series") {
    // E = F y + T S with F, T constant: the residual vanishes up to rounding.
    FirstLawSeries s;
    s.dt = 0.01;
    for (int i = 0; i <= 100; ++i) {
      const double t = i * s.dt;
      const double y = std::sin(t), S = t * t;
      s.y2_bar.push_back(y);
      s.S2_doublebar.push_back(S);
      s.F0.push_back(0.7);
      s.T0.push_back(1.3);
      s.E2_perp_bar.push_back(0.7 * y + 1.3 * S);
    }
    CHECK(check_first_law(s).max_residual <= 1e-10);
    s.T0.pop_back();
    CHECK_THROWS_AS(check_first_law(s), ConfigError);
  }

  TEST_CASE("fast temperature is the mean of the squared fast velocity") {
    const FrequencyModel fm = testing_support::sine_model();
    CHECK(hertz_temperature_oracle(0.5, 0.0, fm, 64) == doctest::Approx(0.5).epsilon(1e-10));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int k = 0; k < 20; ++k) {
      const double E = u(rng), y = u(rng);
      CHECK(hertz_temperature_oracle(E, y, fm, 32) == doctest::Approx(E).epsilon(1e-12));
    }
  }

  TEST_CASE("phase-space volume") {
    const FrequencyModel c = testing_support::constant_model();
    CHECK(phase_space_volume(1.0, 0.0, c, 0.1) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
    PhaseSpaceVolumeOptions scaled;
    scaled.scaled = true;
    CHECK(phase_space_volume(1.0, 0.0, c, 0.1, scaled) == doctest::Approx(0.1 * std::numbers::pi).epsilon(1e-15));

    const FrequencyModel fm = testing_support::sine_model();
    PhaseSpaceVolumeOptions quad;
    quad.method = VolumeMethod::area_quadrature;
    quad.cells = 1000;
    for (int k = 0; k < 10; ++k) {
      const double E = 0.2 + 0.3 * k, y = -1.0 + 0.25 * k;
      const double exact = phase_space_volume(E, y, fm, 0.02);
      CHECK(std::abs(phase_space_volume(E, y, fm, 0.02, quad) / exact - 1.0) <= 5e-3);
    }
    CHECK(phase_space_volume(0.0, 0.0, fm, 0.02, quad) == 0.0);
    CHECK_THROWS_AS(phase_space_volume(-1.0, 0.0, fm, 0.02), ConfigError);
  }

  TEST_CASE("phase-space volume is an adiabatic invariant of the leading order") {
    // Gamma = 2 pi E0perp / omega = 2 pi theta*, constant along the homogenized flow.
    const FrequencyModel fm = testing_support::sine_model();
    const SystemParams p = testing_support::test_params();
    const DerivedConstants dc = derived_constants(p, fm);
    const Trajectory<3> traj = solve_homogenized(p, fm, tight());
    for (int i = 0; i <= 10; ++i) {
      const double y = dense_eval(traj, 0.1 * i)[1];
      CHECK(phase_space_volume(dc.theta_star * fm.omega(y), y, fm, 0.01) ==
            doctest::Approx(2 * std::numbers::pi * dc.theta_star).epsilon(1e-14));
    }
  }

  TEST_CASE("equipartition for the constant frequency") {
    const FrequencyModel fm = testing_support::constant_model();
    const SystemParams p = testing_support::test_params();
    const Trajectory<7> traj = solve_expansion(p, fm, tight());
    const double eps = 0.02, w = 2.0;
    auto exact = [&](double t) {
      CartesianState s;
      s.y = p.y_star + p.p_star * t;
      s.eta = p.p_star;
      s.z = eps * p.u_star / w * std::sin(w * t / eps);
      s.zeta = p.u_star * std::cos(w * t / eps);
      return s;
    };
    const std::vector<double> times{0.25, 0.5, 0.75};
    const EquipartitionResult r = equipartition_check(exact, eps, fm, traj, times, 8);
    CHECK(r.max_gap <= 1e-10);
    CHECK_FALSE(r.any_one_sided);
    CHECK(r.sup_xi <= eps * p.u_star * p.u_star / w + 1e-15);

    SystemParams cold = p;
    cold.u_star = 0.0;
    const Trajectory<7> cold_traj = solve_expansion(cold, fm, tight());
    auto rest = [&](double t) { return CartesianState{cold.y_star + cold.p_star * t, cold.p_star, 0.0, 0.0}; };
    const EquipartitionResult z = equipartition_check(rest, eps, fm, cold_traj, times, 8);
    CHECK(z.max_gap == 0.0);
    CHECK(z.sup_xi == 0.0);
  }
}

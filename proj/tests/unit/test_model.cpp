#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fastslow/errors.hpp"
#include "fastslow/model.hpp"
#include "support.hpp"

using namespace fastslow;
using testing_support::constant_model;
using testing_support::custom_model;
using testing_support::sine_model;

TEST_SUITE("model") {
  TEST_CASE("sine preset values and bounds") {
    const auto fm = sine_model();
    const FrequencyJet j = fm.jet(0.0);
    CHECK(j.value == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(j.d1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(j.d2) < 1e-15);
    CHECK(j.d3 == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(fm.lower_bound() == 1.0);
    CHECK(fm.upper_bound() == 3.0);
    const FrequencyJet top = fm.jet(std::numbers::pi / 2);
    CHECK(top.value == doctest::Approx(3.0));
    CHECK(top.d2 == doctest::Approx(-1.0));
  }

  TEST_CASE("constant preset has vanishing derivatives") {
    const auto fm = constant_model(3.0);
    for (double y : {-7.0, 0.0, 0.3, 12.0}) {
      const FrequencyJet j = fm.jet(y);
      CHECK(j.value == 3.0);
      CHECK(j.d1 == 0.0);
      CHECK(j.d2 == 0.0);
      CHECK(j.d3 == 0.0);
    }
  }

  TEST_CASE("non-positive lower bound is rejected") {
    const std::vector<double> touching{1.0, 1.0};
    CHECK_THROWS_AS(make_frequency(FrequencyPreset::sine, touching), ConfigError);
    const std::vector<double> negative{-1.0};
    CHECK_THROWS_AS(make_frequency(FrequencyPreset::constant, negative), ConfigError);
    const std::vector<double> wrong_count{2.0, 1.0, 0.5};
    CHECK_THROWS_AS(make_frequency(FrequencyPreset::sine, wrong_count), ConfigError);
    const std::vector<double> even_custom{2.0, 1.0};
    CHECK_THROWS_AS(make_frequency(FrequencyPreset::custom, even_custom), ConfigError);
  }

  TEST_CASE("preset names") {
    CHECK(parse_preset("sine") == FrequencyPreset::sine);
    CHECK(parse_preset("constant") == FrequencyPreset::constant);
    CHECK(parse_preset("custom-coefficients") == FrequencyPreset::custom);
    CHECK_THROWS_AS(parse_preset("cosine"), ConfigError);
  }

  TEST_CASE("custom series matches direct evaluation") {
    const auto fm = custom_model();
    for (double y : {-2.0, 0.0, 0.7, 5.0}) {
      const double direct = 3.0 + 0.5 * std::cos(y) + 0.4 * std::sin(y) + 0.2 * std::cos(2 * y) - 0.3 * std::sin(2 * y);
      const double d1 = -0.5 * std::sin(y) + 0.4 * std::cos(y) - 0.4 * std::sin(2 * y) - 0.6 * std::cos(2 * y);
      CHECK(fm.omega(y) == doctest::Approx(direct).epsilon(1e-14));
      CHECK(fm.jet(y).d1 == doctest::Approx(d1).epsilon(1e-13));
    }
  }

  TEST_CASE("log derivatives") {
    const auto fm = sine_model();
    const LogDerivatives at0 = log_derivatives(fm, 0.0);
    CHECK(at0.L == doctest::Approx(std::log(2.0)));
    CHECK(at0.dyL == doctest::Approx(0.5));
    CHECK(at0.dy2L == doctest::Approx(-0.25));
    CHECK(std::abs(log_derivatives(fm, std::numbers::pi / 2).dyL) < 1e-16);
    const LogDerivatives c = log_derivatives(constant_model(3.0), 1.2);
    CHECK(c.dyL == 0.0);
    CHECK(c.dy2L == 0.0);
    CHECK(c.dy3L == 0.0);

    // Third derivative of log omega against a fourth-order difference of log omega itself.
    const double h = 1e-2;
    for (double y : {-1.3, 0.4, 2.2}) {
      auto L = [&](double x) { return std::log(fm.omega(x)); };
      const double fd3 = (-L(y - 2 * h) + 2 * L(y - h) - 2 * L(y + h) + L(y + 2 * h)) / (2 * h * h * h);
      CHECK(log_derivatives(fm, y).dy3L == doctest::Approx(fd3).epsilon(1e-3));
      CHECK(log_derivatives(fm, y).dyL * fm.omega(y) == fm.jet(y).d1);
    }
  }

  TEST_CASE("derived constants for the unit initial data") {
    const auto fm = sine_model();
    const DerivedConstants dc = derived_constants(testing_support::test_params(), fm);
    CHECK(dc.theta_star == 0.25);
    CHECK(dc.e_star == 1.0);
    CHECK(dc.entropy_constant == doctest::Approx(-std::log(0.25)));
    // Hand evaluation with omega = 2, omega' = 1, omega'' = 0, p* = 1:
    // -(1/8)^2/2 - 5 (1/4) / (16 * 8) + 0 - 1 / (4 * 16)
    const double expected = -0.5 / 64.0 - 5.0 * 0.25 / 128.0 - 1.0 / 64.0;
    CHECK(dc.c_sbarbar2 == doctest::Approx(expected).epsilon(1e-15));
    CHECK(dc.c_sbarbar2 == doctest::Approx(-0.033203125).epsilon(1e-15));
    CHECK_FALSE(dc.degenerate_fast);
  }

  TEST_CASE("zero fast velocity is flagged, not rejected") {
    SystemParams p = testing_support::test_params();
    p.u_star = 0.0;
    const DerivedConstants dc = derived_constants(p, sine_model());
    CHECK(dc.theta_star == 0.0);
    CHECK(dc.degenerate_fast);
  }

  TEST_CASE("parameter validation") {
    SystemParams p;
    p.horizon = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.horizon = 1.0;
    p.y_star = std::nan("");
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }

  TEST_CASE("finite-difference validation at 100 random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<double> probes(100);
    for (double& y : probes) y = u(rng);
    for (const auto& fm : {sine_model(), constant_model(), custom_model(), sine_model(5.0, -2.5)}) {
      const DerivativeCheck dc = check_derivatives(fm, probes);
      CHECK(dc.worst() <= 1e-6);
    }
  }

  TEST_CASE("finite-difference validation detects a wrong derivative") {
    // A step that is far too large makes the differences disagree, which the check must report.
    const std::vector<double> probes{0.3, 1.1};
    CHECK(check_derivatives(sine_model(), probes, 0.5).worst() > 1e-6);
  }
}

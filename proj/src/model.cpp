#include "fastslow/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fastslow/errors.hpp"

namespace fastslow {

std::string_view to_string(FrequencyPreset preset) {
  switch (preset) {
    case FrequencyPreset::constant:
      return "constant";
    case FrequencyPreset::sine:
      return "sine";
    case FrequencyPreset::custom:
      return "custom";
  }
  return "unknown";
}

FrequencyPreset parse_preset(std::string_view name) {
  if (name == "constant") return FrequencyPreset::constant;
  if (name == "sine") return FrequencyPreset::sine;
  if (name == "custom" || name == "custom-coefficients") return FrequencyPreset::custom;
  throw ConfigError("unknown frequency preset '" + std::string(name) + "'");
}

FrequencyModel FrequencyModel::make(FrequencyPreset preset, std::span<const double> coefficients) {
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw ConfigError("frequency coefficients must be finite");
  }

  FrequencyModel fm;
  fm.preset_ = preset;
  fm.coefficients_.assign(coefficients.begin(), coefficients.end());

  switch (preset) {
    case FrequencyPreset::constant:
      if (coefficients.size() != 1) {
        throw ConfigError("constant preset takes exactly one coefficient (omega0)");
      }
      fm.a0_ = coefficients[0];
      break;
    case FrequencyPreset::sine:
      if (coefficients.size() != 2) {
        throw ConfigError("sine preset takes exactly two coefficients (a, b)");
      }
      fm.a0_ = coefficients[0];
      fm.cos_coeffs_ = {0.0};
      fm.sin_coeffs_ = {coefficients[1]};
      break;
    case FrequencyPreset::custom:
      if (coefficients.empty() || coefficients.size() % 2 == 0) {
        throw ConfigError("custom preset takes a0 followed by (a_k, b_k) pairs");
      }
      fm.a0_ = coefficients[0];
      for (std::size_t i = 1; i < coefficients.size(); i += 2) {
        fm.cos_coeffs_.push_back(coefficients[i]);
        fm.sin_coeffs_.push_back(coefficients[i + 1]);
      }
      break;
  }

  double amplitude = 0.0;
  for (std::size_t k = 0; k < fm.cos_coeffs_.size(); ++k) {
    amplitude += std::abs(fm.cos_coeffs_[k]) + std::abs(fm.sin_coeffs_[k]);
  }
  fm.lower_bound_ = fm.a0_ - amplitude;
  fm.upper_bound_ = fm.a0_ + amplitude;
  if (!(fm.lower_bound_ > 0.0)) {
    std::ostringstream msg;
    msg << "frequency lower bound " << fm.lower_bound_ << " is not positive for preset "
        << to_string(preset);
    throw ConfigError(msg.str());
  }
  return fm;
}

FrequencyJet FrequencyModel::jet(double y) const {
  FrequencyJet j{a0_, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < cos_coeffs_.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double a = cos_coeffs_[i];
    const double b = sin_coeffs_[i];
    if (a == 0.0 && b == 0.0) continue;
    const double c = std::cos(k * y);
    const double s = std::sin(k * y);
    // d/dy (a cos + b sin) = k (b cos - a sin), and so on around the cycle.
    const double f0 = a * c + b * s;
    const double f1 = b * c - a * s;
    j.value += f0;
    j.d1 += k * f1;
    j.d2 -= k * k * f0;
    j.d3 -= k * k * k * f1;
  }
  // Rounding can put the value a few ulp under the bound where it is attained.
  if (!(j.value >= lower_bound_ * (1.0 - 1e-12))) {
    std::ostringstream msg;
    msg << "omega(" << y << ") = " << j.value << " fell below lower bound " << lower_bound_;
    throw std::logic_error(msg.str());
  }
  return j;
}

double FrequencyModel::derivative_scale(int order) const {
  if (order == 0) return upper_bound_;
  double scale = 0.0;
  for (std::size_t i = 0; i < cos_coeffs_.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    scale += std::pow(k, order) * (std::abs(cos_coeffs_[i]) + std::abs(sin_coeffs_[i]));
  }
  return scale;
}

LogDerivatives log_derivatives(const FrequencyJet& jet) {
  const double r1 = jet.d1 / jet.value;
  const double r2 = jet.d2 / jet.value;
  const double r3 = jet.d3 / jet.value;
  LogDerivatives ld;
  ld.L = std::log(jet.value);
  ld.dyL = r1;
  ld.dy2L = r2 - r1 * r1;
  ld.dy3L = r3 - 3.0 * r1 * r2 + 2.0 * r1 * r1 * r1;
  return ld;
}

LogDerivatives log_derivatives(const FrequencyModel& fm, double y) {
  return log_derivatives(fm.jet(y));
}

void SystemParams::validate() const {
  if (!std::isfinite(y_star) || !std::isfinite(p_star) || !std::isfinite(u_star)) {
    throw ConfigError("initial data must be finite");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("horizon must be positive and finite");
  }
}

DerivedConstants derived_constants(const SystemParams& params, const FrequencyModel& fm) {
  const FrequencyJet j = fm.jet(params.y_star);
  const double w = j.value;
  const double w1 = j.d1;
  const double w2 = j.d2;
  const double p = params.p_star;

  DerivedConstants dc;
  dc.theta_star = params.u_star * params.u_star / (2.0 * w);
  dc.e_star = 0.5 * p * p + 0.5 * params.u_star * params.u_star;
  dc.degenerate_fast = params.u_star == 0.0;
  dc.entropy_constant = dc.degenerate_fast ? std::numeric_limits<double>::infinity()
                                           : -std::log(dc.theta_star);

  const double q = p * w1 / (2.0 * w * w);
  dc.c_sbarbar2 = -0.5 * q * q - 5.0 * dc.theta_star * w1 * w1 / (16.0 * w * w * w) +
                  p * p * w2 / (4.0 * w * w * w) - p * p * w1 * w1 / (4.0 * w * w * w * w);
  return dc;
}

double DerivativeCheck::worst() const {
  return std::max({max_rel_error_d1, max_rel_error_d2, max_rel_error_d3, max_rel_error_log2});
}

DerivativeCheck check_derivatives(const FrequencyModel& fm, std::span<const double> probes,
                                  double h) {
  const double s1 = std::max(fm.derivative_scale(1), 1.0);
  const double s2 = std::max(fm.derivative_scale(2), 1.0);
  const double s3 = std::max(fm.derivative_scale(3), 1.0);
  const double lb = fm.lower_bound();
  const double slog = std::max(s2 / lb + (s1 / lb) * (s1 / lb), 1.0);

  auto rel = [](double approx, double exact, double scale) {
    return std::abs(approx - exact) / (std::abs(exact) + scale);
  };

  DerivativeCheck out;
  for (double y : probes) {
    const FrequencyJet c = fm.jet(y);
    const FrequencyJet plus = fm.jet(y + h);
    const FrequencyJet minus = fm.jet(y - h);
    const double fd1 = (plus.value - minus.value) / (2.0 * h);
    const double fd2 = (plus.d1 - minus.d1) / (2.0 * h);
    const double fd3 = (plus.d2 - minus.d2) / (2.0 * h);
    const double fdl = (log_derivatives(plus).dyL - log_derivatives(minus).dyL) / (2.0 * h);
    out.max_rel_error_d1 = std::max(out.max_rel_error_d1, rel(fd1, c.d1, s1));
    out.max_rel_error_d2 = std::max(out.max_rel_error_d2, rel(fd2, c.d2, s2));
    out.max_rel_error_d3 = std::max(out.max_rel_error_d3, rel(fd3, c.d3, s3));
    out.max_rel_error_log2 =
        std::max(out.max_rel_error_log2, rel(fdl, log_derivatives(c).dy2L, slog));
  }
  return out;
}

}  // namespace fastslow

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fastslow {

enum class FrequencyPreset { constant, sine, custom };

std::string_view to_string(FrequencyPreset preset);
FrequencyPreset parse_preset(std::string_view name);

/// omega and its first three derivatives at one point.
struct FrequencyJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Smooth, uniformly positive frequency omega(y).
///
/// Every preset is stored as a truncated Fourier series
///   a0 + sum_k (a_k cos(k y) + b_k sin(k y)),
/// which gives exact derivatives of any order and a cheap lower bound
/// a0 - sum_k (|a_k| + |b_k|). Construction fails when that bound is not positive.
class FrequencyModel {
 public:
  /// Coefficient layout per preset:
  ///   constant: {omega0}
  ///   sine:     {a, b}                 -> a + b sin(y)
  ///   custom:   {a0, a1, b1, a2, b2, ...}
  static FrequencyModel make(FrequencyPreset preset, std::span<const double> coefficients);

  FrequencyJet jet(double y) const;
  double omega(double y) const { return jet(y).value; }

  FrequencyPreset preset() const { return preset_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double lower_bound() const { return lower_bound_; }
  double upper_bound() const { return upper_bound_; }

  /// sup over y of |d^n omega / dy^n| bounded by sum_k k^n (|a_k| + |b_k|); n = 0 returns upper_bound().
  double derivative_scale(int order) const;

 private:
  FrequencyModel() = default;

  FrequencyPreset preset_ = FrequencyPreset::constant;
  std::vector<double> coefficients_;
  double a0_ = 0.0;
  std::vector<double> cos_coeffs_;  // a_k, k = 1..K
  std::vector<double> sin_coeffs_;  // b_k, k = 1..K
  double lower_bound_ = 0.0;
  double upper_bound_ = 0.0;
};

inline FrequencyModel make_frequency(FrequencyPreset preset, std::span<const double> coefficients) {
  return FrequencyModel::make(preset, coefficients);
}

/// L = log omega(y) and its first three y-derivatives.
struct LogDerivatives {
  double L = 0.0;
  double dyL = 0.0;
  double dy2L = 0.0;
  double dy3L = 0.0;
};

LogDerivatives log_derivatives(const FrequencyJet& jet);
LogDerivatives log_derivatives(const FrequencyModel& fm, double y);

struct SystemParams {
  double y_star = 0.0;
  double p_star = 1.0;
  double u_star = 1.0;
  double horizon = 1.0;

  void validate() const;
};

struct DerivedConstants {
  double theta_star = 0.0;        // u*^2 / (2 omega(y*))
  double e_star = 0.0;            // p*^2/2 + u*^2/2
  double entropy_constant = 0.0;  // -log(theta*), so that the entropy vanishes at t = 0
  double c_sbarbar2 = 0.0;        // constant part of the averaged second-order entropy
  bool degenerate_fast = false;   // u* = 0: the fast oscillator carries no energy
};

DerivedConstants derived_constants(const SystemParams& params, const FrequencyModel& fm);

/// Worst-case mismatch between the hand-coded derivatives and central differences
/// (step h) at uniformly spaced probe points, measured relative to derivative_scale().
struct DerivativeCheck {
  double max_rel_error_d1 = 0.0;
  double max_rel_error_d2 = 0.0;
  double max_rel_error_d3 = 0.0;
  double max_rel_error_log2 = 0.0;  // dy2L against differences of dyL
  double worst() const;
};

DerivativeCheck check_derivatives(const FrequencyModel& fm, std::span<const double> probes,
                                  double h = 1e-5);

}  // namespace fastslow

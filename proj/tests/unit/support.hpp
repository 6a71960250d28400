#pragma once

#include <vector>

#include "fastslow/model.hpp"

namespace testing_support {

inline fastslow::FrequencyModel sine_model(double a = 2.0, double b = 1.0) {
  const std::vector<double> c{a, b};
  return fastslow::make_frequency(fastslow::FrequencyPreset::sine, c);
}

inline fastslow::FrequencyModel constant_model(double w0 = 2.0) {
  const std::vector<double> c{w0};
  return fastslow::make_frequency(fastslow::FrequencyPreset::constant, c);
}

inline fastslow::FrequencyModel custom_model() {
  // 3 + 0.5 cos y + 0.4 sin y + 0.2 cos 2y - 0.3 sin 2y
  const std::vector<double> c{3.0, 0.5, 0.4, 0.2, -0.3};
  return fastslow::make_frequency(fastslow::FrequencyPreset::custom, c);
}

inline fastslow::SystemParams test_params() { return fastslow::SystemParams{0.0, 1.0, 1.0, 1.0}; }

}  // namespace testing_support

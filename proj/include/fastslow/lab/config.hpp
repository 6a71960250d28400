#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fastslow/model.hpp"

namespace fastslow::lab {

/// Flat `section.key = value` configuration. Blank lines and lines starting with '#' are
/// ignored; lists are comma separated.
struct RunConfig {
  FrequencyPreset preset = FrequencyPreset::sine;
  std::vector<double> coefficients{2.0, 1.0};
  SystemParams params;
  std::vector<double> epsilons{0.04, 0.02, 0.01, 0.005};
  double step_factor = 80.0;
  double rtol = 1e-12;
  double atol = 1e-14;
  std::size_t grid_points = 2001;
  std::size_t window_periods = 8;
  std::size_t r_points = 512;
  std::size_t s_points = 256;
  std::string output_directory = "out";
  bool flip_corrector_sign = false;  // negative control for the identity suite

  void validate() const;
  FrequencyModel frequency() const;
};

/// Default coefficients for a preset: constant {2}, sine {2, 1}.
std::vector<double> preset_default_coefficients(FrequencyPreset preset);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

std::vector<double> parse_real_list(std::string_view text);

/// Shortest text that reads back to the same double.
std::string format_real(double v);

/// Replaces the preset; coefficients fall back to the preset defaults when the current
/// list does not have the layout the preset expects.
void override_preset(RunConfig& cfg, FrequencyPreset preset);

}  // namespace fastslow::lab

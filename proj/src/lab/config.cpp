#include "fastslow/lab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fastslow/errors.hpp"

namespace fastslow::lab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, std::string_view key) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid number '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

std::size_t parse_count(std::string_view text, std::string_view key) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid count '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_real(values[i]);
  }
  return out;
}

bool coefficients_fit(FrequencyPreset preset, std::size_t n) {
  switch (preset) {
    case FrequencyPreset::constant:
      return n == 1;
    case FrequencyPreset::sine:
      return n == 2;
    case FrequencyPreset::custom:
      return n % 2 == 1;
  }
  return false;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw ConfigError("empty entry in list '" + std::string(text) + "'");
    out.push_back(parse_real(item, "list"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> preset_default_coefficients(FrequencyPreset preset) {
  switch (preset) {
    case FrequencyPreset::constant:
      return {2.0};
    case FrequencyPreset::sine:
      return {2.0, 1.0};
    case FrequencyPreset::custom:
      return {2.0, 0.0, 1.0};
  }
  return {};
}

void override_preset(RunConfig& cfg, FrequencyPreset preset) {
  cfg.preset = preset;
  if (!coefficients_fit(preset, cfg.coefficients.size())) cfg.coefficients = preset_default_coefficients(preset);
}

void RunConfig::validate() const {
  params.validate();
  frequency();  // throws on a bad preset/coefficient combination
  if (epsilons.empty()) throw ConfigError("run.epsilons must not be empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i])) throw ConfigError("epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ConfigError("epsilons must be strictly decreasing");
  }
  if (!(step_factor > 0.0)) throw ConfigError("integrator.fixed_step_factor must be positive");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("integrator tolerances must be positive");
  if (grid_points < 5) throw ConfigError("output.grid_points must be at least 5");
  if (window_periods < 1) throw ConfigError("averaging.window_periods must be at least 1");
  if (r_points < 2 || s_points < 1) throw ConfigError("two-scale grid too small");
}

FrequencyModel RunConfig::frequency() const { return make_frequency(preset, coefficients); }

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  bool coefficients_given = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'section.key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos || key.find('.') != key.rfind('.')) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' must have exactly one dot");
    }
    if (key == "frequency.preset") {
      cfg.preset = parse_preset(value);
    } else if (key == "frequency.coefficients") {
      cfg.coefficients = parse_real_list(value);
      coefficients_given = true;
    } else if (key == "initial.y_star") {
      cfg.params.y_star = parse_real(value, key);
    } else if (key == "initial.p_star") {
      cfg.params.p_star = parse_real(value, key);
    } else if (key == "initial.u_star") {
      cfg.params.u_star = parse_real(value, key);
    } else if (key == "run.horizon") {
      cfg.params.horizon = parse_real(value, key);
    } else if (key == "run.epsilons") {
      cfg.epsilons = parse_real_list(value);
    } else if (key == "integrator.fixed_step_factor") {
      cfg.step_factor = parse_real(value, key);
    } else if (key == "integrator.rtol") {
      cfg.rtol = parse_real(value, key);
    } else if (key == "integrator.atol") {
      cfg.atol = parse_real(value, key);
    } else if (key == "output.grid_points") {
      cfg.grid_points = parse_count(value, key);
    } else if (key == "output.directory") {
      cfg.output_directory = std::string(value);
    } else if (key == "averaging.window_periods") {
      cfg.window_periods = parse_count(value, key);
    } else if (key == "twoscale.r_points") {
      cfg.r_points = parse_count(value, key);
    } else if (key == "twoscale.s_points") {
      cfg.s_points = parse_count(value, key);
    } else if (key == "debug.flip_corrector_sign") {
      cfg.flip_corrector_sign = parse_bool(value, key);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!coefficients_given) cfg.coefficients = preset_default_coefficients(cfg.preset);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "frequency.preset = " << to_string(cfg.preset) << "\n";
  out << "frequency.coefficients = " << join(cfg.coefficients) << "\n";
  out << "initial.y_star = " << format_real(cfg.params.y_star) << "\n";
  out << "initial.p_star = " << format_real(cfg.params.p_star) << "\n";
  out << "initial.u_star = " << format_real(cfg.params.u_star) << "\n";
  out << "run.horizon = " << format_real(cfg.params.horizon) << "\n";
  out << "run.epsilons = " << join(cfg.epsilons) << "\n";
  out << "integrator.fixed_step_factor = " << format_real(cfg.step_factor) << "\n";
  out << "integrator.rtol = " << format_real(cfg.rtol) << "\n";
  out << "integrator.atol = " << format_real(cfg.atol) << "\n";
  out << "output.grid_points = " << cfg.grid_points << "\n";
  out << "output.directory = " << cfg.output_directory << "\n";
  out << "averaging.window_periods = " << cfg.window_periods << "\n";
  out << "twoscale.r_points = " << cfg.r_points << "\n";
  out << "twoscale.s_points = " << cfg.s_points << "\n";
  out << "debug.flip_corrector_sign = " << (cfg.flip_corrector_sign ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace fastslow::lab

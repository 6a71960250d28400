#include "fastslow/integrate.hpp"

namespace fastslow {

std::vector<double> uniform_grid(double horizon, std::size_t n) {
  if (n < 2) throw ConfigError("output grid needs at least two points");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  std::vector<double> grid(n);
  const double dt = horizon / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) * dt;
  grid.back() = horizon;
  return grid;
}

}  // namespace fastslow

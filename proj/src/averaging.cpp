#include "fastslow/averaging.hpp"

#include <algorithm>
#include <cmath>

namespace fastslow {

FloorFrac floor_frac(double x) {
  const double n = std::floor(x);
  FloorFrac out{static_cast<std::int64_t>(n), x - n};
  // x - floor(x) can round up to 1 for tiny negative x.
  if (out.r >= 1.0) {
    out.n += 1;
    out.r = 0.0;
  }
  return out;
}

double two_scale_compose(double t, double s, double epsilon) {
  return epsilon * static_cast<double>(floor_frac(t / epsilon).n) + epsilon * s;
}

TwoScaleInterpolant::TwoScaleInterpolant(std::function<double(double)> v, double epsilon, double domain_max)
    : v_(std::move(v)), epsilon_(epsilon), domain_max_(domain_max) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

double TwoScaleInterpolant::sample(double x) const {
  if (x < 0.0 || x > domain_max_) {
    clamped_ = true;
    x = std::clamp(x, 0.0, domain_max_);
  }
  return v_(x);
}

double TwoScaleInterpolant::operator()(double r, double s) const {
  const FloorFrac nf = floor_frac(r / epsilon_);
  const double n = static_cast<double>(nf.n);
  const double e = epsilon_;
  return l_eps_combine(nf.r, s, sample(e * (n + s)), sample(e * (n + 1.0 + s)), sample(e * (n + 1.0)),
                       sample(e * (n + 2.0)), sample(e * n));
}

OrderFit estimate_order(std::span<const double> epsilons, std::span<const double> errors) {
  if (epsilons.size() != errors.size()) throw ConfigError("order fit needs matching epsilon and error lists");
  if (epsilons.size() < 3) throw ConfigError("order fit needs at least three points");
  const std::size_t n = epsilons.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(epsilons[i] > 0.0) || !(errors[i] > 0.0)) {
      throw ConfigError("order fit needs strictly positive epsilons and errors");
    }
    x[i] = std::log(epsilons[i]);
    y[i] = std::log(errors[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-300)) throw ConfigError("order fit needs at least two distinct epsilons");
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  }
  return sum * h / 3.0;
}

}  // namespace fastslow

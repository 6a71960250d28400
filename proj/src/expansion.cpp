#include "fastslow/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fastslow/kernels.hpp"
#include "fastslow/parallel.hpp"

namespace fastslow {

namespace {

// omega and the log-derivative combinations shared by the corrector formulas.
struct LeadingJet {
  double w, w1, w2;
  double dyL;    // omega'/omega
  double dtL;    // p0 dyL
  double dy2L;   // omega''/omega - dyL^2
  double dtdyL;  // p0 dy2L
};

LeadingJet leading_jet(const HomogenizedState& base, const FrequencyModel& fm) {
  const FrequencyJet j = fm.jet(base.y0);
  LeadingJet g;
  g.w = j.value;
  g.w1 = j.d1;
  g.w2 = j.d2;
  g.dyL = j.d1 / j.value;
  g.dtL = base.p0 * g.dyL;
  g.dy2L = j.d2 / j.value - g.dyL * g.dyL;
  g.dtdyL = base.p0 * g.dy2L;
  return g;
}

}  // namespace

CorrectorValues correctors_at_phase(const HomogenizedState& base, double phi2_bar, const FastPhase& f,
                                    const FrequencyModel& fm, double theta_star) {
  const LeadingJet g = leading_jet(base, fm);
  const double th = theta_star;
  CorrectorValues cv;
  cv.theta1 = -th * g.dtL / (2.0 * g.w) * f.sin2;
  cv.phi2 = -g.dtL / (4.0 * g.w) * f.cos2;
  cv.y2 = -th * g.dyL / (4.0 * g.w) * f.cos2;
  // d/dt (theta* dyL / (4 omega)) expanded along y0' = p0.
  cv.p2 = 0.25 * th * base.p0 * (g.w2 / (g.w * g.w) - 2.0 * g.w1 * g.w1 / (g.w * g.w * g.w)) * f.cos2;
  cv.theta2 = -th * g.dyL * cv.y2 - base.p0 / g.w * cv.p2 + th * th * g.dyL * g.dyL / (16.0 * g.w) * f.cos4 -
              th * g.dtL / g.w * phi2_bar * f.cos2;
  return cv;
}

CorrectorValues correctors(const HomogenizedState& base, double phi2_bar, double epsilon, const FrequencyModel& fm,
                           double theta_star) {
  require_positive_epsilon(epsilon);
  return correctors_at_phase(base, phi2_bar, FastPhase::at(base.phi0, epsilon), fm, theta_star);
}

CorrectorValues two_scale_limits(double s, const HomogenizedState& base, double phi2_bar, const FrequencyModel& fm,
                                 double theta_star) {
  return correctors_at_phase(base, phi2_bar, FastPhase::from_angle(2.0 * std::numbers::pi * s), fm, theta_star);
}

AveragedCorrection averaged_rhs(const AveragedCorrection& c, const HomogenizedState& base, const FrequencyModel& fm,
                                double theta_star) {
  const LeadingJet g = leading_jet(base, fm);
  const double th = theta_star;
  const double dt2L = -th * g.w1 * g.dyL + base.p0 * base.p0 * g.dy2L;
  AveragedCorrection d;
  d.phi2_bar = g.w1 * c.y2_bar + th * g.dyL * g.dyL / 8.0 - g.dtL * g.dtL / (8.0 * g.w);
  d.theta2_bar = th * g.dtL / (4.0 * g.w * g.w) * (dt2L - g.dtL * g.dtL);
  d.y2_bar = c.p2_bar - th * g.dyL * g.dtL / (4.0 * g.w);
  d.p2_bar = -g.w1 * c.theta2_bar - th * g.w2 * c.y2_bar - th * th * g.dyL * g.dy2L / 8.0 +
             th * g.dtL * g.dtdyL / (4.0 * g.w);
  return d;
}

AveragedCorrection initial_corrections(const SystemParams& params, const FrequencyModel& fm) {
  const double th = derived_constants(params, fm).theta_star;
  const HomogenizedState base{0.0, params.y_star, params.p_star, th};
  const FastPhase at_zero = FastPhase::from_angle(0.0);
  // [phi2] does not depend on phi2_bar, so evaluate it first and feed -[phi2] into [theta2].
  const CorrectorValues first = correctors_at_phase(base, 0.0, at_zero, fm, th);
  const double phi2_bar = -first.phi2;
  const CorrectorValues cv = correctors_at_phase(base, phi2_bar, at_zero, fm, th);
  return {phi2_bar, -cv.theta2, -cv.y2, -cv.p2};
}

Vec<7> ExpansionPoint::to_array() const {
  return {base.phi0, base.y0, base.p0, corr.phi2_bar, corr.theta2_bar, corr.y2_bar, corr.p2_bar};
}

ExpansionPoint ExpansionPoint::from_array(const Vec<7>& a, double theta_star) {
  return {{a[0], a[1], a[2], theta_star}, {a[3], a[4], a[5], a[6]}};
}

Vec<7> expansion_rhs(const Vec<7>& x, const FrequencyModel& fm, double theta_star) {
  const ExpansionPoint pt = ExpansionPoint::from_array(x, theta_star);
  const Vec<3> h = homogenized_rhs(pt.base, fm, theta_star);
  const AveragedCorrection d = averaged_rhs(pt.corr, pt.base, fm, theta_star);
  return {h[0], h[1], h[2], d.phi2_bar, d.theta2_bar, d.y2_bar, d.p2_bar};
}

Trajectory<7> solve_expansion(const SystemParams& params, const FrequencyModel& fm, const ControlOptions& opt) {
  params.validate();
  const double th = derived_constants(params, fm).theta_star;
  const ExpansionPoint start{{0.0, params.y_star, params.p_star, th}, initial_corrections(params, fm)};
  auto rhs = [&](double, const Vec<7>& x) { return expansion_rhs(x, fm, th); };
  return integrate_controlled(rhs, start.to_array(), params.horizon, opt);
}

ExpansionPoint expansion_at(const Trajectory<7>& traj, double t, double theta_star) {
  return ExpansionPoint::from_array(dense_eval(traj, t), theta_star);
}

ActionAngleState reconstruct(double epsilon, const ExpansionPoint& pt, const CorrectorValues& cv,
                             double theta_star) {
  const double e2 = epsilon * epsilon;
  ActionAngleState s;
  s.phi = pt.base.phi0 + e2 * (pt.corr.phi2_bar + cv.phi2);
  s.theta = theta_star + epsilon * cv.theta1 + e2 * (pt.corr.theta2_bar + cv.theta2);
  s.y = pt.base.y0 + e2 * (pt.corr.y2_bar + cv.y2);
  s.p = pt.base.p0 + e2 * (pt.corr.p2_bar + cv.p2);
  return s;
}

double averaged_identity_residual(const ExpansionPoint& pt, const FrequencyModel& fm, double theta_star) {
  const LeadingJet g = leading_jet(pt.base, fm);
  const double th = theta_star;
  return pt.corr.theta2_bar + pt.base.p0 / g.w * pt.corr.p2_bar + th * g.dyL * pt.corr.y2_bar +
         th * th * g.dyL * g.dyL / (16.0 * g.w) - th * g.dtL * g.dtL / (4.0 * g.w * g.w);
}

double first_order_energy_identity(const HomogenizedState& base, double epsilon, const FrequencyModel& fm,
                                   double theta_star, bool flip_corrector_sign) {
  const FastPhase f = FastPhase::at(base.phi0, epsilon);
  const FrequencyJet j = fm.jet(base.y0);
  double theta1 = correctors_at_phase(base, 0.0, f, fm, theta_star).theta1;
  if (flip_corrector_sign) theta1 = -theta1;
  return j.value * theta1 + theta_star * base.p0 * j.d1 / (2.0 * j.value) * f.sin2;
}

const std::vector<ResidualVariable>& residual_variables() {
  static const std::vector<ResidualVariable> vars = {
      {"theta_first", 2},  {"phi_second", 2},  {"theta_second", 2}, {"y_second", 2}, {"p_second", 2},
      {"phi_leading", 2},  {"theta_leading", 1}, {"y_leading", 2},  {"p_leading", 2},
  };
  return vars;
}

double ResidualReport::normalized(std::size_t row, const std::string& name) const {
  for (const auto& v : residual_variables()) {
    if (v.name == name) return rows.at(row).sup.at(name) / std::pow(rows.at(row).epsilon, v.power);
  }
  throw std::out_of_range("unknown residual variable " + name);
}

EpsilonResidual residuals_for_epsilon(const SystemParams& params, const FrequencyModel& fm, double epsilon,
                                      const Trajectory<7>& expansion, const Trajectory<4>& full,
                                      std::span<const double> grid) {
  const DerivedConstants dc = derived_constants(params, fm);
  const double th = dc.theta_star;
  const std::size_t n = grid.size();
  std::map<std::string, std::vector<double>> full_v, model_v;
  for (const auto& v : residual_variables()) {
    full_v[v.name].resize(n);
    model_v[v.name].resize(n);
  }
  EpsilonResidual out;
  out.epsilon = epsilon;
  out.reference_error = full.meta.error_estimate;
  for (std::size_t i = 0; i < n; ++i) {
    const ActionAngleState s = ActionAngleState::from_array(dense_eval(full, grid[i]));
    const ExpansionPoint pt = expansion_at(expansion, grid[i], th);
    const CorrectorValues cv = correctors(pt.base, pt.corr.phi2_bar, epsilon, fm, th);
    const ActionAngleState hat = reconstruct(epsilon, pt, cv, th);
    out.energy_drift = std::max(out.energy_drift, std::abs(energy_action_angle(s, epsilon, fm) - dc.e_star));

    auto put = [&](const char* name, double a, double b) {
      full_v[name][i] = a;
      model_v[name][i] = b;
    };
    put("theta_first", s.theta, th + epsilon * cv.theta1);
    put("phi_second", s.phi, hat.phi);
    put("theta_second", s.theta, hat.theta);
    put("y_second", s.y, hat.y);
    put("p_second", s.p, hat.p);
    put("phi_leading", s.phi, pt.base.phi0);
    put("theta_leading", s.theta, th);
    put("y_leading", s.y, pt.base.y0);
    put("p_leading", s.p, pt.base.p0);
  }
  for (const auto& v : residual_variables()) out.sup[v.name] = max_abs_diff(full_v[v.name], model_v[v.name]);
  return out;
}

std::map<std::string, FittedOrder> fit_orders(const std::vector<EpsilonResidual>& rows) {
  std::map<std::string, FittedOrder> orders;
  if (rows.size() < 3) return orders;
  std::vector<EpsilonResidual> sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
  for (const auto& v : residual_variables()) {
    std::vector<double> eps, err;
    for (std::size_t i = 0; i < 3; ++i) {
      eps.push_back(sorted[i].epsilon);
      err.push_back(sorted[i].sup.at(v.name));
    }
    bool positive = std::all_of(err.begin(), err.end(), [](double e) { return e > 0.0; });
    if (!positive) continue;
    FittedOrder fo;
    fo.fit = estimate_order(eps, err);
    fo.accepted = fo.fit.r_squared >= 0.98;
    orders[v.name] = fo;
  }
  return orders;
}

ResidualReport residual_norms(const SystemParams& params, const FrequencyModel& fm,
                              std::span<const double> epsilons, const ResidualSettings& settings) {
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require_positive_epsilon(epsilons[i]);
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ConfigError("epsilon list must be strictly decreasing");
  }
  const std::vector<double> grid = uniform_grid(params.horizon, settings.grid_points);
  const double spacing = grid[1] - grid[0];
  ControlOptions opt;
  opt.rtol = settings.rtol;
  opt.atol = settings.atol;
  opt.h_max = spacing;
  const Trajectory<7> expansion = solve_expansion(params, fm, opt);

  ResidualReport report;
  report.rows.resize(epsilons.size());
  parallel_for(epsilons.size(), settings.workers, [&](std::size_t k) {
    const Trajectory<4> full = solve_full_action_angle(params, fm, epsilons[k], settings.step_factor, spacing,
                                                       settings.reference_error_cap);
    report.rows[k] = residuals_for_epsilon(params, fm, epsilons[k], expansion, full, grid);
  });
  report.orders = fit_orders(report.rows);
  return report;
}

}  // namespace fastslow

#include "esc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace esc
{

using nlohmann::json;

namespace
{

constexpr double kPi = 3.14159265358979323846;

std::string describe(const char* what, int n, double tol)
{
  std::ostringstream os;
  os << n << " " << what << ", tol " << tol;
  return os.str();
}

std::string where(const Vec2& theta)
{
  std::ostringstream os;
  os.precision(6);
  os << "theta=(" << theta[0] << "," << theta[1] << ")";
  return os.str();
}

/// Tracks the worst margin of a tolerance check.
struct Worst
{
  double margin{std::numeric_limits<double>::infinity()};
  std::string at;

  void offer(double m, const std::string& label)
  {
    if (m < margin)
    {
      margin = m;
      at = label;
    }
  }

  CheckResult finish(std::string name, std::string region, std::int64_t samples) const
  {
    return {std::move(name), std::move(region), margin, margin >= 0.0, samples, at};
  }
};

struct Sampler
{
  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi)
  {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  Vec2 theta(const Vec2& center, double half)
  {
    return {center[0] + uniform(-half, half), center[1] + uniform(-half, half)};
  }
  Vec3 vec3(double half)
  {
    return {uniform(-half, half), uniform(-half, half), uniform(-half, half)};
  }

  std::mt19937_64 rng;
};

double max_abs(const StateDerivative& a, const StateDerivative& b)
{
  return std::max((a.theta_dot - b.theta_dot).cwiseAbs().maxCoeff(),
                  (a.omega_dot - b.omega_dot).cwiseAbs().maxCoeff());
}

}  // namespace

CheckResult check_coriolis_skew(const AntennaParams& params, int n_samples,
                                std::uint64_t seed, double tolerance)
{
  Sampler rs(seed);
  Worst w;
  for (int k = 0; k < n_samples; ++k)
  {
    const Vec3 omega = rs.vec3(5.0);
    const Mat3 C = coriolis_matrix(params, omega);
    const double skew = (C + C.transpose()).cwiseAbs().maxCoeff();
    const double energy = std::abs(omega.dot(C * omega));
    w.offer(tolerance - std::max(skew, energy), "omega sample " + std::to_string(k));
  }
  return w.finish("coriolis_skew_symmetric",
                  describe("random omega, |omega|_inf<=5", n_samples, tolerance),
                  n_samples);
}

CheckResult check_kinematics(int n_samples, std::uint64_t seed, double tolerance)
{
  Sampler rs(seed);
  Worst w;
  for (int k = 0; k < n_samples; ++k)
  {
    const Vec2 theta = rs.theta(Vec2::Zero(), kPi);
    const Mat23 J = kinematics_map(theta);
    const double orth = (J * J.transpose() - Mat2::Identity()).cwiseAbs().maxCoeff();
    const double norm_margin = std::sqrt(6.0) - J.norm();
    w.offer(std::min(tolerance - orth, norm_margin), where(theta));
  }
  return w.finish("kinematics_orthonormal_rows",
                  describe("random theta in [-pi,pi]^2", n_samples, tolerance),
                  n_samples);
}

CheckResult check_el_vs_euler(const AntennaParams& params, int n_samples,
                              std::uint64_t seed, double tolerance)
{
  Sampler rs(seed);
  Worst w;
  for (int k = 0; k < n_samples; ++k)
  {
    PlantState x;
    x.theta = rs.theta(Vec2::Zero(), kPi);
    const Vec2 joint_rates{rs.uniform(-2.0, 2.0), rs.uniform(-2.0, 2.0)};
    x.omega = kinematics_map(x.theta).transpose() * joint_rates;
    const Torque tau{Vec2{rs.uniform(-5.0, 5.0), rs.uniform(-5.0, 5.0)}};
    const double err = max_abs(el_rhs(params, x, tau), euler_rhs_check(params, x, tau));
    w.offer(tolerance - err, where(x.theta));
  }
  return w.finish(
    "el_matches_euler",
    describe("admissible states omega=J^T theta_dot, |theta_dot|_inf<=2, |tau|_inf<=5",
             n_samples, tolerance),
    n_samples);
}

CheckResult check_passivity(const AntennaParams& params, int n_samples,
                            std::uint64_t seed, double tolerance)
{
  Sampler rs(seed);
  Worst w;
  const Mat3 I = params.inertia();
  const Mat3 D = params.damping();
  for (int k = 0; k < n_samples; ++k)
  {
    PlantState x;
    x.theta = rs.theta(Vec2::Zero(), kPi);
    x.omega = rs.vec3(3.0);
    const StateDerivative d = el_rhs(params, x, Torque{});
    const double power = x.omega.dot(I * d.omega_dot);
    const double dissipation = -x.omega.dot(D * x.omega);
    w.offer(tolerance - std::abs(power - dissipation), where(x.theta));
  }
  return w.finish("zero_torque_passivity",
                  describe("random states, |omega|_inf<=3", n_samples, tolerance),
                  n_samples);
}

CheckResult check_objective(const ObjectiveField& f, double half_width, int grid)
{
  const ValidationReport v =
    validate_assumptions(f, Box2::centered(f.minimizer(), half_width), grid);
  CheckResult r;
  r.name = "objective_assumptions";
  std::ostringstream region;
  region << f.name() << ", " << grid << "^2 grid, |theta-theta*|_inf<=" << half_width;
  r.region = region.str();
  r.samples = v.samples;
  r.worst_margin = std::min({v.min_value, v.hessian_bound - v.max_hessian_norm,
                             v.min_gradient_norm_outside_ball});
  r.pass = v.all_passed();
  std::ostringstream at;
  at << "positive=" << v.positive << " separable=" << v.separable
     << " hessian_bounded=" << v.hessian_bounded
     << " unique_critical_point=" << v.unique_critical_point;
  r.worst_at = at.str();
  return r;
}

CheckResult check_dither_orthogonality(const std::vector<double>& q_values,
                                       double tolerance)
{
  Worst w;
  for (double q : q_values)
  {
    const DitherCheck c = check_dither(dither_cos_sin(q));
    const double mean = std::max(c.mean_u.cwiseAbs().maxCoeff(),
                                 c.mean_U.cwiseAbs().maxCoeff());
    w.offer(tolerance - std::max(c.orthogonality_residual, mean),
            "q=" + std::to_string(q));
  }
  return w.finish("dither_orthogonality",
                  describe("cos/sin dither frequencies", static_cast<int>(q_values.size()),
                           tolerance),
                  static_cast<std::int64_t>(q_values.size()));
}

CheckResult check_symmetric_products(const AntennaParams& params,
                                     const ObjectiveField& f, const EscGains& gains,
                                     int n_samples, std::uint64_t seed,
                                     double tolerance)
{
  const AffineFields fields(params, f, gains);
  const ConfigField Y1 = fields.field1();
  const ConfigField Y2 = fields.field2();
  Sampler rs(seed);
  Worst w;
  for (int k = 0; k < n_samples; ++k)
  {
    const Vec2 theta = rs.theta(f.minimizer(), kPi);
    const Vec3 a1 = fields.sym_Y1Y1(theta);
    const Vec3 a2 = fields.sym_Y2Y2(theta);
    const double e1 = (a1 - symmetric_product(Y1, Y1, theta)).norm() /
                      std::max(a1.norm(), std::numeric_limits<double>::min());
    const double e2 = (a2 - symmetric_product(Y2, Y2, theta)).norm() /
                      std::max(a2.norm(), std::numeric_limits<double>::min());
    w.offer(tolerance - std::max(e1, e2), where(theta));
  }
  return w.finish("symmetric_product_closed_form",
                  describe("random theta, |theta-theta*|_inf<=pi, relative error",
                           n_samples, tolerance),
                  n_samples);
}

CheckResult check_forcing_identity(const AntennaParams& params,
                                   const ObjectiveField& f, const EscGains& gains,
                                   int n_samples, std::uint64_t seed, double tolerance)
{
  const AffineFields fields(params, f, gains);
  const AveragedParams avg(params, gains);
  const Mat3 I = params.inertia();
  Sampler rs(seed);
  Worst w;
  for (int k = 0; k < n_samples; ++k)
  {
    const Vec2 theta = rs.theta(f.minimizer(), kPi);
    const Vec3 lhs = -0.25 * I * (fields.sym_Y1Y1(theta) + fields.sym_Y2Y2(theta));
    const Vec3 rhs = kinematics_map(theta).transpose() *
                     (avg.Lambda(theta[0]) * averaged_forcing(f, theta));
    w.offer(tolerance - (lhs - rhs).cwiseAbs().maxCoeff(), where(theta));
  }
  return w.finish("averaged_forcing_identity",
                  describe("random theta, |theta-theta*|_inf<=pi", n_samples, tolerance),
                  n_samples);
}

CheckResult check_forcing_gradient(const ObjectiveField& f, int n_samples,
                                   std::uint64_t seed, double tolerance)
{
  const double step = 1e-5;
  const auto potential = [&f](const Vec2& theta) {
    const double h = f.value(theta);
    return -0.25 * h * h;
  };
  Sampler rs(seed);
  Worst w;
  for (int k = 0; k < n_samples; ++k)
  {
    const Vec2 theta = rs.theta(f.minimizer(), kPi);
    Vec2 fd;
    for (int i = 0; i < 2; ++i)
    {
      Vec2 e = Vec2::Zero();
      e[i] = step;
      fd[i] = (potential(theta + e) - potential(theta - e)) / (2.0 * step);
    }
    w.offer(tolerance - (fd - averaged_forcing(f, theta)).cwiseAbs().maxCoeff(),
            where(theta));
  }
  return w.finish("forcing_is_gradient_of_quarter_h_squared",
                  describe("random theta, central differences", n_samples, tolerance),
                  n_samples);
}

CheckResult check_averaged_equilibrium(const AntennaParams& params,
                                       const ObjectiveField& f, const EscGains& gains)
{
  PlantState star;
  star.theta = f.minimizer();
  const AveragedParams avg(params, gains);
  const StateDerivative zero;
  const double a = max_abs(averaged_rhs(params, f, gains, star), zero);
  const double b =
    max_abs(frozen_rhs(params, f, avg.lambda_bar_at(star.theta[0]), star), zero);
  Worst w;
  w.offer(1e-14 - std::max(a, b), where(star.theta));
  return w.finish("averaged_equilibrium", "(theta*, 0), tol 1e-14", 2);
}

Vec2 lambda_bar_for(const AntennaParams& params, const EscGains& gains, double c)
{
  return AveragedParams(params, gains).lambda_bar_at(c);
}

Certificate uniform_certificate(const AntennaParams& params, ObjectivePtr objective,
                                const EscGains& gains, const Vec2& lambda_bar)
{
  const AveragedParams avg(params, gains);
  const double k22 = gains.k2 * gains.k2;
  const double lo = std::min({avg.lambda1, k22 * avg.r_min(), lambda_bar.minCoeff()});
  const double hi = std::max({avg.lambda1, k22 * avg.r_max(), lambda_bar.maxCoeff()});
  return Certificate(
    make_certificate_config(params, std::move(objective), lambda_bar, lo, hi));
}

bool VerifyReport::all_passed() const
{
  for (const auto& e : entries)
  {
    if (!e.check.pass)
    {
      return false;
    }
  }
  if (k2_sweep && !k2_sweep->passes(k2_scenario))
  {
    return false;
  }
  for (const auto& e : eps_sweeps)
  {
    if (!e.report.strictly_decreasing())
    {
      return false;
    }
  }
  return true;
}

json VerifyReport::to_json() const
{
  json checks = json::array();
  for (const auto& e : entries)
  {
    checks.push_back({{"suite", e.suite},
                      {"name", e.check.name},
                      {"region", e.check.region},
                      {"worst_margin", e.check.worst_margin},
                      {"worst_at", e.check.worst_at},
                      {"samples", e.check.samples},
                      {"pass", e.check.pass}});
  }
  json doc{{"checks", checks}};
  if (k2_sweep)
  {
    json rows = json::array();
    for (const auto& r : k2_sweep->rows)
    {
      rows.push_back({{"k2", r.k2},
                      {"pass", r.pass},
                      {"max_derivative", r.max_derivative},
                      {"samples", r.samples},
                      {"pass_all_samples", r.pass_all},
                      {"max_derivative_all_samples", r.max_derivative_all},
                      {"samples_all", r.samples_all}});
    }
    doc["k2_sweep"] = {{"rows", rows},
                       {"scenario_k2", k2_scenario},
                       {"scenario_k2_passes", k2_sweep->passes(k2_scenario)},
                       {"largest_passing_k2", k2_sweep->largest_passing_k2()}};
  }
  if (!eps_sweeps.empty())
  {
    json sweeps = json::array();
    for (const auto& e : eps_sweeps)
    {
      json rows = json::array();
      for (const auto& r : e.report.rows)
      {
        json row{{"epsilon", r.epsilon},
                 {"sup_deviation", r.sup_deviation},
                 {"horizon", r.horizon},
                 {"dt", r.dt}};
        if (r.error)
        {
          row["error"] = *r.error;
        }
        rows.push_back(row);
      }
      sweeps.push_back({{"label", e.label},
                        {"rows", rows},
                        {"strictly_decreasing", e.report.strictly_decreasing()}});
    }
    doc["eps_sweep"] = sweeps;
  }
  doc["all_passed"] = all_passed();
  return doc;
}

VerifyReport run_verification(const Scenario& scenario, const VerifyOptions& options)
{
  scenario.validate();
  const ObjectivePtr objective = scenario.objective.build();
  const ObjectiveField& f = *objective;
  const AntennaParams& params = scenario.params;
  const EscGains& gains = scenario.gains;
  const std::uint64_t seed = options.seed;
  const int n = options.random_samples;

  VerifyReport report;
  const auto add = [&report](const char* suite, CheckResult r) {
    report.entries.push_back({suite, std::move(r)});
  };

  add("model", check_coriolis_skew(params, n, seed));
  add("model", check_kinematics(n, seed + 1));
  add("model", check_el_vs_euler(params, options.el_samples, seed + 2));
  add("model", check_passivity(params, n, seed + 3));
  add("objective", check_objective(f));
  add("controller", check_dither_orthogonality(options.dither_q));
  add("averaging", check_symmetric_products(params, f, gains, n, seed + 4));
  add("averaging", check_forcing_identity(params, f, gains, n, seed + 5));
  add("averaging", check_forcing_gradient(f, n, seed + 6));
  add("averaging", check_averaged_equilibrium(params, f, gains));

  for (double c : options.lambda_points)
  {
    const Certificate cert =
      uniform_certificate(params, objective, gains, lambda_bar_for(params, gains, c));
    const std::string tag = " [c=" + std::to_string(c) + "]";
    const auto tagged = [&tag](CheckResult r) {
      r.name += tag;
      return r;
    };
    const double l_max = cert.V1(cert.minimizer() + Vec2::Constant(0.5), Vec3::Ones());
    add("lyapunov", tagged(check_V1_dot_identity(cert, options.v1_samples, seed + 7)));
    add("lyapunov", tagged(check_V1_dot_exact(cert, options.v1_samples, seed + 7)));
    add("lyapunov", tagged(check_decrease_grid(cert, options.grid)));
    add("lyapunov", tagged(check_decrease_random(cert, 20000, seed + 11, options.grid)));
    add("lyapunov", tagged(check_positivity_grid(cert, options.grid)));
    add("lyapunov", tagged(check_V2_bound(cert, n, seed + 8)));
    add("lyapunov", tagged(check_young_step(cert, n, seed + 9)));
    add("lyapunov", tagged(check_majorant_monotonicity(cert, 4.0 * l_max, 201)));
    add("lyapunov", tagged(check_w_positive(cert, n, seed + 10)));
  }

  if (!options.k2_sweep.empty())
  {
    SlowSweepSetup setup;
    setup.params = params;
    setup.objective = objective;
    setup.k1 = gains.k1;
    setup.t_end = options.sweep_t_end;
    setup.region = options.grid;
    for (const auto& ic : scenario.initial_states)
    {
      setup.initial_states.push_back(ic.state);
    }
    if (setup.initial_states.empty())
    {
      PlantState x;
      x.theta = f.minimizer() + Vec2::Constant(0.5);
      setup.initial_states.push_back(x);
    }
    report.k2_sweep = sweep_k2(setup, options.k2_sweep);
    report.k2_scenario = gains.k2;
    if (std::none_of(options.k2_sweep.begin(), options.k2_sweep.end(),
                     [&](double k) { return std::abs(k - gains.k2) <= 1e-12; }))
    {
      std::vector<double> own{gains.k2};
      report.k2_sweep->rows.push_back(sweep_k2(setup, own).rows.front());
    }
  }

  if (options.run_eps_sweep)
  {
    const double eps = gains.epsilon;
    for (const auto& ic : scenario.initial_states)
    {
      ConvergenceSetup setup;
      setup.params = params;
      setup.objective = objective;
      setup.gains = gains;
      setup.dither_q = scenario.dither.q;
      setup.initial = ic.state;
      setup.horizon = options.eps_horizon;
      report.eps_sweeps.push_back(
        {ic.label, converging_trajectories_experiment(setup, {4.0 * eps, 2.0 * eps, eps})});
    }
  }
  return report;
}

}  // namespace esc

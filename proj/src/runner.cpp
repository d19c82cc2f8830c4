#include "esc/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "esc/averaging.hpp"
#include "esc/integrator.hpp"
#include "esc/lyapunov.hpp"

namespace esc
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

void put(std::string& line, double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  if (!line.empty())
  {
    line += ',';
  }
  line += buf;
}

std::string file_label(const std::string& label)
{
  std::string out;
  for (char c : label)
  {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "ic" : out;
}

/// Certificate whose constants cover every lambda the averaged system can visit.
Certificate averaged_certificate(const Scenario& s, const ObjectivePtr& f)
{
  const AveragedParams avg(s.params, s.gains);
  const double k22 = s.gains.k2 * s.gains.k2;
  const double lo = std::min(avg.lambda1, k22 * avg.r_min());
  const double hi = std::max(avg.lambda1, k22 * avg.r_max());
  return Certificate(make_certificate_config(
    s.params, f, Vec2{avg.lambda1, k22 * avg.r_min()}, lo, hi));
}

}  // namespace

void Trajectory::write_csv(std::ostream& os) const
{
  const bool tilde = system == SystemKind::closed_loop;
  const bool vl = !records.empty() && records.front().V_lambda.has_value();
  os << "t,theta1,theta2,omega_x,omega_y,omega_z";
  if (tilde)
  {
    os << ",theta1_tilde,theta2_tilde,omega_x_tilde,omega_y_tilde,omega_z_tilde";
  }
  os << ",tau1,tau2,h,V1";
  if (vl)
  {
    os << ",V_lambda";
  }
  os << '\n';

  std::string line;
  for (const auto& r : records)
  {
    line.clear();
    put(line, r.t);
    for (int i = 0; i < 2; ++i) put(line, r.state.theta[i]);
    for (int i = 0; i < 3; ++i) put(line, r.state.omega[i]);
    if (tilde)
    {
      const PlantState& x = r.tilde.value();
      for (int i = 0; i < 2; ++i) put(line, x.theta[i]);
      for (int i = 0; i < 3; ++i) put(line, x.omega[i]);
    }
    put(line, r.tau[0]);
    put(line, r.tau[1]);
    put(line, r.h);
    put(line, r.V1);
    if (vl)
    {
      put(line, r.V_lambda.value());
    }
    os << line << '\n';
  }
}

Scenario apply_overrides(Scenario scenario, const RunOptions& options)
{
  if (options.out_dir)
  {
    scenario.output_dir = *options.out_dir;
  }
  if (options.dt)
  {
    scenario.dt = *options.dt;
  }
  if (options.t_end)
  {
    scenario.t_end = *options.t_end;
  }
  if (options.stride)
  {
    scenario.stride = *options.stride;
  }
  scenario.validate();
  return scenario;
}

SimulationResult simulate(const Scenario& scenario, SystemKind system,
                          const InitialState& initial, const RunOptions& options)
{
  const Scenario s = apply_overrides(scenario, options);
  const ObjectivePtr objective = s.objective.build();
  const ObjectiveField& f = *objective;
  const DitherPair dither = s.dither.build();
  const AffineFields fields(s.params, f, s.gains);
  const AveragedParams avg(s.params, s.gains);
  const Measurement measurement =
    options.measurement_override ? *options.measurement_override : measure(f);
  const Vec2 target = f.minimizer();
  const double dt = s.dt_for(system);

  std::optional<Certificate> cert;
  if (s.record_v_lambda)
  {
    if (system == SystemKind::frozen)
    {
      cert.emplace(make_certificate_config(s.params, objective, *s.frozen_lambda_bar));
    }
    else
    {
      cert.emplace(averaged_certificate(s, objective));
    }
  }

  const auto lambda_at = [&](const Vec2& theta) -> Vec2 {
    return system == SystemKind::frozen ? *s.frozen_lambda_bar
                                        : avg.lambda_bar_at(theta[0]);
  };

  SimulationResult result;
  Trajectory& traj = result.trajectory;
  traj.system = system;
  traj.label = initial.label;
  traj.dt = dt;
  traj.stride = s.stride;

  TrackingStats& stats = result.stats;
  stats.tail_start = s.t_end * (1.0 - options.tail_fraction);
  stats.h_min = std::numeric_limits<double>::infinity();
  stats.h_max = -std::numeric_limits<double>::infinity();
  double tail_integral = 0.0;
  double prev_t = 0.0;
  double prev_err = 0.0;
  bool in_tail = false;
  std::int64_t step = 0;

  const auto observe = [&](double t, const StateVector& x) {
    const PlantState state = unpack(x);
    const Vec2 err = state.theta - target;
    const double e = err.norm();
    const double h = f.value(state.theta);
    stats.h_min = std::min(stats.h_min, h);
    stats.h_max = std::max(stats.h_max, h);
    stats.final_error = err;
    if (t >= stats.tail_start)
    {
      stats.max_error_tail = std::max(stats.max_error_tail, e);
      if (in_tail)
      {
        tail_integral += 0.5 * (e + prev_err) * (t - prev_t);
      }
      in_tail = true;
      prev_t = t;
      prev_err = e;
    }

    if (step++ % s.stride != 0)
    {
      return;
    }
    TrajectoryRecord rec{t, state, std::nullopt, Vec2::Zero(), h, 0.0, std::nullopt};
    PlantState lyap_state = state;
    if (system == SystemKind::closed_loop)
    {
      rec.tilde = tilde_transform(state, dither, fields, s.gains, t);
      rec.tau = esc_torque(s.gains, dither, t, measurement(state.theta)).tau;
      lyap_state = *rec.tilde;
    }
    else
    {
      // Generalized torque of the printed averaged/frozen forcing; the
      // gyroscopic correction acts on omega directly and is not included.
      rec.tau = lambda_at(state.theta).cwiseProduct(averaged_forcing(f, state.theta));
    }
    const Vec2 lambda = lambda_at(lyap_state.theta);
    rec.V1 = weak_lyapunov_V1(s.params, f, lambda, lyap_state.theta, lyap_state.omega);
    if (cert)
    {
      rec.V_lambda =
        cert->with_lambda(lambda).V_lambda(lyap_state.theta, lyap_state.omega);
    }
    traj.records.push_back(std::move(rec));
  };

  const StateVector x0 = pack(initial.state);
  switch (system)
  {
    case SystemKind::closed_loop:
      integrate_rk4(
        [&](double t, const StateVector& x) {
          return pack(closed_loop_rhs(s.params, measurement, s.gains, dither, t,
                                      unpack(x)));
        },
        x0, 0.0, s.t_end, dt, 1, observe);
      break;
    case SystemKind::averaged:
      integrate_rk4(
        [&](double, const StateVector& x) {
          return pack(averaged_rhs(s.params, f, s.gains, unpack(x)));
        },
        x0, 0.0, s.t_end, dt, 1, observe);
      break;
    case SystemKind::averaged_gyroscopic:
      integrate_rk4(
        [&](double, const StateVector& x) {
          return pack(averaged_gyroscopic_rhs(s.params, f, s.gains, unpack(x)));
        },
        x0, 0.0, s.t_end, dt, 1, observe);
      break;
    case SystemKind::frozen:
      integrate_rk4(
        [&](double, const StateVector& x) {
          return pack(frozen_rhs(s.params, f, *s.frozen_lambda_bar, unpack(x)));
        },
        x0, 0.0, s.t_end, dt, 1, observe);
      break;
  }

  const double window = prev_t - stats.tail_start;
  stats.mean_error_tail = window > 0.0 ? tail_integral / (prev_t - stats.tail_start)
                                       : stats.max_error_tail;
  return result;
}

json RunReport::to_json() const
{
  json doc;
  json runs_json = json::array();
  for (const auto& r : runs)
  {
    runs_json.push_back({
      {"system", r.system},
      {"label", r.label},
      {"csv", r.csv_path},
      {"rows", r.rows},
      {"dt", r.dt},
      {"final_error", {r.stats.final_error[0], r.stats.final_error[1]}},
      {"final_error_norm", r.stats.final_error.norm()},
      {"tail_start", r.stats.tail_start},
      {"max_error_tail", r.stats.max_error_tail},
      {"mean_error_tail", r.stats.mean_error_tail},
      {"h_min", r.stats.h_min},
      {"h_max", r.stats.h_max},
      {"wall_time_s", r.wall_time_s},
    });
  }
  doc["runs"] = runs_json;
  doc["objective_check"] = {
    {"samples", objective_check.samples},
    {"min_value", objective_check.min_value},
    {"positive", objective_check.positive},
    {"max_separability_residual", objective_check.max_separability_residual},
    {"separable", objective_check.separable},
    {"max_hessian_norm", objective_check.max_hessian_norm},
    {"hessian_bound", objective_check.hessian_bound},
    {"hessian_bounded", objective_check.hessian_bounded},
    {"min_gradient_norm_outside_ball", objective_check.min_gradient_norm_outside_ball},
    {"unique_critical_point", objective_check.unique_critical_point},
  };
  doc["warnings"] = warnings;
  return doc;
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& options)
{
  const Scenario s = apply_overrides(scenario, options);
  const ObjectivePtr f = s.objective.build();

  RunReport report;
  const Box2 box = Box2::centered(f->minimizer(), 3.0);
  report.objective_check = validate_assumptions(*f, box, 61);
  const auto& oc = report.objective_check;
  if (!oc.positive) report.warnings.push_back("objective is not positive on the sample box");
  if (!oc.separable) report.warnings.push_back("objective is not additively separable");
  if (!oc.hessian_bounded) report.warnings.push_back("objective Hessian exceeds its bound");
  if (!oc.unique_critical_point) report.warnings.push_back("objective has another critical point");

  const fs::path dir(s.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
  {
    throw std::runtime_error("cannot create output directory '" + s.output_dir + "'");
  }

  for (SystemKind system : s.systems)
  {
    for (const auto& ic : s.initial_states)
    {
      const auto start = std::chrono::steady_clock::now();
      RunOptions run_options;
      run_options.tail_fraction = options.tail_fraction;
      run_options.measurement_override = options.measurement_override;
      const SimulationResult res = simulate(s, system, ic, run_options);
      const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      const fs::path csv = dir / (to_string(system) + "_" + file_label(ic.label) + ".csv");
      std::ofstream out(csv, std::ios::binary);
      if (!out)
      {
        throw std::runtime_error("cannot write '" + csv.string() + "'");
      }
      res.trajectory.write_csv(out);
      report.runs.push_back({to_string(system), ic.label, csv.string(),
                             res.trajectory.records.size(), res.trajectory.dt,
                             res.stats, wall});
    }
  }

  std::ofstream rep(dir / "report.json");
  if (!rep)
  {
    throw std::runtime_error("cannot write report.json in '" + s.output_dir + "'");
  }
  rep << report.to_json().dump(2) << '\n';
  return report;
}

}  // namespace esc

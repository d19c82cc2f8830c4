#include "esc/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>

#include "esc/integrator.hpp"

namespace esc
{

AffineFields::AffineFields(const AntennaParams& params, const ObjectiveField& f,
                           const EscGains& gains)
  : params_(params), f_(&f), gains_(gains)
{
}

Vec3 AffineFields::Y0(const Vec3& omega) const
{
  const Vec3 force = -coriolis_matrix(params_, omega) * omega -
                     params_.damping_diagonal().cwiseProduct(omega);
  return force.cwiseQuotient(params_.inertia_diagonal());
}

Vec3 AffineFields::Y1(const Vec2& theta) const
{
  return {0.0, gains_.k1 * f_->value(theta) / params_.Iy, 0.0};
}

Vec3 AffineFields::Y2(const Vec2& theta) const
{
  const double s = std::sin(theta[0]);
  const double c = std::cos(theta[0]);
  const double kh = gains_.k2 * f_->value(theta);
  return {-s * kh / params_.Ix, 0.0, c * kh / params_.Iz};
}

Mat32 AffineFields::dY1(const Vec2& theta) const
{
  Mat32 d = Mat32::Zero();
  d.row(1) = gains_.k1 / params_.Iy * f_->gradient(theta).transpose();
  return d;
}

Mat32 AffineFields::dY2(const Vec2& theta) const
{
  const double s = std::sin(theta[0]);
  const double c = std::cos(theta[0]);
  const double h = f_->value(theta);
  const Vec2 g = f_->gradient(theta);
  const Vec3 dir{-s / params_.Ix, 0.0, c / params_.Iz};
  const Vec3 ddir{-c / params_.Ix, 0.0, -s / params_.Iz};

  Mat32 d = gains_.k2 * dir * g.transpose();
  d.col(0) += gains_.k2 * h * ddir;
  return d;
}

ConfigField AffineFields::field1() const
{
  return [self = *this](const Vec2& theta) { return self.Y1(theta); };
}

ConfigField AffineFields::field2() const
{
  return [self = *this](const Vec2& theta) { return self.Y2(theta); };
}

Vec3 AffineFields::sym_Y1Y1(const Vec2& theta) const
{
  const double iy = 1.0 / params_.Iy;
  const double scale = 2.0 * gains_.k1 * gains_.k1 * iy * iy *
                       f_->gradient(theta)[0] * f_->value(theta);
  return {0.0, scale, 0.0};
}

Vec3 AffineFields::sym_Y2Y2(const Vec2& theta) const
{
  const double s = std::sin(theta[0]);
  const double c = std::cos(theta[0]);
  const double r = s * s / params_.Ix + c * c / params_.Iz;
  const double scale = 2.0 * gains_.k2 * gains_.k2 * r *
                       f_->gradient(theta)[1] * f_->value(theta);
  return scale * Vec3{-s / params_.Ix, 0.0, c / params_.Iz};
}

Vec3 symmetric_product(const Mat32& dX, const Vec3& X, const Mat32& dY,
                       const Vec3& Y, const Vec2& theta)
{
  const Mat23 J = kinematics_map(theta);
  return dX * (J * Y) + dY * (J * X);
}

namespace
{

Mat32 fd_jacobian(const ConfigField& F, const Vec2& theta, double step)
{
  Mat32 d;
  for (int k = 0; k < 2; ++k)
  {
    Vec2 plus = theta;
    Vec2 minus = theta;
    plus[k] += step;
    minus[k] -= step;
    d.col(k) = (F(plus) - F(minus)) / (2.0 * step);
  }
  return d;
}

}  // namespace

Vec3 symmetric_product(const ConfigField& X, const ConfigField& Y,
                       const Vec2& theta, double step)
{
  if (!(step > 0.0))
  {
    throw std::invalid_argument("symmetric_product: step must be > 0");
  }
  return symmetric_product(fd_jacobian(X, theta, step), X(theta),
                           fd_jacobian(Y, theta, step), Y(theta), theta);
}

AveragedParams::AveragedParams(const AntennaParams& params, const EscGains& gains)
  : lambda1(gains.k1 * gains.k1 / params.Iy),
    k2(gains.k2),
    inv_Ix(1.0 / params.Ix),
    inv_Iz(1.0 / params.Iz)
{
}

double AveragedParams::r(double theta1) const
{
  const double s = std::sin(theta1);
  const double c = std::cos(theta1);
  return inv_Ix * s * s + inv_Iz * c * c;
}

double AveragedParams::dr(double theta1) const
{
  return (inv_Ix - inv_Iz) * std::sin(2.0 * theta1);
}

Mat2 AveragedParams::Lambda(double theta1) const
{
  return lambda_bar_at(theta1).asDiagonal();
}

double AveragedParams::r_min() const
{
  return std::min(inv_Ix, inv_Iz);
}

double AveragedParams::r_max() const
{
  return std::max(inv_Ix, inv_Iz);
}

Vec2 averaged_forcing(const ObjectiveField& f, const Vec2& theta)
{
  return -0.5 * f.value(theta) * f.gradient(theta);
}

StateDerivative averaged_rhs(const AntennaParams& params,
                             const ObjectiveField& f,
                             const EscGains& gains,
                             const PlantState& state)
{
  const AveragedParams avg(params, gains);
  const Vec2 lambda = avg.lambda_bar_at(state.theta[0]);
  return el_rhs(params, state,
                Torque{lambda.cwiseProduct(averaged_forcing(f, state.theta))});
}

Vec3 gyroscopic_average(const AntennaParams& params, const AffineFields& fields,
                        const Vec2& theta)
{
  const Vec3 Y1 = fields.Y1(theta);
  const Vec3 Y2 = fields.Y2(theta);
  const Vec3 sum = coriolis_matrix(params, Y1) * Y1 + coriolis_matrix(params, Y2) * Y2;
  return -0.5 * sum.cwiseQuotient(params.inertia_diagonal());
}

StateDerivative averaged_gyroscopic_rhs(const AntennaParams& params,
                                        const ObjectiveField& f,
                                        const EscGains& gains,
                                        const PlantState& state)
{
  StateDerivative d = averaged_rhs(params, f, gains, state);
  d.omega_dot += gyroscopic_average(params, AffineFields(params, f, gains), state.theta);
  return d;
}

StateDerivative frozen_rhs(const AntennaParams& params,
                           const ObjectiveField& f,
                           const Vec2& lambda_bar,
                           const PlantState& state)
{
  if (!(lambda_bar.array() > 0.0).all())
  {
    throw std::invalid_argument("frozen_rhs: lambda_bar must be positive");
  }
  return el_rhs(params, state,
                Torque{lambda_bar.cwiseProduct(averaged_forcing(f, state.theta))});
}

namespace
{

Vec3 dither_velocity(const PlantState& state, const DitherPair& dither,
                     const AffineFields& fields, const EscGains& gains, double t)
{
  const Vec2 U = dither.U(t / gains.epsilon);
  return U[0] * fields.Y1(state.theta) + U[1] * fields.Y2(state.theta);
}

}  // namespace

PlantState tilde_transform(const PlantState& state, const DitherPair& dither,
                           const AffineFields& fields, const EscGains& gains,
                           double t)
{
  return {state.theta,
          state.omega - dither_velocity(state, dither, fields, gains, t)};
}

PlantState tilde_inverse(const PlantState& tilde, const DitherPair& dither,
                         const AffineFields& fields, const EscGains& gains,
                         double t)
{
  return {tilde.theta,
          tilde.omega + dither_velocity(tilde, dither, fields, gains, t)};
}

bool DeviationReport::strictly_decreasing() const
{
  for (const auto& row : rows)
  {
    if (row.error)
    {
      return false;
    }
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
  {
    if (!(rows[i].sup_deviation < rows[i - 1].sup_deviation))
    {
      return false;
    }
  }
  return true;
}

void DeviationReport::write_csv(std::ostream& os) const
{
  os << "epsilon,sup_deviation,horizon\n";
  char line[128];
  for (const auto& row : rows)
  {
    std::snprintf(line, sizeof line, "%.12e,%.12e,%.12e\n", row.epsilon,
                  row.error ? std::nan("") : row.sup_deviation, row.horizon);
    os << line;
  }
}

std::string to_string(AveragedModel model)
{
  return model == AveragedModel::gyroscopic ? "gyroscopic" : "printed";
}

namespace
{

DeviationRow run_one_epsilon(const ConvergenceSetup& setup, double eps)
{
  EscGains gains = setup.gains;
  gains.epsilon = eps;
  const ObjectiveField& f = *setup.objective;
  const DitherPair dither = dither_cos_sin(setup.dither_q);
  const AffineFields fields(setup.params, f, gains);
  const double dt = eps * dither.period() / setup.steps_per_dither_period;

  DeviationRow row{eps, 0.0, setup.horizon, dt, std::nullopt};

  const StateVector x0 =
    pack(tilde_inverse(setup.initial, dither, fields, gains, setup.t0));
  const StateVector xbar0 = pack(setup.initial);

  const auto closed = [&](double t, const StateVector& x) {
    return pack(closed_loop_rhs(setup.params, f, gains, dither, t, unpack(x)));
  };
  const auto averaged = [&](double, const StateVector& x) {
    return pack(setup.model == AveragedModel::gyroscopic
                  ? averaged_gyroscopic_rhs(setup.params, f, gains, unpack(x))
                  : averaged_rhs(setup.params, f, gains, unpack(x)));
  };

  try
  {
    const auto xs = integrate_rk4(closed, x0, setup.t0, setup.t0 + setup.horizon, dt);
    const auto bars =
      integrate_rk4(averaged, xbar0, setup.t0, setup.t0 + setup.horizon, dt);
    double sup = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
    {
      const PlantState tilde =
        tilde_transform(unpack(xs[k].x), dither, fields, gains, xs[k].t);
      sup = std::max(sup, (pack(tilde) - bars[k].x).norm());
    }
    row.sup_deviation = sup;
  }
  catch (const IntegrationError& e)
  {
    row.error = e.what();
  }
  return row;
}

}  // namespace

DeviationReport converging_trajectories_experiment(
  const ConvergenceSetup& setup, const std::vector<double>& eps_list)
{
  if (!setup.objective)
  {
    throw std::invalid_argument("converging_trajectories_experiment: no objective");
  }
  if (eps_list.empty())
  {
    throw std::invalid_argument("converging_trajectories_experiment: empty eps list");
  }
  for (std::size_t i = 0; i < eps_list.size(); ++i)
  {
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1])))
    {
      throw std::invalid_argument(
        "converging_trajectories_experiment: eps list must be positive and "
        "strictly decreasing");
    }
  }

  // Each epsilon is an independent integration.
  std::vector<std::future<DeviationRow>> jobs;
  jobs.reserve(eps_list.size());
  for (double eps : eps_list)
  {
    jobs.push_back(std::async(std::launch::async, run_one_epsilon,
                              std::cref(setup), eps));
  }
  DeviationReport report;
  report.model = setup.model;
  for (auto& job : jobs)
  {
    report.rows.push_back(job.get());
  }
  return report;
}

}  // namespace esc

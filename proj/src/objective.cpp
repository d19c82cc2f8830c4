#include "esc/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace esc
{

double ObjectiveField::h1(double theta1) const
{
  const Vec2 c = minimizer();
  return value({theta1, c[1]});
}

double ObjectiveField::h2(double theta2) const
{
  const Vec2 c = minimizer();
  return value({c[0], theta2}) - value(c);
}

double ObjectiveField::dh1(double theta1) const
{
  return gradient({theta1, minimizer()[1]})[0];
}

double ObjectiveField::dh2(double theta2) const
{
  return gradient({minimizer()[0], theta2})[1];
}

double ObjectiveField::d2h1(double theta1) const
{
  return hessian({theta1, minimizer()[1]})(0, 0);
}

double ObjectiveField::d2h2(double theta2) const
{
  return hessian({minimizer()[0], theta2})(1, 1);
}

QuadraticObjective::QuadraticObjective(const Vec2& theta_d, double offset)
  : theta_d_(theta_d), offset_(offset)
{
  if (!theta_d.allFinite())
  {
    throw std::invalid_argument("QuadraticObjective: theta_d must be finite");
  }
  if (!std::isfinite(offset) || offset <= 0.0)
  {
    throw std::invalid_argument("QuadraticObjective: offset must be > 0");
  }
}

double QuadraticObjective::value(const Vec2& theta) const
{
  const Vec2 e = theta - theta_d_;
  return 0.5 * e[0] * e[0] + 0.5 * e[1] * e[1] + offset_;
}

Vec2 QuadraticObjective::gradient(const Vec2& theta) const
{
  return theta - theta_d_;
}

Mat2 QuadraticObjective::hessian(const Vec2&) const
{
  return Mat2::Identity();
}

GaussianPowerObjective::GaussianPowerObjective(const Vec2& theta_d,
                                               double p_max,
                                               double sigma,
                                               double p0)
  : theta_d_(theta_d), p_max_(p_max), sigma_(sigma), p0_(p0)
{
  if (!theta_d.allFinite())
  {
    throw std::invalid_argument("GaussianPowerObjective: theta_d must be finite");
  }
  if (!(p_max > 0.0) || !(sigma > 0.0))
  {
    throw std::invalid_argument(
      "GaussianPowerObjective: p_max and sigma must be > 0");
  }
  if (!(p0 > p_max))
  {
    throw std::invalid_argument(
      "GaussianPowerObjective: p0 must exceed p_max so that h > 0");
  }
}

double GaussianPowerObjective::bump(const Vec2& theta) const
{
  return std::exp(-(theta - theta_d_).squaredNorm() / (2.0 * sigma_ * sigma_));
}

double GaussianPowerObjective::value(const Vec2& theta) const
{
  return p0_ - p_max_ * bump(theta);
}

Vec2 GaussianPowerObjective::gradient(const Vec2& theta) const
{
  return p_max_ * bump(theta) / (sigma_ * sigma_) * (theta - theta_d_);
}

Mat2 GaussianPowerObjective::hessian(const Vec2& theta) const
{
  const Vec2 e = theta - theta_d_;
  const double s2 = sigma_ * sigma_;
  return p_max_ * bump(theta) / s2 *
         (Mat2::Identity() - e * e.transpose() / s2);
}

double GaussianPowerObjective::hessian_bound() const
{
  // Eigenvalues are p_max g / s2 and p_max g (1 - |e|^2/s2) / s2; both peak at e = 0.
  return p_max_ / (sigma_ * sigma_);
}

Box2 Box2::centered(const Vec2& center, double half_width)
{
  return {center.array() - half_width, center.array() + half_width};
}

bool Box2::contains(const Vec2& p) const
{
  return (p.array() >= lower.array()).all() && (p.array() <= upper.array()).all();
}

Vec2 Box2::grid_point(int i, int j, int n) const
{
  if (n <= 1)
  {
    return 0.5 * (lower + upper);
  }
  const double a = static_cast<double>(i) / (n - 1);
  const double b = static_cast<double>(j) / (n - 1);
  return {lower[0] + a * (upper[0] - lower[0]),
          lower[1] + b * (upper[1] - lower[1])};
}

double symmetric_norm(const Mat2& m)
{
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  const double off = 0.5 * (m(0, 1) + m(1, 0));
  const double radius = std::hypot(half_diff, off);
  return std::max(std::abs(mean + radius), std::abs(mean - radius));
}

ValidationReport validate_assumptions(const ObjectiveField& f,
                                      const Box2& sample_box,
                                      int n_samples,
                                      const ValidationOptions& options)
{
  if (n_samples < 1)
  {
    throw std::invalid_argument("validate_assumptions: n_samples must be >= 1");
  }
  const Vec2 minimizer = f.minimizer();
  if (!sample_box.contains(minimizer))
  {
    throw std::invalid_argument(
      "validate_assumptions: sample box must contain the minimizer");
  }

  ValidationReport report;
  report.hessian_bound = f.hessian_bound();
  report.min_value = std::numeric_limits<double>::infinity();
  report.min_gradient_norm_outside_ball = std::numeric_limits<double>::infinity();
  report.gradient_norm_at_minimizer = f.gradient(minimizer).norm();

  for (int i = 0; i < n_samples; ++i)
  {
    for (int j = 0; j < n_samples; ++j)
    {
      const Vec2 theta = sample_box.grid_point(i, j, n_samples);
      const double h = f.value(theta);
      report.min_value = std::min(report.min_value, h);

      const double residual = std::abs(h - f.h1(theta[0]) - f.h2(theta[1]));
      report.max_separability_residual =
        std::max(report.max_separability_residual, residual);

      report.max_hessian_norm =
        std::max(report.max_hessian_norm, symmetric_norm(f.hessian(theta)));

      if ((theta - minimizer).norm() > options.exclusion_radius)
      {
        report.min_gradient_norm_outside_ball =
          std::min(report.min_gradient_norm_outside_ball,
                   f.gradient(theta).norm());
      }
      ++report.samples;
    }
  }

  report.positive = report.min_value > 0.0;
  report.separable = report.max_separability_residual <=
                     options.separability_tolerance;
  report.hessian_bounded = report.max_hessian_norm <= report.hessian_bound;
  // Every sample may fall inside the exclusion ball; then there is nothing to flag.
  const bool grad_outside_ok =
    std::isinf(report.min_gradient_norm_outside_ball) ||
    report.min_gradient_norm_outside_ball > 0.0;
  report.unique_critical_point =
    report.gradient_norm_at_minimizer <= 1e-12 && grad_outside_ok;
  return report;
}

Vec2 fd_gradient(const ObjectiveField& f, const Vec2& theta, double step)
{
  if (!(step > 0.0))
  {
    throw std::invalid_argument("fd_gradient: step must be > 0");
  }
  Vec2 g;
  for (int k = 0; k < 2; ++k)
  {
    Vec2 plus = theta;
    Vec2 minus = theta;
    plus[k] += step;
    minus[k] -= step;
    g[k] = (f.value(plus) - f.value(minus)) / (2.0 * step);
  }
  return g;
}

}  // namespace esc

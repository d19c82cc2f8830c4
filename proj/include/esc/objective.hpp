#ifndef ESC_OBJECTIVE_HPP
#define ESC_OBJECTIVE_HPP

#include <memory>
#include <string>

#include "esc/model.hpp"

namespace esc
{

/**
 * Measurable cost h(theta) to be minimized.
 *
 * The controller only ever sees value(). Derivatives are there for the
 * averaging and certificate code.
 *
 * The separable components are the anchored decomposition around the
 * minimizer c = theta_*:
 *   h1(x) := h(x, c2),   h2(y) := h(c1, y) - h(c1, c2),
 * so h(theta) = h1(theta1) + h2(theta2) holds exactly iff h is additively
 * separable, and h1 carries the whole constant h(theta_*).
 */
class ObjectiveField
{
public:
  virtual ~ObjectiveField() = default;

  virtual double value(const Vec2& theta) const = 0;
  virtual Vec2 gradient(const Vec2& theta) const = 0;
  virtual Mat2 hessian(const Vec2& theta) const = 0;
  virtual Vec2 minimizer() const = 0;
  /// Global bound on the spectral norm of the Hessian.
  virtual double hessian_bound() const = 0;
  virtual std::string name() const = 0;

  double h1(double theta1) const;
  double h2(double theta2) const;
  double dh1(double theta1) const;
  double dh2(double theta2) const;
  double d2h1(double theta1) const;
  double d2h2(double theta2) const;
  double min_value() const { return value(minimizer()); }
};

using ObjectivePtr = std::shared_ptr<const ObjectiveField>;

/// 0.5|theta - theta_d|^2 + offset.
class QuadraticObjective final : public ObjectiveField
{
public:
  QuadraticObjective(const Vec2& theta_d, double offset);

  double value(const Vec2& theta) const override;
  Vec2 gradient(const Vec2& theta) const override;
  Mat2 hessian(const Vec2& theta) const override;
  Vec2 minimizer() const override { return theta_d_; }
  double hessian_bound() const override { return 1.0; }
  std::string name() const override { return "quadratic"; }

  double offset() const { return offset_; }

private:
  Vec2 theta_d_;
  double offset_;
};

/**
 * p0 - p_max exp(-|theta - theta_d|^2 / (2 sigma^2)).
 *
 * Positive whenever p0 > p_max. Not additively separable: its anchored
 * decomposition leaves a nonzero residual, which validate_assumptions
 * reports.
 */
class GaussianPowerObjective final : public ObjectiveField
{
public:
  GaussianPowerObjective(const Vec2& theta_d, double p_max, double sigma,
                         double p0);

  double value(const Vec2& theta) const override;
  Vec2 gradient(const Vec2& theta) const override;
  Mat2 hessian(const Vec2& theta) const override;
  Vec2 minimizer() const override { return theta_d_; }
  double hessian_bound() const override;
  std::string name() const override { return "gaussian"; }

private:
  double bump(const Vec2& theta) const;

  Vec2 theta_d_;
  double p_max_;
  double sigma_;
  double p0_;
};

/// Axis-aligned sampling region.
struct Box2
{
  Vec2 lower;
  Vec2 upper;

  static Box2 centered(const Vec2& center, double half_width);
  bool contains(const Vec2& p) const;
  /// Point (i, j) of an n x n grid spanning the box (n = 1 gives the center).
  Vec2 grid_point(int i, int j, int n) const;
};

struct ValidationOptions
{
  /// Gradient nonvanishing is only checked outside this ball around theta_*.
  double exclusion_radius{0.05};
  double separability_tolerance{1e-9};
};

struct ValidationReport
{
  int samples{0};

  double min_value{0.0};  // positivity margin
  bool positive{false};

  double max_separability_residual{0.0};
  bool separable{false};

  double max_hessian_norm{0.0};
  double hessian_bound{0.0};
  bool hessian_bounded{false};

  double gradient_norm_at_minimizer{0.0};
  double min_gradient_norm_outside_ball{0.0};
  bool unique_critical_point{false};

  bool all_passed() const
  {
    return positive && separable && hessian_bounded && unique_critical_point;
  }
};

/**
 * Sampling check of positivity, separability, bounded Hessian and a unique
 * critical point over an n_samples x n_samples grid of the box. Violations
 * are flagged in the report; nothing throws except bad arguments.
 */
ValidationReport validate_assumptions(const ObjectiveField& f,
                                      const Box2& sample_box,
                                      int n_samples,
                                      const ValidationOptions& options = {});

/// Central-difference gradient of f.value.
Vec2 fd_gradient(const ObjectiveField& f, const Vec2& theta, double step);

/// Spectral norm of a symmetric 2x2 matrix.
double symmetric_norm(const Mat2& m);

}  // namespace esc

#endif  // ESC_OBJECTIVE_HPP

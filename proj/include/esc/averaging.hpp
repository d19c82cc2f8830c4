#ifndef ESC_AVERAGING_HPP
#define ESC_AVERAGING_HPP

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "esc/controller.hpp"
#include "esc/model.hpp"
#include "esc/objective.hpp"

namespace esc
{

/// A vector field on the configuration space, theta -> R^3.
using ConfigField = std::function<Vec3(const Vec2&)>;

/**
 * Control-affine split of the closed loop:
 *   omega_dot = Y0(omega) + sum_i (1/eps) u_i(t/eps) Y_i(theta).
 */
class AffineFields
{
public:
  AffineFields(const AntennaParams& params, const ObjectiveField& f,
               const EscGains& gains);

  Vec3 Y0(const Vec3& omega) const;
  Vec3 Y1(const Vec2& theta) const;
  Vec3 Y2(const Vec2& theta) const;

  /// Analytic Jacobians dY_i/dtheta (3x2).
  Mat32 dY1(const Vec2& theta) const;
  Mat32 dY2(const Vec2& theta) const;

  ConfigField field1() const;
  ConfigField field2() const;

  /// <Y1:Y1> in closed form.
  Vec3 sym_Y1Y1(const Vec2& theta) const;
  /// <Y2:Y2> in closed form.
  Vec3 sym_Y2Y2(const Vec2& theta) const;

private:
  AntennaParams params_;
  const ObjectiveField* f_;
  EscGains gains_;
};

/**
 * <X:Y>(theta) = dX/dtheta J Y + dY/dtheta J X, with Jacobians by central
 * differences of the given step.
 */
Vec3 symmetric_product(const ConfigField& X, const ConfigField& Y,
                       const Vec2& theta, double step = 1e-6);

/// Same product from supplied Jacobians.
Vec3 symmetric_product(const Mat32& dX, const Vec3& X, const Mat32& dY,
                       const Vec3& Y, const Vec2& theta);

/// lambda1 = k1^2/Iy, r(theta1) = sin^2/Ix + cos^2/Iz, Lambda = diag{lambda1, k2^2 r}.
struct AveragedParams
{
  AveragedParams(const AntennaParams& params, const EscGains& gains);

  double lambda1;
  double k2;
  double inv_Ix;
  double inv_Iz;

  double r(double theta1) const;
  double dr(double theta1) const;
  Mat2 Lambda(double theta1) const;
  Vec2 lambda_bar_at(double theta1) const { return {lambda1, k2 * k2 * r(theta1)}; }
  double r_min() const;
  double r_max() const;
};

/// -(1/2) h grad h, i.e. -grad(h^2 / 4).
Vec2 averaged_forcing(const ObjectiveField& f, const Vec2& theta);

/// Averaged system: plant with generalized torque Lambda(theta1) (-(1/2) h grad h).
StateDerivative averaged_rhs(const AntennaParams& params,
                             const ObjectiveField& f,
                             const EscGains& gains,
                             const PlantState& state);

/**
 * Mean of the gyroscopic term over one dither period,
 * -(1/2) I^{-1} sum_i C(Y_i) Y_i. It is left out of the averaged system
 * above; Y2 contributes along the body j axis unless sin(2 theta1) = 0.
 */
Vec3 gyroscopic_average(const AntennaParams& params, const AffineFields& fields,
                        const Vec2& theta);

/// averaged_rhs plus gyroscopic_average in the omega equation.
StateDerivative averaged_gyroscopic_rhs(const AntennaParams& params,
                                        const ObjectiveField& f,
                                        const EscGains& gains,
                                        const PlantState& state);

/// Frozen system: constant Lambda = diag(lambda_bar) in place of Lambda(theta1).
StateDerivative frozen_rhs(const AntennaParams& params,
                           const ObjectiveField& f,
                           const Vec2& lambda_bar,
                           const PlantState& state);

/// (theta, omega - sum_i U_i(t/eps) Y_i(theta)).
PlantState tilde_transform(const PlantState& state, const DitherPair& dither,
                           const AffineFields& fields, const EscGains& gains,
                           double t);

/// Inverse of tilde_transform at time t.
PlantState tilde_inverse(const PlantState& tilde, const DitherPair& dither,
                         const AffineFields& fields, const EscGains& gains,
                         double t);

enum class AveragedModel
{
  printed,     // averaged_rhs
  gyroscopic,  // averaged_gyroscopic_rhs
};

std::string to_string(AveragedModel model);

struct ConvergenceSetup
{
  AntennaParams params;
  ObjectivePtr objective;
  EscGains gains;  // epsilon is overridden per sweep entry
  double dither_q{1.0};
  PlantState initial;  // averaged / tilde initial state
  double t0{0.0};
  double horizon{5.0};
  /// Step is eps * T_dither / steps_per_dither_period for both systems.
  int steps_per_dither_period{200};
  AveragedModel model{AveragedModel::gyroscopic};
};

struct DeviationRow
{
  double epsilon;
  double sup_deviation;
  double horizon;
  double dt;
  std::optional<std::string> error;
};

struct DeviationReport
{
  AveragedModel model{AveragedModel::gyroscopic};
  std::vector<DeviationRow> rows;

  bool strictly_decreasing() const;
  void write_csv(std::ostream& os) const;
};

/**
 * For each eps, integrate the closed loop from tilde_inverse(initial, t0)
 * and the averaged system from initial on the same grid, and record
 * sup_t |tilde(x(t)) - xbar(t)| (joint Euclidean norm). eps_list must be
 * strictly decreasing and positive. Integration failures are recorded per
 * row.
 */
DeviationReport converging_trajectories_experiment(
  const ConvergenceSetup& setup, const std::vector<double>& eps_list);

}  // namespace esc

#endif  // ESC_AVERAGING_HPP

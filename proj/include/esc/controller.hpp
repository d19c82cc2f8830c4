#ifndef ESC_CONTROLLER_HPP
#define ESC_CONTROLLER_HPP

#include <functional>

#include "esc/model.hpp"
#include "esc/objective.hpp"

namespace esc
{

/**
 * Two T-periodic zero-mean dithers u1, u2 with zero-mean antiderivatives
 * U1, U2. The ESC law needs int_0^T Ui Uj = (T/2) delta_ij; see
 * check_dither.
 */
class DitherPair
{
public:
  using Signal = std::function<double(double)>;

  DitherPair(double period, Signal u1, Signal u2, Signal U1, Signal U2);

  double period() const { return period_; }
  double u1(double s) const { return u1_(s); }
  double u2(double s) const { return u2_(s); }
  double U1(double s) const { return U1_(s); }
  double U2(double s) const { return U2_(s); }
  Vec2 u(double s) const { return {u1_(s), u2_(s)}; }
  Vec2 U(double s) const { return {U1_(s), U2_(s)}; }

private:
  double period_;
  Signal u1_, u2_, U1_, U2_;
};

/// u1 = q cos(q s), u2 = q sin(q s), U1 = sin(q s), U2 = -cos(q s).
/// The amplitude q keeps int_0^T U_i U_j = (T/2) delta_ij for every q;
/// q = 1 is the plain cos/sin pair. Throws std::invalid_argument for q = 0.
DitherPair dither_cos_sin(double q);

struct DitherCheck
{
  Vec2 mean_u;     // (1/T) int u_i
  Vec2 mean_U;     // (1/T) int U_i
  Mat2 gram;       // int_0^T U_i U_j
  double orthogonality_residual;  // max |gram - (T/2) I|
};

/// Periodic trapezoid quadrature over one period with n nodes.
DitherCheck check_dither(const DitherPair& dither, int n_nodes = 4096);

struct EscGains
{
  double epsilon{0.01};
  double k1{0.2};
  double k2{0.1};

  void validate() const;
  Mat2 K() const { return Vec2{k1, k2}.asDiagonal(); }
};

/// Scalar measurement of the cost at the current attitude.
using Measurement = std::function<double(const Vec2&)>;

Measurement measure(const ObjectiveField& f);

/// tau_i = (k_i / eps) u_i(t / eps) h_meas. Uses nothing but (t, h_meas).
Torque esc_torque(const EscGains& gains,
                  const DitherPair& dither,
                  double t,
                  double h_meas);

/// Plant driven by esc_torque with the measurement taken at state.theta.
StateDerivative closed_loop_rhs(const AntennaParams& params,
                                const Measurement& measurement,
                                const EscGains& gains,
                                const DitherPair& dither,
                                double t,
                                const PlantState& state);

StateDerivative closed_loop_rhs(const AntennaParams& params,
                                const ObjectiveField& f,
                                const EscGains& gains,
                                const DitherPair& dither,
                                double t,
                                const PlantState& state);

}  // namespace esc

#endif  // ESC_CONTROLLER_HPP

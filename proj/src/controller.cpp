#include "esc/controller.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace esc
{

DitherPair::DitherPair(double period, Signal u1, Signal u2, Signal U1, Signal U2)
  : period_(period),
    u1_(std::move(u1)),
    u2_(std::move(u2)),
    U1_(std::move(U1)),
    U2_(std::move(U2))
{
  if (!std::isfinite(period) || period <= 0.0)
  {
    throw std::invalid_argument("DitherPair: period must be > 0");
  }
  if (!u1_ || !u2_ || !U1_ || !U2_)
  {
    throw std::invalid_argument("DitherPair: all four signals are required");
  }
}

DitherPair dither_cos_sin(double q)
{
  if (!std::isfinite(q) || q == 0.0)
  {
    throw std::invalid_argument("dither_cos_sin: q must be finite and nonzero");
  }
  return DitherPair(
    2.0 * std::numbers::pi / std::abs(q),
    [q](double s) { return q * std::cos(q * s); },
    [q](double s) { return q * std::sin(q * s); },
    [q](double s) { return std::sin(q * s); },
    [q](double s) { return -std::cos(q * s); });
}

DitherCheck check_dither(const DitherPair& dither, int n_nodes)
{
  if (n_nodes < 2)
  {
    throw std::invalid_argument("check_dither: need at least two nodes");
  }
  const double T = dither.period();
  const double h = T / n_nodes;
  Vec2 sum_u = Vec2::Zero();
  Vec2 sum_U = Vec2::Zero();
  Mat2 gram = Mat2::Zero();
  for (int k = 0; k < n_nodes; ++k)
  {
    const double s = k * h;
    const Vec2 U = dither.U(s);
    sum_u += dither.u(s);
    sum_U += U;
    gram += U * U.transpose();
  }
  DitherCheck out;
  out.mean_u = sum_u / n_nodes;
  out.mean_U = sum_U / n_nodes;
  out.gram = gram * h;
  out.orthogonality_residual =
    (out.gram - 0.5 * T * Mat2::Identity()).cwiseAbs().maxCoeff();
  return out;
}

void EscGains::validate() const
{
  if (!(epsilon > 0.0) || !(k1 > 0.0) || !(k2 > 0.0) ||
      !std::isfinite(epsilon) || !std::isfinite(k1) || !std::isfinite(k2))
  {
    throw std::invalid_argument("EscGains: epsilon, k1, k2 must be finite and > 0");
  }
}

Measurement measure(const ObjectiveField& f)
{
  return [&f](const Vec2& theta) { return f.value(theta); };
}

Torque esc_torque(const EscGains& gains,
                  const DitherPair& dither,
                  double t,
                  double h_meas)
{
  const double s = t / gains.epsilon;
  const double scale = h_meas / gains.epsilon;
  return Torque{{gains.k1 * dither.u1(s) * scale,
                 gains.k2 * dither.u2(s) * scale}};
}

StateDerivative closed_loop_rhs(const AntennaParams& params,
                                const Measurement& measurement,
                                const EscGains& gains,
                                const DitherPair& dither,
                                double t,
                                const PlantState& state)
{
  const Torque tau = esc_torque(gains, dither, t, measurement(state.theta));
  return el_rhs(params, state, tau);
}

StateDerivative closed_loop_rhs(const AntennaParams& params,
                                const ObjectiveField& f,
                                const EscGains& gains,
                                const DitherPair& dither,
                                double t,
                                const PlantState& state)
{
  return closed_loop_rhs(params, measure(f), gains, dither, t, state);
}

}  // namespace esc

#include "esc/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace esc
{

namespace
{

void require_positive(double value, const char* name)
{
  if (!std::isfinite(value) || value <= 0.0)
  {
    throw std::invalid_argument(std::string("AntennaParams: ") + name +
                                " must be finite and > 0");
  }
}

}  // namespace

void AntennaParams::validate() const
{
  require_positive(Ix, "Ix");
  require_positive(Iy, "Iy");
  require_positive(Iz, "Iz");
  require_positive(d1, "d1");
  require_positive(d2, "d2");
}

double AntennaParams::inertia_min() const
{
  return std::min({Ix, Iy, Iz});
}

double AntennaParams::inertia_max() const
{
  return std::max({Ix, Iy, Iz});
}

double AntennaParams::damping_min() const
{
  return std::min(d1, d2);
}

double AntennaParams::damping_max() const
{
  return std::max(d1, d2);
}

StateVector pack(const PlantState& s)
{
  StateVector x;
  x << s.theta, s.omega;
  return x;
}

StateVector pack(const StateDerivative& d)
{
  StateVector x;
  x << d.theta_dot, d.omega_dot;
  return x;
}

PlantState unpack(const StateVector& x)
{
  return PlantState{x.head<2>(), x.tail<3>()};
}

Mat23 kinematics_map(const Vec2& theta)
{
  const double s = std::sin(theta[0]);
  const double c = std::cos(theta[0]);
  Mat23 J;
  J << 0.0, 1.0, 0.0,
       -s, 0.0, c;
  return J;
}

Mat23 kinematics_map_dtheta1(const Vec2& theta)
{
  const double s = std::sin(theta[0]);
  const double c = std::cos(theta[0]);
  Mat23 dJ;
  dJ << 0.0, 0.0, 0.0,
        -c, 0.0, -s;
  return dJ;
}

Mat3 coriolis_matrix(const AntennaParams& p, const Vec3& w)
{
  Mat3 C;
  C << 0.0, p.Iz * w.z(), -p.Iy * w.y(),
       -p.Iz * w.z(), 0.0, p.Ix * w.x(),
       p.Iy * w.y(), -p.Ix * w.x(), 0.0;
  return C;
}

StateDerivative el_rhs(const AntennaParams& params,
                       const PlantState& state,
                       const Torque& tau)
{
  const Mat23 J = kinematics_map(state.theta);
  const Vec3 generalized = -coriolis_matrix(params, state.omega) * state.omega -
                           params.damping_diagonal().cwiseProduct(state.omega) +
                           J.transpose() * tau.tau;
  return {J * state.omega,
          generalized.cwiseQuotient(params.inertia_diagonal())};
}

StateDerivative euler_rhs_check(const AntennaParams& p,
                                const PlantState& state,
                                const Torque& tau)
{
  const double s = std::sin(state.theta[0]);
  const double c = std::cos(state.theta[0]);
  const double wx = state.omega.x();
  const double wy = state.omega.y();
  const double wz = state.omega.z();

  const double theta1_dot = wy;
  const double theta2_dot = -wx * s + wz * c;

  const double Mx = -tau.tau[1] * s + p.d2 * theta2_dot * s;
  const double My = tau.tau[0] - p.d1 * theta1_dot;
  const double Mz = tau.tau[1] * c - p.d2 * theta2_dot * c;

  StateDerivative out;
  out.theta_dot = {theta1_dot, theta2_dot};
  out.omega_dot = {(Mx + (p.Iy - p.Iz) * wy * wz) / p.Ix,
                   (My + (p.Iz - p.Ix) * wz * wx) / p.Iy,
                   (Mz + (p.Ix - p.Iy) * wx * wy) / p.Iz};
  return out;
}

double kinetic_energy(const AntennaParams& params, const Vec3& omega)
{
  return 0.5 * omega.dot(params.inertia_diagonal().cwiseProduct(omega));
}

}  // namespace esc

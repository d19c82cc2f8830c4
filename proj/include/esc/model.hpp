#ifndef ESC_MODEL_HPP
#define ESC_MODEL_HPP

#include <Eigen/Dense>

namespace esc
{

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Flattened (theta1, theta2, omega_x, omega_y, omega_z) for the integrator.
using StateVector = Eigen::Matrix<double, 5, 1>;

/**
 * Rigid-body data of the 2-DOF antenna.
 *
 * Inertias are principal moments about the body i, j, k axes [kg m^2].
 * d1 damps the elevation joint (about j), d2 the azimuth joint (about the
 * vertical K). The body-frame damping matrix is D = diag{d2, d1, d2}.
 */
struct AntennaParams
{
  double Ix{0.0833};
  double Iy{0.3083};
  double Iz{0.15};
  double d1{0.1};
  double d2{0.1};

  /// Throws std::invalid_argument unless every field is finite and positive.
  void validate() const;

  Mat3 inertia() const { return Vec3{Ix, Iy, Iz}.asDiagonal(); }
  Vec3 inertia_diagonal() const { return {Ix, Iy, Iz}; }
  Mat3 damping() const { return Vec3{d2, d1, d2}.asDiagonal(); }
  Vec3 damping_diagonal() const { return {d2, d1, d2}; }

  double inertia_min() const;
  double inertia_max() const;
  double damping_min() const;
  double damping_max() const;
};

struct PlantState
{
  Vec2 theta{Vec2::Zero()};  // elevation, azimuth [rad], unwrapped
  Vec3 omega{Vec3::Zero()};  // body rates [rad/s]

  bool finite() const { return theta.allFinite() && omega.allFinite(); }
};

struct Torque
{
  Vec2 tau{Vec2::Zero()};  // [N m]
};

struct StateDerivative
{
  Vec2 theta_dot{Vec2::Zero()};
  Vec3 omega_dot{Vec3::Zero()};
};

StateVector pack(const PlantState& s);
StateVector pack(const StateDerivative& d);
PlantState unpack(const StateVector& x);

/// J(theta): maps body rates to angle rates. Rows have unit norm, so J J^T = I.
Mat23 kinematics_map(const Vec2& theta);

/// dJ/dtheta1 (J does not depend on theta2).
Mat23 kinematics_map_dtheta1(const Vec2& theta);

/// Skew-symmetric gyroscopic matrix C(omega).
Mat3 coriolis_matrix(const AntennaParams& params, const Vec3& omega);

/// theta_dot = J omega,  I omega_dot = -C(omega) omega - D omega + J^T tau.
StateDerivative el_rhs(const AntennaParams& params,
                       const PlantState& state,
                       const Torque& tau);

/**
 * Same dynamics assembled from the principal-axis Euler equations and the
 * joint moments (tau_1 - d1 theta1_dot) j + (tau_2 - d2 theta2_dot) K.
 *
 * Joint rates are recovered from omega through theta_dot = J omega. The two
 * forms agree exactly on admissible states, i.e. omega = J^T theta_dot. Off
 * that subspace they differ in the damping of the component of omega along
 * (cos theta1, 0, sin theta1), which the joint moments cannot see.
 */
StateDerivative euler_rhs_check(const AntennaParams& params,
                                const PlantState& state,
                                const Torque& tau);

/// 0.5 omega^T I omega.
double kinetic_energy(const AntennaParams& params, const Vec3& omega);

}  // namespace esc

#endif  // ESC_MODEL_HPP

#include <cmath>

#include <gtest/gtest.h>

#include "esc/controller.hpp"

namespace
{

using namespace esc;

TEST(Dither, RejectsZeroFrequency)
{
  EXPECT_THROW(dither_cos_sin(0.0), std::invalid_argument);
  EXPECT_THROW(dither_cos_sin(std::nan("")), std::invalid_argument);
}

TEST(Dither, PeriodAndSignals)
{
  const DitherPair d = dither_cos_sin(1.0);
  EXPECT_DOUBLE_EQ(d.period(), 2 * M_PI);
  EXPECT_DOUBLE_EQ(d.u1(0.3), std::cos(0.3));
  EXPECT_DOUBLE_EQ(d.u2(0.3), std::sin(0.3));
  EXPECT_DOUBLE_EQ(dither_cos_sin(-2.0).period(), M_PI);
}

TEST(Dither, AntiderivativesDifferentiateToSignals)
{
  const double h = 1e-6;
  for (double q : {1.0, 2.0, 5.0, -3.0})
  {
    const DitherPair d = dither_cos_sin(q);
    for (double s : {0.0, 0.4, 1.7, 3.3})
    {
      EXPECT_NEAR((d.U1(s + h) - d.U1(s - h)) / (2 * h), d.u1(s), 1e-8);
      EXPECT_NEAR((d.U2(s + h) - d.U2(s - h)) / (2 * h), d.u2(s), 1e-8);
      EXPECT_NEAR(d.u1(s + d.period()), d.u1(s), 1e-12);
      EXPECT_NEAR(d.U2(s + d.period()), d.U2(s), 1e-12);
    }
  }
}

TEST(Dither, OrthogonalityQuadrature)
{
  for (double q : {1.0, 2.0, 5.0})
  {
    const DitherPair d = dither_cos_sin(q);
    const DitherCheck c = check_dither(d);
    const double T = d.period();
    EXPECT_LE(c.mean_u.cwiseAbs().maxCoeff(), 1e-10) << q;
    EXPECT_LE(c.mean_U.cwiseAbs().maxCoeff(), 1e-10) << q;
    EXPECT_NEAR(c.gram(0, 0), T / 2, 1e-8) << q;
    EXPECT_NEAR(c.gram(1, 1), T / 2, 1e-8) << q;
    EXPECT_NEAR(c.gram(0, 1), 0.0, 1e-8) << q;
    EXPECT_LE(c.orthogonality_residual, 1e-8) << q;
  }
  // q = 2: T = pi, integrals (pi/2) delta_ij.
  const DitherCheck c2 = check_dither(dither_cos_sin(2.0));
  EXPECT_NEAR(c2.gram(0, 0), M_PI / 2, 1e-8);
}

TEST(Dither, QuadratureDetectsBadPair)
{
  // Same frequency, unnormalized amplitude: int U1^2 = T / 8.
  const DitherPair bad(
    M_PI, [](double s) { return std::cos(2 * s); }, [](double s) { return std::sin(2 * s); },
    [](double s) { return std::sin(2 * s) / 2; }, [](double s) { return -std::cos(2 * s) / 2; });
  EXPECT_NEAR(check_dither(bad).gram(0, 0), M_PI / 8, 1e-10);
  EXPECT_GT(check_dither(bad).orthogonality_residual, 1.0);
  EXPECT_THROW(check_dither(bad, 1), std::invalid_argument);
}

TEST(Gains, Validation)
{
  EXPECT_NO_THROW(EscGains{}.validate());
  EXPECT_THROW((EscGains{0.0, 0.2, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((EscGains{0.01, -0.2, 0.1}.validate()), std::invalid_argument);
  EXPECT_EQ(EscGains{}.K(), Vec2(0.2, 0.1).asDiagonal().toDenseMatrix());
}

TEST(EscTorque, HandExample)
{
  const EscGains g{0.01, 0.2, 0.1};
  const Torque t = esc_torque(g, dither_cos_sin(1.0), 0.0, 0.2);
  EXPECT_NEAR(t.tau[0], 4.0, 1e-12);
  EXPECT_NEAR(t.tau[1], 0.0, 1e-12);
}

TEST(EscTorque, ZeroCrossingAndLinearity)
{
  const EscGains g{0.01, 0.2, 0.1};
  const DitherPair d = dither_cos_sin(1.0);
  EXPECT_NEAR(esc_torque(g, d, g.epsilon * M_PI / 2, 0.7).tau[0], 0.0, 1e-12);
  for (double t : {0.0, 0.0123, 0.5, 3.0})
  {
    const Vec2 a = esc_torque(g, d, t, 0.3).tau;
    const Vec2 b = esc_torque(g, d, t, 0.6).tau;
    EXPECT_LE((b - 2.0 * a).norm(), 1e-12);
  }
}

TEST(EscTorque, DependsOnMeasurementOnly)
{
  // Two attitudes with the same cost value get the same torque.
  const QuadraticObjective f(Vec2{0.0, 0.0}, 0.2);
  const Vec2 a{0.6, 0.8};
  const Vec2 b{-1.0, 0.0};
  ASSERT_DOUBLE_EQ(f.value(a), f.value(b));
  const EscGains g;
  const DitherPair d = dither_cos_sin(1.0);
  const Measurement m = measure(f);
  EXPECT_EQ(esc_torque(g, d, 0.37, m(a)).tau, esc_torque(g, d, 0.37, m(b)).tau);
}

TEST(ClosedLoop, DitherExcitesAtOptimum)
{
  const AntennaParams p;
  const QuadraticObjective f(Vec2{M_PI / 4, M_PI / 2}, 0.2);
  const EscGains g{0.01, 0.2, 0.1};
  PlantState x;
  x.theta = f.minimizer();
  const StateDerivative d = closed_loop_rhs(p, f, g, dither_cos_sin(1.0), 0.0, x);
  EXPECT_EQ(d.theta_dot, Vec2::Zero());
  EXPECT_NEAR(d.omega_dot[1], 4.0 / 0.3083, 1e-12);
  EXPECT_NEAR(d.omega_dot[1], 12.98, 1e-2);
}

TEST(ClosedLoop, ComposesPlantAndLaw)
{
  const AntennaParams p;
  const QuadraticObjective f(Vec2{0.3, -0.2}, 0.5);
  const EscGains g{0.02, 0.3, 0.15};
  const DitherPair d = dither_cos_sin(2.0);
  PlantState x;
  x.theta = {1.0, 0.5};
  x.omega = {0.1, -0.3, 0.2};
  for (double t : {0.0, 0.011, 0.9})
  {
    const StateDerivative a = closed_loop_rhs(p, f, g, d, t, x);
    const StateDerivative b = el_rhs(p, x, esc_torque(g, d, t, f.value(x.theta)));
    EXPECT_EQ(a.omega_dot, b.omega_dot);
    EXPECT_EQ(a.theta_dot, b.theta_dot);
    const StateDerivative shifted =
      closed_loop_rhs(p, f, g, d, t + g.epsilon * d.period(), x);
    EXPECT_LE((shifted.omega_dot - a.omega_dot).norm(), 1e-9);
  }
}

}  // namespace

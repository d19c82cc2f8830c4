#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "esc/averaging.hpp"
#include "esc/integrator.hpp"
#include "esc/scenario.hpp"

namespace
{

using namespace esc;

TEST(StepCount, SnapsNearIntegers)
{
  EXPECT_EQ(step_count(1.0, 1e-3), 1000);
  EXPECT_EQ(step_count(40.0, 0.01 * 2 * M_PI / 200), 127323);
  EXPECT_EQ(step_count(1.0, 0.3), 3);
  EXPECT_EQ(step_count(0.0, 0.1), 0);
}

TEST(Rk4, ConstantTrajectory)
{
  const auto xs = integrate_rk4([](double, double) { return 0.0; }, 3.5, 0.0, 2.0, 0.1);
  ASSERT_EQ(xs.size(), 21u);
  for (const auto& s : xs)
  {
    EXPECT_EQ(s.x, 3.5);
  }
}

TEST(Rk4, ExponentialDecay)
{
  const auto xs = integrate_rk4([](double, double x) { return -x; }, 1.0, 0.0, 1.0, 1e-3);
  EXPECT_EQ(xs.back().t, 1.0);
  EXPECT_NEAR(xs.back().x, std::exp(-1.0), 1e-10);
}

TEST(Rk4, FourthOrderConvergence)
{
  const auto end_error = [](double dt) {
    const auto xs =
      integrate_rk4([](double t, double x) { return std::cos(t) * x; }, 1.0, 0.0, 2.0, dt);
    return std::abs(xs.back().x - std::exp(std::sin(2.0)));
  };
  const double ratio = end_error(0.02) / end_error(0.01);
  EXPECT_NEAR(ratio, 16.0, 1.0);
}

TEST(Rk4, TimesComputedFromIndex)
{
  const double t0 = 0.1;
  const double dt = 0.1;
  const auto xs = integrate_rk4([](double, double) { return 0.0; }, 0.0, t0, 1.0, dt);
  for (std::size_t k = 0; k < xs.size(); ++k)
  {
    EXPECT_EQ(xs[k].t, t0 + static_cast<double>(k) * dt);
  }
}

TEST(Rk4, StrideSampleCount)
{
  for (int stride : {1, 3, 7, 10})
  {
    const auto xs =
      integrate_rk4([](double, double) { return 1.0; }, 0.0, 0.0, 1.0, 0.01, stride);
    EXPECT_EQ(xs.size(), static_cast<std::size_t>(100 / stride + 1));
    for (std::size_t k = 1; k < xs.size(); ++k)
    {
      EXPECT_GT(xs[k].t, xs[k - 1].t);
    }
  }
}

TEST(Rk4, BitIdenticalReruns)
{
  const auto rhs = [](double t, const Eigen::Vector2d& x) {
    return Eigen::Vector2d(x[1], -std::sin(x[0]) + 0.3 * std::cos(7.0 * t));
  };
  const auto a = integrate_rk4(rhs, Eigen::Vector2d(1.0, 0.0), 0.0, 10.0, 1e-3);
  const auto b = integrate_rk4(rhs, Eigen::Vector2d(1.0, 0.0), 0.0, 10.0, 1e-3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k)
  {
    EXPECT_EQ(a[k].t, b[k].t);
    EXPECT_EQ(a[k].x, b[k].x);
  }
}

TEST(Rk4, NonFiniteStateAbortsWithTime)
{
  try
  {
    integrate_rk4([](double, double x) { return x * x; }, 1.0, 0.0, 2.0, 1e-3);
    FAIL() << "expected IntegrationError";
  }
  catch (const IntegrationError& e)
  {
    // Blow-up of x' = x^2 from 1 is at t = 1.
    EXPECT_GT(e.time(), 0.9);
    EXPECT_LT(e.time(), 1.1);
  }
  EXPECT_THROW(integrate_rk4([](double, double) { return 0.0; },
                             std::numeric_limits<double>::infinity(), 0.0, 1.0, 0.1),
               IntegrationError);
}

TEST(Rk4, RejectsBadArguments)
{
  const auto rhs = [](double, double) { return 0.0; };
  EXPECT_THROW(integrate_rk4(rhs, 0.0, 0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(integrate_rk4(rhs, 0.0, 0.0, 1.0, -1e-3), std::invalid_argument);
  EXPECT_THROW(integrate_rk4(rhs, 0.0, 1.0, 0.0, 1e-3), std::invalid_argument);
  EXPECT_THROW(integrate_rk4(rhs, 0.0, 0.0, 1.0, 1e-3, 0), std::invalid_argument);
}

TEST(Rk4, StepHalvingOnAveragedSystem)
{
  const Scenario s = preset_paper_sec4();
  const ObjectivePtr f = s.objective.build();
  const auto rhs = [&](double, const StateVector& x) {
    return pack(averaged_rhs(s.params, *f, s.gains, unpack(x)));
  };
  for (const auto& ic : s.initial_states)
  {
    const StateVector x0 = pack(ic.state);
    const auto coarse = integrate_rk4(rhs, x0, 0.0, s.t_end, 1e-3, 1000);
    const auto fine = integrate_rk4(rhs, x0, 0.0, s.t_end, 5e-4, 2000);
    ASSERT_EQ(coarse.back().t, fine.back().t);
    EXPECT_LT((coarse.back().x - fine.back().x).norm(), 1e-8) << ic.label;
  }
}

}  // namespace

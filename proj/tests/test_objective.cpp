#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "esc/objective.hpp"

namespace
{

using namespace esc;

const Vec2 kTarget{M_PI / 4, M_PI / 2};

/// h = theta1 theta2: the simplest non-separable field.
class BilinearField final : public ObjectiveField
{
public:
  double value(const Vec2& t) const override { return t[0] * t[1]; }
  Vec2 gradient(const Vec2& t) const override { return {t[1], t[0]}; }
  Mat2 hessian(const Vec2&) const override { return (Mat2() << 0, 1, 1, 0).finished(); }
  Vec2 minimizer() const override { return Vec2::Zero(); }
  double hessian_bound() const override { return 1.0; }
  std::string name() const override { return "bilinear"; }
};

Mat2 fd_hessian(const ObjectiveField& f, const Vec2& theta, double h)
{
  Mat2 H;
  for (int j = 0; j < 2; ++j)
  {
    Vec2 e = Vec2::Zero();
    e[j] = h;
    H.col(j) = (f.gradient(theta + e) - f.gradient(theta - e)) / (2 * h);
  }
  return H;
}

TEST(Quadratic, ValuesAtKnownPoints)
{
  const QuadraticObjective f(kTarget, 0.2);
  EXPECT_DOUBLE_EQ(f.value(kTarget), 0.2);
  EXPECT_DOUBLE_EQ(f.min_value(), 0.2);
  EXPECT_NEAR(f.value(kTarget + Vec2{1.0, -2.0}), 0.2 + 0.5 * 5.0, 1e-15);
  EXPECT_EQ(f.gradient(kTarget), Vec2::Zero());
  EXPECT_EQ(f.hessian(Vec2{3, -1}), Mat2::Identity());
  EXPECT_THROW(QuadraticObjective(kTarget, 0.0), std::invalid_argument);
}

TEST(Objectives, DerivativesMatchFiniteDifferences)
{
  const QuadraticObjective q(kTarget, 0.2);
  const GaussianPowerObjective g(kTarget, 1.0, 0.8, 1.3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const ObjectiveField* f : {static_cast<const ObjectiveField*>(&q),
                                  static_cast<const ObjectiveField*>(&g)})
  {
    for (int k = 0; k < 100; ++k)
    {
      const Vec2 theta = kTarget + Vec2{u(rng), u(rng)};
      EXPECT_LE((fd_gradient(*f, theta, 1e-6) - f->gradient(theta)).norm(), 1e-8)
        << f->name();
      EXPECT_LE((fd_hessian(*f, theta, 1e-6) - f->hessian(theta)).norm(), 1e-8)
        << f->name();
    }
  }
}

TEST(Objectives, AnchoredComponentsOfQuadratic)
{
  const QuadraticObjective f(kTarget, 0.2);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k)
  {
    const Vec2 theta{u(rng), u(rng)};
    EXPECT_NEAR(f.h1(theta[0]) + f.h2(theta[1]), f.value(theta), 1e-14);
    EXPECT_NEAR(f.h1(theta[0]), 0.5 * std::pow(theta[0] - kTarget[0], 2) + 0.2, 1e-14);
    EXPECT_NEAR(f.h2(theta[1]), 0.5 * std::pow(theta[1] - kTarget[1], 2), 1e-14);
    EXPECT_NEAR(f.dh1(theta[0]), theta[0] - kTarget[0], 1e-14);
    EXPECT_NEAR(f.dh2(theta[1]), theta[1] - kTarget[1], 1e-14);
    EXPECT_DOUBLE_EQ(f.d2h1(theta[0]), 1.0);
    EXPECT_DOUBLE_EQ(f.d2h2(theta[1]), 1.0);
  }
  EXPECT_DOUBLE_EQ(f.h2(kTarget[1]), 0.0);
}

TEST(Objectives, GaussianPositiveAndBounded)
{
  EXPECT_THROW(GaussianPowerObjective(kTarget, 1.0, 0.8, 1.0), std::invalid_argument);
  EXPECT_THROW(GaussianPowerObjective(kTarget, 1.0, 0.0, 1.5), std::invalid_argument);
  const GaussianPowerObjective g(kTarget, 1.0, 0.8, 1.3);
  EXPECT_NEAR(g.min_value(), 0.3, 1e-15);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 500; ++k)
  {
    const Vec2 theta = kTarget + Vec2{u(rng), u(rng)};
    EXPECT_GT(g.value(theta), 0.0);
    EXPECT_LE(symmetric_norm(g.hessian(theta)), g.hessian_bound() + 1e-12);
  }
}

TEST(Validation, QuadraticPassesEverything)
{
  const QuadraticObjective f(kTarget, 0.2);
  const ValidationReport r = validate_assumptions(f, Box2::centered(kTarget, 3.0), 41);
  EXPECT_EQ(r.samples, 41 * 41);
  EXPECT_TRUE(r.positive);
  EXPECT_TRUE(r.separable);
  EXPECT_TRUE(r.hessian_bounded);
  EXPECT_TRUE(r.unique_critical_point);
  EXPECT_TRUE(r.all_passed());
  EXPECT_DOUBLE_EQ(r.min_value, 0.2);
  EXPECT_LE(r.max_separability_residual, 1e-12);
}

TEST(Validation, GaussianFlaggedNonSeparable)
{
  const GaussianPowerObjective g(kTarget, 1.0, 0.8, 1.3);
  const ValidationReport r = validate_assumptions(g, Box2::centered(kTarget, 2.0), 31);
  EXPECT_TRUE(r.positive);
  EXPECT_FALSE(r.separable);
  EXPECT_GT(r.max_separability_residual, 1e-3);
  EXPECT_FALSE(r.all_passed());
}

TEST(Validation, RejectsBadArguments)
{
  const QuadraticObjective f(kTarget, 0.2);
  EXPECT_THROW(validate_assumptions(f, Box2::centered(kTarget, 1.0), 0),
               std::invalid_argument);
  EXPECT_THROW(validate_assumptions(f, Box2::centered(Vec2{10.0, 10.0}, 1.0), 11),
               std::invalid_argument);
}

TEST(Box, GridAndContainment)
{
  const Box2 b = Box2::centered(Vec2{1.0, -1.0}, 0.5);
  EXPECT_TRUE(b.contains(Vec2{1.5, -0.5}));
  EXPECT_FALSE(b.contains(Vec2{1.6, -1.0}));
  EXPECT_EQ(b.grid_point(0, 0, 3), Vec2(0.5, -1.5));
  EXPECT_EQ(b.grid_point(2, 2, 3), Vec2(1.5, -0.5));
  EXPECT_EQ(b.grid_point(1, 1, 3), Vec2(1.0, -1.0));
  EXPECT_EQ(b.grid_point(0, 0, 1), Vec2(1.0, -1.0));
}

TEST(SymmetricNorm, MatchesEigenvalues)
{
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k)
  {
    Mat2 m;
    m << u(rng), u(rng), 0.0, u(rng);
    m(1, 0) = m(0, 1);
    const Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    EXPECT_NEAR(symmetric_norm(m), es.eigenvalues().cwiseAbs().maxCoeff(), 1e-12);
  }
}


TEST(Validation, BilinearFlaggedNonSeparable)
{
  const BilinearField f;
  EXPECT_NEAR(f.value(Vec2{1, 1}) - f.h1(1.0) - f.h2(1.0), 1.0, 1e-15);
  const ValidationReport r = validate_assumptions(f, Box2::centered(Vec2::Zero(), 1.0), 11);
  EXPECT_FALSE(r.separable);
  EXPECT_NEAR(r.max_separability_residual, 1.0, 1e-12);
}

TEST(FdGradient, QuadraticExamples)
{
  const QuadraticObjective f(kTarget, 0.2);
  EXPECT_LE(fd_gradient(f, kTarget, 1e-5).norm(), 1e-9);
  EXPECT_LE((fd_gradient(f, kTarget + Vec2{1.0, 0.0}, 1e-5) - Vec2{1.0, 0.0}).norm(), 1e-8);
  EXPECT_THROW(fd_gradient(f, kTarget, 0.0), std::invalid_argument);
  EXPECT_NEAR(f.value(kTarget + Vec2{0.3, -0.4}) - f.min_value(), 0.5 * 0.25, 1e-15);
}

}  // namespace

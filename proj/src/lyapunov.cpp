#include "esc/lyapunov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "esc/integrator.hpp"

namespace esc
{

namespace
{

const double kSqrt6 = std::sqrt(6.0);

std::array<Vec2, 4> lambda_corners(double lo, double hi)
{
  return {Vec2{lo, lo}, Vec2{lo, hi}, Vec2{hi, lo}, Vec2{hi, hi}};
}

std::string format_state(const Vec2& theta, const Vec3& omega)
{
  std::ostringstream os;
  os.precision(6);
  os << "theta=(" << theta[0] << "," << theta[1] << ") omega=(" << omega[0]
     << "," << omega[1] << "," << omega[2] << ")";
  return os.str();
}

}  // namespace

void CertificateConfig::validate() const
{
  params.validate();
  if (!objective)
  {
    throw std::invalid_argument("CertificateConfig: objective is required");
  }
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min))
  {
    throw std::invalid_argument(
      "CertificateConfig: need 0 < lambda_min <= lambda_max");
  }
  for (int i = 0; i < 2; ++i)
  {
    if (!(lambda_bar[i] >= lambda_min) || !(lambda_bar[i] <= lambda_max))
    {
      throw std::invalid_argument(
        "CertificateConfig: lambda_bar outside [lambda_min, lambda_max]");
    }
  }
  if (!(hbar_M > 0.0) || !std::isfinite(hbar_M))
  {
    throw std::invalid_argument("CertificateConfig: hbar_M must be > 0");
  }
}

double hbar(const ObjectiveField& f, const Vec2& lambda, const Vec2& theta)
{
  return lambda[0] * f.h1(theta[0]) + lambda[1] * f.h2(theta[1]);
}

Vec2 hbar_gradient(const ObjectiveField& f, const Vec2& lambda, const Vec2& theta)
{
  return {lambda[0] * f.dh1(theta[0]), lambda[1] * f.dh2(theta[1])};
}

Mat2 hbar_hessian(const ObjectiveField& f, const Vec2& lambda, const Vec2& theta)
{
  return Vec2{lambda[0] * f.d2h1(theta[0]), lambda[1] * f.d2h2(theta[1])}
    .asDiagonal();
}

double weak_lyapunov_V1(const AntennaParams& params, const ObjectiveField& f,
                        const Vec2& lambda, const Vec2& theta, const Vec3& omega)
{
  const double hb = hbar(f, lambda, theta);
  const double hs = hbar(f, lambda, f.minimizer());
  return kinetic_energy(params, omega) + 0.25 * hb * hb - 0.25 * hs * hs;
}

CertificateConfig make_certificate_config(const AntennaParams& params,
                                          ObjectivePtr objective,
                                          const Vec2& lambda_bar,
                                          const HessianSampling& sampling)
{
  return make_certificate_config(params, std::move(objective), lambda_bar,
                                 lambda_bar.minCoeff(), lambda_bar.maxCoeff(),
                                 sampling);
}

CertificateConfig make_certificate_config(const AntennaParams& params,
                                          ObjectivePtr objective,
                                          const Vec2& lambda_bar,
                                          double lambda_min,
                                          double lambda_max,
                                          const HessianSampling& sampling)
{
  if (!objective)
  {
    throw std::invalid_argument("make_certificate_config: objective is required");
  }
  const Box2 box = Box2::centered(objective->minimizer(), sampling.half_width);
  double sup = 0.0;
  for (const Vec2& lambda : lambda_corners(lambda_min, lambda_max))
  {
    for (int i = 0; i < sampling.grid; ++i)
    {
      for (int j = 0; j < sampling.grid; ++j)
      {
        const Vec2 theta = box.grid_point(i, j, sampling.grid);
        sup = std::max(sup, symmetric_norm(hbar_hessian(*objective, lambda, theta)));
      }
    }
  }
  CertificateConfig config{params, std::move(objective), lambda_bar,
                           lambda_min, lambda_max, sampling.safety * sup};
  config.validate();
  return config;
}

Majorants::Majorants(const CertificateConfig& config)
  : d_m_(config.params.damping_min()),
    d_M_(config.params.damping_max()),
    I_m_(config.params.inertia_min()),
    I_M_(config.params.inertia_max()),
    hbar_M_(config.hbar_M)
{
  config.validate();
  const ObjectiveField& f = *config.objective;
  const Vec2 star = f.minimizer();
  h_star_ = f.value(star);
  if (!(h_star_ > 0.0))
  {
    throw std::invalid_argument("Majorants: h(theta_*) must be > 0");
  }

  hbar_star_min_ = std::numeric_limits<double>::infinity();
  hess_lambda_min_ = std::numeric_limits<double>::infinity();
  for (const Vec2& lambda : lambda_corners(config.lambda_min, config.lambda_max))
  {
    hbar_star_min_ = std::min(hbar_star_min_, hbar(f, lambda, star));
    const Mat2 H = hbar_hessian(f, lambda, star);
    hess_lambda_min_ = std::min(hess_lambda_min_, H.diagonal().minCoeff());
  }
  if (!(hbar_star_min_ > 0.0))
  {
    throw std::invalid_argument("Majorants: hbar(theta_*) must be > 0");
  }
  if (!(hess_lambda_min_ > 0.0))
  {
    throw std::invalid_argument(
      "Majorants: Hessian of hbar at theta_* must be positive definite");
  }

  P0_ = std::max(12.0 * I_M_ * I_M_ / I_m_,
                 4.0 * hbar_M_ * hbar_M_ / (hbar_star_min_ * hess_lambda_min_));
}

double Majorants::P1(double l) const
{
  l = std::max(l, 0.0);
  return kSqrt6 * d_M_ + 8.0 * std::sqrt(3.0 * l) * I_M_ / std::sqrt(I_m_);
}

double Majorants::P2(double l) const
{
  const double p1 = P1(l);
  return 6.0 * hbar_M_ * I_M_ + p1 * p1 / h_star_;
}

double Majorants::P2_integral(double l) const
{
  // P1^2 = 6 d_M^2 + 16 sqrt18 d_M I_M sqrt(l / I_m) + 192 l I_M^2 / I_m
  l = std::max(l, 0.0);
  const double linear = 6.0 * hbar_M_ * I_M_ + 6.0 * d_M_ * d_M_ / h_star_;
  const double root = 16.0 * std::sqrt(18.0) * d_M_ * I_M_ /
                      (std::sqrt(I_m_) * h_star_);
  const double quad = 192.0 * I_M_ * I_M_ / (I_m_ * h_star_);
  return linear * l + root * (2.0 / 3.0) * l * std::sqrt(l) + 0.5 * quad * l * l;
}

double Majorants::P3(double l) const
{
  return P2_integral(l) / d_m_ + P0_ * std::max(l, 0.0);
}

double Majorants::P3_prime(double l) const
{
  return P2(l) / d_m_ + P0_;
}

Certificate::Certificate(CertificateConfig config)
  : config_(std::move(config)), majorants_(config_)
{
}

Certificate Certificate::with_lambda(const Vec2& lambda_bar) const
{
  Certificate copy = *this;
  copy.config_.lambda_bar = lambda_bar;
  return copy;
}

double Certificate::hbar(const Vec2& theta) const
{
  return esc::hbar(f(), lambda(), theta);
}

Vec2 Certificate::hbar_gradient(const Vec2& theta) const
{
  return esc::hbar_gradient(f(), lambda(), theta);
}

Mat2 Certificate::hbar_hessian(const Vec2& theta) const
{
  return esc::hbar_hessian(f(), lambda(), theta);
}

double Certificate::V1(const Vec2& theta, const Vec3& omega) const
{
  return weak_lyapunov_V1(config_.params, f(), lambda(), theta, omega);
}

StateGradient Certificate::V1_gradient(const Vec2& theta, const Vec3& omega) const
{
  return {0.5 * hbar(theta) * hbar_gradient(theta),
          config_.params.inertia_diagonal().cwiseProduct(omega)};
}

double Certificate::V1_dot_frozen(const Vec3& omega) const
{
  return -omega.dot(config_.params.damping_diagonal().cwiseProduct(omega));
}

double Certificate::V1_dot_frozen_exact(const Vec2& theta, const Vec3& omega) const
{
  const double mismatch = hbar(theta) - f().value(theta);
  return V1_dot_frozen(omega) +
         0.5 * mismatch * hbar_gradient(theta).dot(kinematics_map(theta) * omega);
}

double Certificate::V2(const Vec2& theta, const Vec3& omega) const
{
  const Vec3 momentum = config_.params.inertia_diagonal().cwiseProduct(omega);
  return hbar_gradient(theta).dot(kinematics_map(theta) * momentum);
}

StateGradient Certificate::V2_gradient(const Vec2& theta, const Vec3& omega) const
{
  const Vec3 momentum = config_.params.inertia_diagonal().cwiseProduct(omega);
  const Mat23 J = kinematics_map(theta);
  const Vec2 g = hbar_gradient(theta);
  StateGradient grad;
  grad.d_theta = hbar_hessian(theta) * (J * momentum);
  grad.d_theta[0] += g.dot(kinematics_map_dtheta1(theta) * momentum);
  grad.d_omega = config_.params.inertia_diagonal().cwiseProduct(J.transpose() * g);
  return grad;
}

double Certificate::V_lambda(const Vec2& theta, const Vec3& omega) const
{
  return V2(theta, omega) + majorants_.P3(V1(theta, omega));
}

StateGradient Certificate::V_lambda_gradient(const Vec2& theta,
                                             const Vec3& omega) const
{
  const double slope = majorants_.P3_prime(V1(theta, omega));
  const StateGradient g1 = V1_gradient(theta, omega);
  StateGradient g = V2_gradient(theta, omega);
  g.d_theta += slope * g1.d_theta;
  g.d_omega += slope * g1.d_omega;
  return g;
}

StateDerivative Certificate::frozen(const Vec2& theta, const Vec3& omega) const
{
  return frozen_rhs(config_.params, f(), lambda(), PlantState{theta, omega});
}

double Certificate::V_lambda_dot_frozen(const Vec2& theta, const Vec3& omega) const
{
  return V_lambda_gradient(theta, omega).along(frozen(theta, omega));
}

double Certificate::decrease_bound(const Vec2& theta, const Vec3& omega) const
{
  const double w2 = hbar_gradient(theta).squaredNorm();
  return -0.25 * majorants_.h_star() * w2 -
         majorants_.P0() * config_.params.damping_min() * omega.squaredNorm();
}

std::pair<double, double> Certificate::w_pair(const Vec2& theta) const
{
  const double hb = hbar(theta);
  const double hs = hbar(minimizer());
  return {0.25 * hb * hb - 0.25 * hs * hs, hbar_gradient(theta).squaredNorm()};
}

double Certificate::dV_lambda_dlambda2(const Vec2& theta, const Vec3& omega) const
{
  const Vec2 star = minimizer();
  const Vec3 momentum = config_.params.inertia_diagonal().cwiseProduct(omega);
  const double dV2 = Vec2{0.0, f().dh2(theta[1])}.dot(kinematics_map(theta) * momentum);
  const double dV1 = 0.5 * hbar(theta) * f().h2(theta[1]) -
                     0.5 * hbar(star) * f().h2(star[1]);
  return dV2 + majorants_.P3_prime(V1(theta, omega)) * dV1;
}

std::string NeighborhoodGrid::describe() const
{
  std::ostringstream os;
  os << "|theta-theta*|_inf<=" << theta_half_width << " (" << theta_points
     << "^2 pts), |omega|_inf<=" << omega_max << " (" << omega_points
     << "^3 pts)";
  return os.str();
}

namespace
{

/// Symmetric grid offsets; the middle point is exactly zero for odd n.
std::vector<double> offsets(double half_width, int n)
{
  std::vector<double> out;
  if (n <= 1)
  {
    out.push_back(0.0);
    return out;
  }
  for (int i = 0; i < n; ++i)
  {
    out.push_back(half_width * (2.0 * i - (n - 1)) / (n - 1));
  }
  return out;
}

template <typename Visit>
void for_each_grid_state(const Vec2& center, const NeighborhoodGrid& grid,
                         Visit&& visit)
{
  const auto th = offsets(grid.theta_half_width, grid.theta_points);
  const auto om = offsets(grid.omega_max, grid.omega_points);
  for (double a : th)
    for (double b : th)
      for (double x : om)
        for (double y : om)
          for (double z : om)
          {
            const Vec2 e{a, b};
            visit(Vec2(center + e), Vec3{x, y, z}, e.isZero(0.0) && x == 0.0 &&
                                                     y == 0.0 && z == 0.0);
          }
}

struct RandomStates
{
  RandomStates(std::uint64_t seed, const Vec2& center, double theta_half,
               double omega_max)
    : rng(seed), center(center), th(-theta_half, theta_half), om(-omega_max, omega_max)
  {
  }

  std::pair<Vec2, Vec3> next()
  {
    Vec2 theta{center[0] + th(rng), center[1] + th(rng)};
    Vec3 omega{om(rng), om(rng), om(rng)};
    return {theta, omega};
  }

  std::mt19937_64 rng;
  Vec2 center;
  std::uniform_real_distribution<double> th;
  std::uniform_real_distribution<double> om;
};

}  // namespace

CheckResult check_V1_dot_identity(const Certificate& cert, int n_samples,
                                  std::uint64_t seed, double theta_half_width,
                                  double omega_max, double tolerance)
{
  CheckResult r;
  r.name = "V1_dot_frozen_identity";
  {
    std::ostringstream os;
    os << n_samples << " random states, |theta-theta*|_inf<=" << theta_half_width
       << ", |omega|_inf<=" << omega_max << ", tol " << tolerance;
    r.region = os.str();
  }
  RandomStates rs(seed, cert.minimizer(), theta_half_width, omega_max);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k)
  {
    const auto [theta, omega] = rs.next();
    const double chain = cert.V1_gradient(theta, omega).along(cert.frozen(theta, omega));
    const double margin = tolerance - std::abs(chain - cert.V1_dot_frozen(omega));
    if (margin < worst)
    {
      worst = margin;
      r.worst_at = format_state(theta, omega);
    }
    ++r.samples;
  }
  r.worst_margin = worst;
  r.pass = worst >= 0.0;
  return r;
}

CheckResult check_V1_dot_exact(const Certificate& cert, int n_samples,
                               std::uint64_t seed, double theta_half_width,
                               double omega_max, double tolerance)
{
  CheckResult r;
  r.name = "V1_dot_frozen_exact";
  {
    std::ostringstream os;
    os << n_samples << " random states, |theta-theta*|_inf<=" << theta_half_width
       << ", |omega|_inf<=" << omega_max << ", tol " << tolerance;
    r.region = os.str();
  }
  RandomStates rs(seed, cert.minimizer(), theta_half_width, omega_max);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k)
  {
    const auto [theta, omega] = rs.next();
    const double chain = cert.V1_gradient(theta, omega).along(cert.frozen(theta, omega));
    const double margin =
      tolerance - std::abs(chain - cert.V1_dot_frozen_exact(theta, omega));
    if (margin < worst)
    {
      worst = margin;
      r.worst_at = format_state(theta, omega);
    }
    ++r.samples;
  }
  r.worst_margin = worst;
  r.pass = worst >= 0.0;
  return r;
}

CheckResult check_decrease_random(const Certificate& cert, int n_samples,
                                  std::uint64_t seed, const NeighborhoodGrid& box)
{
  CheckResult r;
  r.name = "V_lambda_decrease_random";
  {
    std::ostringstream os;
    os << n_samples << " random states, |theta-theta*|_inf<=" << box.theta_half_width
       << ", |omega|_inf<=" << box.omega_max << ", |omega| scale log-uniform down to 1e-4";
    r.region = os.str();
  }
  RandomStates rs(seed, cert.minimizer(), box.theta_half_width, box.omega_max);
  std::uniform_real_distribution<double> decade(-4.0, 0.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k)
  {
    auto [theta, omega] = rs.next();
    omega *= std::pow(10.0, decade(rs.rng));
    const double margin =
      cert.decrease_bound(theta, omega) - cert.V_lambda_dot_frozen(theta, omega);
    if (margin < worst)
    {
      worst = margin;
      r.worst_at = format_state(theta, omega);
    }
    ++r.samples;
  }
  r.worst_margin = worst;
  r.pass = worst >= 0.0;
  return r;
}

CheckResult check_decrease_grid(const Certificate& cert, const NeighborhoodGrid& grid)
{
  CheckResult r;
  r.name = "V_lambda_decrease";
  r.region = grid.describe();
  double worst = std::numeric_limits<double>::infinity();
  bool origin_ok = true;
  for_each_grid_state(cert.minimizer(), grid,
                      [&](const Vec2& theta, const Vec3& omega, bool origin) {
                        const double margin = cert.decrease_bound(theta, omega) -
                                              cert.V_lambda_dot_frozen(theta, omega);
                        ++r.samples;
                        if (origin)
                        {
                          origin_ok = margin >= 0.0;
                          return;
                        }
                        if (margin < worst)
                        {
                          worst = margin;
                          r.worst_at = format_state(theta, omega);
                        }
                      });
  r.worst_margin = worst;
  r.pass = origin_ok && worst >= 0.0;
  return r;
}

CheckResult check_positivity_grid(const Certificate& cert, const NeighborhoodGrid& grid)
{
  CheckResult r;
  r.name = "V_lambda_positive";
  r.region = grid.describe();
  double worst = std::numeric_limits<double>::infinity();
  bool origin_ok = true;
  for_each_grid_state(cert.minimizer(), grid,
                      [&](const Vec2& theta, const Vec3& omega, bool origin) {
                        const double v = cert.V_lambda(theta, omega);
                        ++r.samples;
                        if (origin)
                        {
                          origin_ok = v == 0.0;
                          return;
                        }
                        if (v < worst)
                        {
                          worst = v;
                          r.worst_at = format_state(theta, omega);
                        }
                      });
  r.worst_margin = worst;
  r.pass = origin_ok && worst > 0.0;
  return r;
}

CheckResult check_V2_bound(const Certificate& cert, int n_samples, std::uint64_t seed)
{
  CheckResult r;
  r.name = "V2_bound";
  r.region = std::to_string(n_samples) +
             " random states, |theta-theta*|_inf<=3, |omega|_inf<=2";
  const double I_M = cert.config().params.inertia_max();
  RandomStates rs(seed, cert.minimizer(), 3.0, 2.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k)
  {
    const auto [theta, omega] = rs.next();
    const double bound =
      kSqrt6 * I_M * cert.hbar_gradient(theta).norm() * omega.norm();
    const double margin = bound - std::abs(cert.V2(theta, omega));
    if (margin < worst)
    {
      worst = margin;
      r.worst_at = format_state(theta, omega);
    }
    ++r.samples;
  }
  r.worst_margin = worst;
  r.pass = worst >= 0.0;
  return r;
}

CheckResult check_young_step(const Certificate& cert, int n_samples,
                             std::uint64_t seed)
{
  CheckResult r;
  r.name = "young_inequality_step";
  r.region = std::to_string(n_samples) +
             " random states, |theta-theta*|_inf<=3, |omega|_inf<=2";
  const Majorants& P = cert.majorants();
  const double hs = P.h_star();
  RandomStates rs(seed, cert.minimizer(), 3.0, 2.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k)
  {
    const auto [theta, omega] = rs.next();
    const double p1 = P.P1(cert.V1(theta, omega));
    const double g = cert.hbar_gradient(theta).norm();
    const double w = omega.norm();
    const double margin = 0.25 * hs * g * g + p1 * p1 * w * w / hs - p1 * g * w;
    if (margin < worst)
    {
      worst = margin;
      r.worst_at = format_state(theta, omega);
    }
    ++r.samples;
  }
  r.worst_margin = worst;
  r.pass = worst >= 0.0;
  return r;
}

CheckResult check_majorant_monotonicity(const Certificate& cert, double l_max,
                                        int n_points)
{
  CheckResult r;
  r.name = "majorants_nonneg_nondecreasing";
  r.region = "l in [0, " + std::to_string(l_max) + "], " +
             std::to_string(n_points) + " points";
  const Majorants& P = cert.majorants();
  double worst = P.P0();
  std::array<double, 3> prev{P.P1(0.0), P.P2(0.0), P.P3(0.0)};
  worst = std::min({worst, prev[0], prev[1], prev[2]});
  for (int k = 1; k < n_points; ++k)
  {
    const double l = l_max * k / (n_points - 1);
    const std::array<double, 3> cur{P.P1(l), P.P2(l), P.P3(l)};
    for (std::size_t i = 0; i < cur.size(); ++i)
    {
      const double step = cur[i] - prev[i];
      if (step < worst)
      {
        worst = step;
        r.worst_at = "P" + std::to_string(i + 1) + " at l=" + std::to_string(l);
      }
    }
    prev = cur;
    ++r.samples;
  }
  r.worst_margin = worst;
  r.pass = worst >= 0.0;
  return r;
}

CheckResult check_w_positive(const Certificate& cert, int n_samples,
                             std::uint64_t seed)
{
  CheckResult r;
  r.name = "w1_w2_positive_definite";
  r.region = std::to_string(n_samples) + " random theta, |theta-theta*|_inf<=3";
  const auto [w1s, w2s] = cert.w_pair(cert.minimizer());
  RandomStates rs(seed, cert.minimizer(), 3.0, 0.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k)
  {
    const Vec2 theta = rs.next().first;
    const auto [w1, w2] = cert.w_pair(theta);
    const double m = std::min(w1, w2);
    if (m < worst)
    {
      worst = m;
      r.worst_at = format_state(theta, Vec3::Zero());
    }
    ++r.samples;
  }
  r.worst_margin = worst;
  r.pass = w1s == 0.0 && w2s == 0.0 && worst > 0.0;
  return r;
}

SlowTrace slow_lambda2_trace(const std::vector<TimedState>& trajectory,
                             const AntennaParams& params, double k2)
{
  SlowTrace trace;
  const std::size_t n = trajectory.size();
  if (n == 0)
  {
    return trace;
  }
  const EscGains gains{1.0, 1.0, k2};
  const AveragedParams avg(params, gains);
  for (const auto& s : trajectory)
  {
    trace.t.push_back(s.t);
    trace.lambda2.push_back(k2 * k2 * avg.r(s.state.theta[0]));
  }
  trace.lambda2_dot.assign(n, 0.0);
  if (n >= 2)
  {
    for (std::size_t k = 0; k < n; ++k)
    {
      const std::size_t lo = k == 0 ? 0 : k - 1;
      const std::size_t hi = k + 1 == n ? n - 1 : k + 1;
      trace.lambda2_dot[k] =
        (trace.lambda2[hi] - trace.lambda2[lo]) / (trace.t[hi] - trace.t[lo]);
    }
  }
  trace.lambda2_min = *std::min_element(trace.lambda2.begin(), trace.lambda2.end());
  trace.lambda2_max = *std::max_element(trace.lambda2.begin(), trace.lambda2.end());
  for (double v : trace.lambda2_dot)
  {
    trace.sup_abs_lambda2_dot = std::max(trace.sup_abs_lambda2_dot, std::abs(v));
  }
  return trace;
}

double slow_system_derivative(const Certificate& cert, const AveragedParams& avg,
                              const PlantState& state)
{
  const Vec2& theta = state.theta;
  const Certificate at = cert.with_lambda(avg.lambda_bar_at(theta[0]));
  const double theta1_dot = state.omega.y();
  const double lambda2_dot = avg.k2 * avg.k2 * avg.dr(theta[0]) * theta1_dot;
  return at.V_lambda_dot_frozen(theta, state.omega) +
         at.dV_lambda_dlambda2(theta, state.omega) * lambda2_dot;
}

double SlowSweepReport::largest_passing_k2() const
{
  double best = 0.0;
  for (const auto& row : rows)
  {
    if (row.pass)
    {
      best = std::max(best, row.k2);
    }
  }
  return best;
}

bool SlowSweepReport::passes(double k2) const
{
  for (const auto& row : rows)
  {
    if (std::abs(row.k2 - k2) <= 1e-12 * std::max(1.0, std::abs(k2)))
    {
      return row.pass;
    }
  }
  return false;
}

SlowSweepReport sweep_k2(const SlowSweepSetup& setup,
                         const std::vector<double>& k2_descending)
{
  if (!setup.objective)
  {
    throw std::invalid_argument("sweep_k2: objective is required");
  }
  const ObjectiveField& f = *setup.objective;
  const Vec2 star = f.minimizer();
  SlowSweepReport report;
  for (double k2 : k2_descending)
  {
    const EscGains gains{1.0, setup.k1, k2};
    gains.validate();
    const AveragedParams avg(setup.params, gains);
    const double lo = std::min(avg.lambda1, k2 * k2 * avg.r_min());
    const double hi = std::max(avg.lambda1, k2 * k2 * avg.r_max());
    const Certificate cert(make_certificate_config(
      setup.params, setup.objective, Vec2{avg.lambda1, k2 * k2 * avg.r_min()},
      lo, hi, setup.sampling));

    const double ninf = -std::numeric_limits<double>::infinity();
    SlowSweepRow row{k2, true, ninf, 0, true, ninf, 0};
    for (const PlantState& x0 : setup.initial_states)
    {
      const auto rhs = [&](double, const StateVector& x) {
        return pack(averaged_rhs(setup.params, f, gains, unpack(x)));
      };
      integrate_rk4(rhs, pack(x0), 0.0, setup.t_end, setup.dt, setup.stride,
                    [&](double, const StateVector& x) {
                      const PlantState s = unpack(x);
                      if (s.theta == star && s.omega.isZero(0.0))
                      {
                        return;
                      }
                      const double v = slow_system_derivative(cert, avg, s);
                      row.max_derivative_all = std::max(row.max_derivative_all, v);
                      row.pass_all = row.pass_all && v < 0.0;
                      ++row.samples_all;
                      const bool inside =
                        (s.theta - star).cwiseAbs().maxCoeff() <=
                          setup.region.theta_half_width &&
                        s.omega.cwiseAbs().maxCoeff() <= setup.region.omega_max;
                      if (!inside)
                      {
                        return;
                      }
                      row.max_derivative = std::max(row.max_derivative, v);
                      row.pass = row.pass && v < 0.0;
                      ++row.samples;
                    });
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace esc

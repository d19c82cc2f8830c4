#ifndef ESC_LYAPUNOV_HPP
#define ESC_LYAPUNOV_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "esc/averaging.hpp"
#include "esc/controller.hpp"
#include "esc/model.hpp"
#include "esc/objective.hpp"

namespace esc
{

/**
 * Data behind the strict Lyapunov function of the frozen system.
 *
 * lambda_bar is the frozen gain; [lambda_min, lambda_max]^2 is the box of
 * gains the constants (hbar_M, P0) are made uniform over. hbar_M must bound
 * the Hessian norm of hbar over that box.
 */
struct CertificateConfig
{
  AntennaParams params;
  ObjectivePtr objective;
  Vec2 lambda_bar{1.0, 1.0};
  double lambda_min{1.0};
  double lambda_max{1.0};
  double hbar_M{1.0};

  void validate() const;
};

struct HessianSampling
{
  double half_width{3.0};  // box around theta_*
  int grid{61};
  double safety{1.05};
};

/// Builds a config with hbar_M = safety * sampled sup of |d2 hbar| over the
/// lambda box corners. The lambda box defaults to [min, max] of lambda_bar.
CertificateConfig make_certificate_config(const AntennaParams& params,
                                          ObjectivePtr objective,
                                          const Vec2& lambda_bar,
                                          const HessianSampling& sampling = {});

CertificateConfig make_certificate_config(const AntennaParams& params,
                                          ObjectivePtr objective,
                                          const Vec2& lambda_bar,
                                          double lambda_min,
                                          double lambda_max,
                                          const HessianSampling& sampling = {});

/// Weighted objective lambda1 h1 + lambda2 h2 and its derivatives.
double hbar(const ObjectiveField& f, const Vec2& lambda, const Vec2& theta);
Vec2 hbar_gradient(const ObjectiveField& f, const Vec2& lambda, const Vec2& theta);
Mat2 hbar_hessian(const ObjectiveField& f, const Vec2& lambda, const Vec2& theta);

/// 0.5 omega^T I omega + hbar(theta)^2/4 - hbar(theta_*)^2/4.
double weak_lyapunov_V1(const AntennaParams& params, const ObjectiveField& f,
                        const Vec2& lambda, const Vec2& theta, const Vec3& omega);

/**
 * Polynomial majorants:
 *   P1(l) = sqrt6 d_M + 8 sqrt(3 l) I_M / sqrt(I_m)
 *   P2(l) = 6 hbar_M I_M + P1(l)^2 / h(theta_*)
 *   P3(l) = (1/d_m) int_0^l P2 + P0 l
 *   P0    = max{12 I_M^2 / I_m, 4 hbar_M^2 / (hbar(theta_*) lambda_min(d2 hbar(theta_*)))}
 * The P0 denominators are taken at their worst case over the lambda box.
 */
class Majorants
{
public:
  explicit Majorants(const CertificateConfig& config);

  double P0() const { return P0_; }
  double P1(double l) const;
  double P2(double l) const;
  /// int_0^l P2(m) dm in closed form.
  double P2_integral(double l) const;
  double P3(double l) const;
  double P3_prime(double l) const;

  double h_star() const { return h_star_; }
  double hbar_star_min() const { return hbar_star_min_; }
  double hessian_lambda_min() const { return hess_lambda_min_; }

private:
  double d_m_, d_M_, I_m_, I_M_, hbar_M_;
  double h_star_;
  double hbar_star_min_;
  double hess_lambda_min_;
  double P0_;
};

struct StateGradient
{
  Vec2 d_theta{Vec2::Zero()};
  Vec3 d_omega{Vec3::Zero()};

  double along(const StateDerivative& x_dot) const
  {
    return d_theta.dot(x_dot.theta_dot) + d_omega.dot(x_dot.omega_dot);
  }
};

/// V1, V2, V_lambda = V2 + P3(V1) and their derivatives along the frozen system.
class Certificate
{
public:
  explicit Certificate(CertificateConfig config);

  const CertificateConfig& config() const { return config_; }
  const Majorants& majorants() const { return majorants_; }
  const Vec2& lambda() const { return config_.lambda_bar; }
  Vec2 minimizer() const { return f().minimizer(); }

  /// Same constants, different frozen gain.
  Certificate with_lambda(const Vec2& lambda_bar) const;

  double hbar(const Vec2& theta) const;
  Vec2 hbar_gradient(const Vec2& theta) const;
  Mat2 hbar_hessian(const Vec2& theta) const;

  double V1(const Vec2& theta, const Vec3& omega) const;
  StateGradient V1_gradient(const Vec2& theta, const Vec3& omega) const;
  /// -omega^T D omega.
  double V1_dot_frozen(const Vec3& omega) const;
  /// Exact derivative along the frozen system:
  /// -omega^T D omega + (1/2) (hbar - h) grad hbar J omega.
  /// The second term vanishes only where hbar = h.
  double V1_dot_frozen_exact(const Vec2& theta, const Vec3& omega) const;

  double V2(const Vec2& theta, const Vec3& omega) const;
  StateGradient V2_gradient(const Vec2& theta, const Vec3& omega) const;

  double V_lambda(const Vec2& theta, const Vec3& omega) const;
  StateGradient V_lambda_gradient(const Vec2& theta, const Vec3& omega) const;

  StateDerivative frozen(const Vec2& theta, const Vec3& omega) const;
  double V_lambda_dot_frozen(const Vec2& theta, const Vec3& omega) const;
  /// -(1/4) h(theta_*) w2 - P0 d_m |omega|^2.
  double decrease_bound(const Vec2& theta, const Vec3& omega) const;

  /// (w1, w2) = (hbar^2/4 - hbar(theta_*)^2/4, |grad hbar|^2).
  std::pair<double, double> w_pair(const Vec2& theta) const;

  /// dV_lambda/dlambda2 with the majorant constants held fixed.
  double dV_lambda_dlambda2(const Vec2& theta, const Vec3& omega) const;

private:
  const ObjectiveField& f() const { return *config_.objective; }

  CertificateConfig config_;
  Majorants majorants_;
};

struct CheckResult
{
  std::string name;
  std::string region;
  double worst_margin{0.0};  // >= 0 means satisfied
  bool pass{false};
  std::int64_t samples{0};
  std::string worst_at;
};

struct NeighborhoodGrid
{
  double theta_half_width{0.5};
  double omega_max{1.0};
  int theta_points{21};
  int omega_points{5};

  std::string describe() const;
};

/// |V1_dot along frozen_rhs - (-omega^T D omega)| <= tolerance at random states.
CheckResult check_V1_dot_identity(const Certificate& cert, int n_samples,
                                  std::uint64_t seed,
                                  double theta_half_width = 3.0,
                                  double omega_max = 2.0,
                                  double tolerance = 1e-10);

/// Chain-rule V1_dot against V1_dot_frozen_exact at random states.
CheckResult check_V1_dot_exact(const Certificate& cert, int n_samples,
                               std::uint64_t seed, double theta_half_width = 3.0,
                               double omega_max = 2.0, double tolerance = 1e-10);

/// Decrease inequality at random states of the grid box, with |omega|
/// scaled log-uniformly down to 1e-4 omega_max.
CheckResult check_decrease_random(const Certificate& cert, int n_samples,
                                  std::uint64_t seed,
                                  const NeighborhoodGrid& box = {});

/// V_lambda_dot along frozen <= decrease_bound on the grid. Margin is bound - lhs.
CheckResult check_decrease_grid(const Certificate& cert,
                                const NeighborhoodGrid& grid = {});

/// V_lambda > 0 off the equilibrium and = 0 at it. Margin is min V_lambda off it.
CheckResult check_positivity_grid(const Certificate& cert,
                                  const NeighborhoodGrid& grid = {});

/// |V2| <= sqrt6 I_M |grad hbar| |omega| at random states.
CheckResult check_V2_bound(const Certificate& cert, int n_samples,
                           std::uint64_t seed);

/// P1(V1)|g||w| <= h*/4 |g|^2 + P1(V1)^2 |w|^2 / h* at random states.
CheckResult check_young_step(const Certificate& cert, int n_samples,
                             std::uint64_t seed);

/// P0..P3 nonnegative and nondecreasing on [0, l_max].
CheckResult check_majorant_monotonicity(const Certificate& cert, double l_max,
                                        int n_points);

/// w1, w2 vanish at theta_* and are positive at random theta != theta_*.
CheckResult check_w_positive(const Certificate& cert, int n_samples,
                             std::uint64_t seed);

struct TimedState
{
  double t;
  PlantState state;
};

struct SlowTrace
{
  std::vector<double> t;
  std::vector<double> lambda2;
  std::vector<double> lambda2_dot;  // numeric, from the samples
  double sup_abs_lambda2_dot{0.0};
  double lambda2_min{0.0};
  double lambda2_max{0.0};
};

/// lambda2(t) = k2^2 r(theta1(t)) along an averaged trajectory, with its numeric derivative.
SlowTrace slow_lambda2_trace(const std::vector<TimedState>& trajectory,
                             const AntennaParams& params, double k2);

struct SlowSweepRow
{
  double k2;
  bool pass;              // negative at every sample inside the region
  double max_derivative;  // sup of V_lambda_dot along the slow system, inside the region
  std::int64_t samples;   // inside the region
  bool pass_all;          // same over every trajectory sample
  double max_derivative_all;
  std::int64_t samples_all;
};

struct SlowSweepSetup
{
  AntennaParams params;
  ObjectivePtr objective;
  double k1{0.2};
  std::vector<PlantState> initial_states;
  double t_end{40.0};
  double dt{1e-3};
  int stride{10};
  HessianSampling sampling{};
  /// Samples count toward pass only inside this box around (theta_*, 0).
  NeighborhoodGrid region{};
};

struct SlowSweepReport
{
  std::vector<SlowSweepRow> rows;  // in the order swept (descending k2)
  /// Largest swept k2 that passed, or 0 if none did.
  double largest_passing_k2() const;
  bool passes(double k2) const;
};

/**
 * For each k2, integrates the averaged system from each initial state and
 * evaluates the slow-system derivative
 *   V_lambda_dot|frozen(lambda(t)) + dV_lambda/dlambda2 * lambda2_dot(t)
 * at every sample, with lambda(t) = (k1^2/Iy, k2^2 r(theta1(t))) and the
 * majorant constants made uniform over the range lambda(t) can take.
 * A k2 passes when the derivative is negative at every sample off the
 * equilibrium that lies in setup.region. Samples outside it are reported
 * in the *_all fields.
 */
SlowSweepReport sweep_k2(const SlowSweepSetup& setup,
                         const std::vector<double>& k2_descending);

/// The slow-system derivative at one state.
double slow_system_derivative(const Certificate& cert, const AveragedParams& avg,
                              const PlantState& state);

}  // namespace esc

#endif  // ESC_LYAPUNOV_HPP

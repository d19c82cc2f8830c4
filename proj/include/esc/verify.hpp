#ifndef ESC_VERIFY_HPP
#define ESC_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "esc/averaging.hpp"
#include "esc/lyapunov.hpp"
#include "esc/scenario.hpp"

namespace esc
{

// Sampling checks shared by the verify subcommand and the acceptance gate.
// Each returns a margin that is >= 0 when the property holds.

/// |C(omega) + C(omega)^T|_max over random omega.
CheckResult check_coriolis_skew(const AntennaParams& params, int n_samples,
                                std::uint64_t seed, double tolerance = 1e-14);

/// |J J^T - I|_max and |J|_F <= sqrt6 over random theta.
CheckResult check_kinematics(int n_samples, std::uint64_t seed,
                             double tolerance = 1e-14);

/// el_rhs against euler_rhs_check on random admissible states omega = J^T theta_dot.
CheckResult check_el_vs_euler(const AntennaParams& params, int n_samples,
                              std::uint64_t seed, double tolerance = 1e-12);

/// omega^T I omega_dot = -omega^T D omega with zero torque.
CheckResult check_passivity(const AntennaParams& params, int n_samples,
                            std::uint64_t seed, double tolerance = 1e-12);

CheckResult check_objective(const ObjectiveField& f, double half_width = 3.0,
                            int grid = 61);

/// Zero means and int_0^T U_i U_j = (T/2) delta_ij for each q.
CheckResult check_dither_orthogonality(const std::vector<double>& q_values,
                                       double tolerance = 1e-8);

/// Closed-form <Yi:Yi> against the finite-difference product, relative error.
CheckResult check_symmetric_products(const AntennaParams& params,
                                     const ObjectiveField& f,
                                     const EscGains& gains, int n_samples,
                                     std::uint64_t seed, double tolerance = 1e-6);

/// -(1/4) I (<Y1:Y1> + <Y2:Y2>) = J^T Lambda (-(1/2) h grad h).
CheckResult check_forcing_identity(const AntennaParams& params,
                                   const ObjectiveField& f, const EscGains& gains,
                                   int n_samples, std::uint64_t seed,
                                   double tolerance = 1e-12);

/// -(1/2) h grad h against central differences of -h^2/4.
CheckResult check_forcing_gradient(const ObjectiveField& f, int n_samples,
                                   std::uint64_t seed, double tolerance = 1e-6);

/// Averaged and frozen right-hand sides vanish at (theta_*, 0).
CheckResult check_averaged_equilibrium(const AntennaParams& params,
                                       const ObjectiveField& f,
                                       const EscGains& gains);

/// Lambda gains of the scenario: lambda_bar = (k1^2/Iy, k2^2 r(c)).
Vec2 lambda_bar_for(const AntennaParams& params, const EscGains& gains, double c);

/// Certificate with constants uniform over every lambda the averaged system can visit.
Certificate uniform_certificate(const AntennaParams& params, ObjectivePtr objective,
                                const EscGains& gains, const Vec2& lambda_bar);

struct VerifyOptions
{
  std::uint64_t seed{20240607};
  int random_samples{200};
  int el_samples{1000};
  int v1_samples{500};
  std::vector<double> dither_q{1.0, 2.0, 5.0};
  std::vector<double> lambda_points{0.0, 0.7853981633974483, 1.5707963267948966};
  NeighborhoodGrid grid{};
  std::vector<double> k2_sweep{0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05};
  double sweep_t_end{40.0};
  bool run_eps_sweep{true};
  double eps_horizon{5.0};
};

struct VerifyEntry
{
  std::string suite;
  CheckResult check;
};

struct EpsSweepEntry
{
  std::string label;
  DeviationReport report;
};

struct VerifyReport
{
  std::vector<VerifyEntry> entries;
  std::optional<SlowSweepReport> k2_sweep;
  double k2_scenario{0.0};
  std::vector<EpsSweepEntry> eps_sweeps;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

/// Runs the model, objective, dither, averaging and Lyapunov suites on a scenario.
VerifyReport run_verification(const Scenario& scenario, const VerifyOptions& options = {});

}  // namespace esc

#endif  // ESC_VERIFY_HPP

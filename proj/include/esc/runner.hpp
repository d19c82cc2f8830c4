#ifndef ESC_RUNNER_HPP
#define ESC_RUNNER_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "esc/controller.hpp"
#include "esc/objective.hpp"
#include "esc/scenario.hpp"

namespace esc
{

/// One CSV row.
struct TrajectoryRecord
{
  double t;
  PlantState state;
  std::optional<PlantState> tilde;  // closed loop only
  Vec2 tau;  // closed loop: ESC torque; averaged/frozen: Lambda (-(1/2) h grad h)
  double h;
  double V1;
  std::optional<double> V_lambda;
};

struct Trajectory
{
  SystemKind system;
  std::string label;
  double dt;
  int stride;
  std::vector<TrajectoryRecord> records;

  void write_csv(std::ostream& os) const;
};

/// Per-run numbers computed from every integration step, not just the stored rows.
struct TrackingStats
{
  Vec2 final_error{Vec2::Zero()};  // theta - theta_d at t_end
  double max_error_tail{0.0};      // sup |theta_e| over the last tail_fraction of the run
  double mean_error_tail{0.0};     // time average of |theta_e| over the same window
  double tail_start{0.0};
  double h_min{0.0};
  double h_max{0.0};
};

struct RunOptions
{
  std::optional<std::string> out_dir;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<int> stride;
  double tail_fraction{0.2};
  /// Replaces the cost measurement the controller sees (e.g. a zero source).
  std::optional<Measurement> measurement_override;
};

struct SimulationResult
{
  Trajectory trajectory;
  TrackingStats stats;
};

/// Integrates one system from one initial state. Scenario must validate.
SimulationResult simulate(const Scenario& scenario, SystemKind system,
                          const InitialState& initial,
                          const RunOptions& options = {});

struct RunSummary
{
  std::string system;
  std::string label;
  std::string csv_path;
  std::size_t rows;
  double dt;
  TrackingStats stats;
  double wall_time_s;
};

struct RunReport
{
  std::vector<RunSummary> runs;
  ValidationReport objective_check;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Runs every requested (system, initial state), writes <system>_<label>.csv
/// and report.json into the output directory.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Scenario with the CLI overrides applied and revalidated.
Scenario apply_overrides(Scenario scenario, const RunOptions& options);

}  // namespace esc

#endif  // ESC_RUNNER_HPP

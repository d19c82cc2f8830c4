#ifndef ESC_SCENARIO_HPP
#define ESC_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "esc/controller.hpp"
#include "esc/model.hpp"
#include "esc/objective.hpp"

namespace esc
{

class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ObjectiveSpec
{
  std::string kind{"quadratic"};  // "quadratic" | "gaussian"
  Vec2 theta_d{Vec2::Zero()};
  double offset{0.2};  // quadratic
  double p_max{1.0};   // gaussian
  double sigma{1.0};
  double p0{1.2};

  ObjectivePtr build() const;
};

struct DitherSpec
{
  std::string kind{"cos_sin"};
  double q{1.0};

  DitherPair build() const;
};

struct InitialState
{
  std::string label;
  PlantState state;
};

enum class SystemKind
{
  closed_loop,
  averaged,
  frozen,
  averaged_gyroscopic  // averaged plus the mean gyroscopic term of the dither
};

std::string to_string(SystemKind kind);
SystemKind system_from_string(const std::string& name);

struct Scenario
{
  AntennaParams params;
  ObjectiveSpec objective;
  EscGains gains;
  DitherSpec dither;
  std::vector<InitialState> initial_states;
  double t_end{40.0};
  std::optional<double> dt;  // unset: per-system default
  int stride{1};
  std::vector<SystemKind> systems{SystemKind::closed_loop};
  std::optional<Vec2> frozen_lambda_bar;
  bool record_v_lambda{false};
  std::string output_dir{"out"};

  /// Throws ScenarioError on any invariant violation.
  void validate() const;

  bool runs(SystemKind kind) const;

  /// eps * T_dither / 200 for the closed loop, 1e-3 otherwise, unless dt is set.
  double dt_for(SystemKind kind) const;

  /// Largest step the closed loop accepts: eps * T_dither / 50.
  double max_closed_loop_dt() const;
};

/// Parses a scenario document. Unknown fields are rejected.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& scenario);

/// The 2-DOF antenna study: three initial postures, quadratic cost, cos/sin dither.
Scenario preset_paper_sec4();

}  // namespace esc

#endif  // ESC_SCENARIO_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "esc/integrator.hpp"
#include "esc/runner.hpp"
#include "esc/scenario.hpp"

namespace
{

using namespace esc;
namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("esc_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Scenario short_scenario(double t_end)
{
  Scenario s = preset_paper_sec4();
  s.t_end = t_end;
  return s;
}

TEST(Preset, Values)
{
  const Scenario s = preset_paper_sec4();
  EXPECT_NO_THROW(s.validate());
  EXPECT_DOUBLE_EQ(s.params.Ix, 0.0833);
  EXPECT_DOUBLE_EQ(s.params.Iy, 0.3083);
  EXPECT_DOUBLE_EQ(s.params.Iz, 0.15);
  EXPECT_DOUBLE_EQ(s.gains.epsilon, 0.01);
  EXPECT_DOUBLE_EQ(s.gains.k1, 0.2);
  EXPECT_DOUBLE_EQ(s.gains.k2, 0.1);
  EXPECT_DOUBLE_EQ(s.objective.offset, 0.2);
  EXPECT_EQ(s.objective.theta_d, Vec2(M_PI / 4, M_PI / 2));
  ASSERT_EQ(s.initial_states.size(), 3u);
  EXPECT_EQ(s.initial_states[0].label, "blue");
  EXPECT_EQ(s.initial_states[1].state.theta, Vec2(1.9775, 0.7854));
  EXPECT_EQ(s.initial_states[2].state.theta, Vec2(-0.4916, 2.6121));
  EXPECT_DOUBLE_EQ(s.t_end, 40.0);
  EXPECT_TRUE(s.runs(SystemKind::closed_loop));
  EXPECT_TRUE(s.runs(SystemKind::averaged));
  EXPECT_FALSE(s.runs(SystemKind::frozen));
}

TEST(Scenario, JsonRoundTrip)
{
  Scenario s = preset_paper_sec4();
  s.systems.push_back(SystemKind::frozen);
  s.frozen_lambda_bar = Vec2{0.13, 0.09};
  s.dt = 1e-4;
  s.record_v_lambda = true;
  const json doc = to_json(s);
  const Scenario back = parse_scenario(doc);
  EXPECT_EQ(to_json(back), doc);
  EXPECT_EQ(back.frozen_lambda_bar, s.frozen_lambda_bar);
  EXPECT_EQ(back.systems, s.systems);
}

TEST(Scenario, RejectsUnknownAndInconsistentFields)
{
  json doc = to_json(preset_paper_sec4());
  json extra = doc;
  extra["gain"] = 1.0;
  EXPECT_THROW(parse_scenario(extra), ScenarioError);
  json nested = doc;
  nested["params"]["Ixx"] = 1.0;
  EXPECT_THROW(parse_scenario(nested), ScenarioError);
  json damping = doc;
  damping["params"]["dz"] = 0.2;
  EXPECT_THROW(parse_scenario(damping), ScenarioError);
  json missing = doc;
  missing.erase("gains");
  EXPECT_THROW(parse_scenario(missing), ScenarioError);
  json kind = doc;
  kind["objective"]["kind"] = "cubic";
  EXPECT_THROW(parse_scenario(kind), ScenarioError);
  json system = doc;
  system["systems"] = {"closed_loop", "slow"};
  EXPECT_THROW(parse_scenario(system), ScenarioError);
  json stride = doc;
  stride["stride"] = 2.5;
  EXPECT_THROW(parse_scenario(stride), ScenarioError);
}

TEST(Scenario, FrozenGainRequiredExactlyWithFrozenSystem)
{
  Scenario s = preset_paper_sec4();
  s.systems = {SystemKind::frozen};
  EXPECT_THROW(s.validate(), ScenarioError);
  s.frozen_lambda_bar = Vec2{0.1, 0.1};
  EXPECT_NO_THROW(s.validate());
  s.systems = {SystemKind::averaged};
  EXPECT_THROW(s.validate(), ScenarioError);
  s.systems = {SystemKind::frozen};
  s.frozen_lambda_bar = Vec2{0.1, -0.1};
  EXPECT_THROW(s.validate(), ScenarioError);
}

TEST(Scenario, StepDefaultsAndResolutionGuard)
{
  Scenario s = preset_paper_sec4();
  EXPECT_DOUBLE_EQ(s.dt_for(SystemKind::closed_loop), 0.01 * 2 * M_PI / 200);
  EXPECT_DOUBLE_EQ(s.dt_for(SystemKind::averaged), 1e-3);
  EXPECT_DOUBLE_EQ(s.max_closed_loop_dt(), 0.01 * 2 * M_PI / 50);
  s.dt = 2e-3;
  EXPECT_THROW(s.validate(), ScenarioError);
  s.systems = {SystemKind::averaged};
  EXPECT_NO_THROW(s.validate());
  s.dt = -1.0;
  EXPECT_THROW(s.validate(), ScenarioError);
}

TEST(Scenario, LoadErrors)
{
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ScenarioError);
  const fs::path dir = scratch_dir("load");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(load_scenario((dir / "bad.json").string()), ScenarioError);
  std::ofstream(dir / "good.json") << to_json(preset_paper_sec4()).dump();
  EXPECT_EQ(to_json(load_scenario((dir / "good.json").string())),
            to_json(preset_paper_sec4()));
}

TEST(SystemKind, StringRoundTrip)
{
  for (SystemKind k : {SystemKind::closed_loop, SystemKind::averaged, SystemKind::frozen,
                       SystemKind::averaged_gyroscopic})
  {
    EXPECT_EQ(system_from_string(to_string(k)), k);
  }
  EXPECT_THROW(system_from_string("slow"), ScenarioError);
}

TEST(Simulate, RecordCountAndMonotoneTime)
{
  const Scenario s = short_scenario(0.5);
  const SimulationResult r = simulate(s, SystemKind::closed_loop, s.initial_states[0]);
  const double dt = s.dt_for(SystemKind::closed_loop);
  const auto n = step_count(0.5, dt);
  EXPECT_EQ(r.trajectory.records.size(), static_cast<std::size_t>(n / 10 + 1));
  for (std::size_t k = 1; k < r.trajectory.records.size(); ++k)
  {
    EXPECT_GT(r.trajectory.records[k].t, r.trajectory.records[k - 1].t);
    EXPECT_TRUE(r.trajectory.records[k].tilde.has_value());
  }
  EXPECT_EQ(r.trajectory.records.front().t, 0.0);
}

TEST(Simulate, AveragedRestsAtOptimum)
{
  const Scenario s = short_scenario(2.0);
  const InitialState at_opt{"opt", PlantState{s.objective.theta_d, Vec3::Zero()}};
  const SimulationResult r = simulate(s, SystemKind::averaged, at_opt);
  for (const auto& rec : r.trajectory.records)
  {
    EXPECT_LE((rec.state.theta - s.objective.theta_d).norm(), 1e-15);
    EXPECT_LE(rec.state.omega.norm(), 1e-15);
    EXPECT_NEAR(rec.h, 0.2, 1e-15);
  }
  EXPECT_LE(r.stats.final_error.norm(), 1e-15);

  const SimulationResult g = simulate(s, SystemKind::averaged_gyroscopic, at_opt);
  EXPECT_GT(g.stats.final_error.norm(), 1e-4);
  EXPECT_LT(g.stats.final_error.norm(), 0.1);
}

TEST(Simulate, ZeroMeasurementDissipatesEnergy)
{
  Scenario s = short_scenario(3.0);
  s.stride = 1;
  const InitialState spinning{"spin", PlantState{Vec2{0.3, 0.4}, Vec3{0.5, -0.4, 0.3}}};
  RunOptions opts;
  opts.measurement_override = [](const Vec2&) { return 0.0; };
  const SimulationResult r = simulate(s, SystemKind::closed_loop, spinning, opts);
  double prev = kinetic_energy(s.params, spinning.state.omega);
  for (const auto& rec : r.trajectory.records)
  {
    const double e = kinetic_energy(s.params, rec.state.omega);
    EXPECT_LE(e, prev + 1e-15);
    prev = e;
    EXPECT_EQ(rec.tau, Vec2::Zero());
  }
  EXPECT_LT(prev, 0.9 * kinetic_energy(s.params, spinning.state.omega));
}

TEST(Simulate, CsvHeaders)
{
  const Scenario s = short_scenario(0.1);
  std::ostringstream closed;
  simulate(s, SystemKind::closed_loop, s.initial_states[0]).trajectory.write_csv(closed);
  EXPECT_EQ(closed.str().substr(0, closed.str().find('\n')),
            "t,theta1,theta2,omega_x,omega_y,omega_z,theta1_tilde,theta2_tilde,"
            "omega_x_tilde,omega_y_tilde,omega_z_tilde,tau1,tau2,h,V1");

  Scenario with_v = s;
  with_v.record_v_lambda = true;
  std::ostringstream avg;
  simulate(with_v, SystemKind::averaged, s.initial_states[0]).trajectory.write_csv(avg);
  EXPECT_EQ(avg.str().substr(0, avg.str().find('\n')),
            "t,theta1,theta2,omega_x,omega_y,omega_z,tau1,tau2,h,V1,V_lambda");
}

TEST(RunScenario, WritesFilesDeterministically)
{
  Scenario s = short_scenario(0.5);
  const fs::path a = scratch_dir("run_a");
  const fs::path b = scratch_dir("run_b");
  RunOptions oa;
  oa.out_dir = a.string();
  RunOptions ob;
  ob.out_dir = b.string();
  const RunReport ra = run_scenario(s, oa);
  run_scenario(s, ob);
  ASSERT_EQ(ra.runs.size(), 6u);
  EXPECT_TRUE(fs::exists(a / "report.json"));
  for (const char* name : {"closed_loop_blue.csv", "averaged_yellow.csv", "closed_loop_red.csv"})
  {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  const json rep = json::parse(slurp(a / "report.json"));
  EXPECT_EQ(rep.at("runs").size(), 6u);
}

TEST(RunScenario, UnwritableDirectoryThrows)
{
  const fs::path dir = scratch_dir("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  RunOptions o;
  o.out_dir = (dir / "file" / "sub").string();
  EXPECT_THROW(run_scenario(short_scenario(0.1), o), std::runtime_error);
}

TEST(RunScenario, OverridesRevalidate)
{
  RunOptions o;
  o.dt = 1.0;
  EXPECT_THROW(apply_overrides(preset_paper_sec4(), o), ScenarioError);
  o.dt.reset();
  o.t_end = 2.0;
  o.stride = 3;
  const Scenario s = apply_overrides(preset_paper_sec4(), o);
  EXPECT_DOUBLE_EQ(s.t_end, 2.0);
  EXPECT_EQ(s.stride, 3);
}

}  // namespace

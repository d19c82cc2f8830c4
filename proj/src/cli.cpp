#include "esc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esc/averaging.hpp"
#include "esc/runner.hpp"
#include "esc/scenario.hpp"
#include "esc/verify.hpp"

namespace esc
{

namespace fs = std::filesystem;

namespace
{

fs::path ensure_dir(const std::string& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
  {
    throw std::runtime_error("cannot create output directory '" + dir + "'");
  }
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream os(path, std::ios::binary);
  if (!os || !(os << text))
  {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
}

int do_simulate(const std::string& path, const RunOptions& options, std::ostream& out)
{
  const Scenario scenario = load_scenario(path);
  const RunReport report = run_scenario(scenario, options);
  for (const auto& w : report.warnings)
  {
    out << "warning: " << w << '\n';
  }
  for (const auto& r : report.runs)
  {
    out << r.system << " " << r.label << ": rows=" << r.rows
        << " final|theta_e|=" << r.stats.final_error.norm()
        << " tail max=" << r.stats.max_error_tail
        << " tail mean=" << r.stats.mean_error_tail << " -> " << r.csv_path << '\n';
  }
  return 0;
}

int do_verify(const std::string& path, const std::optional<std::string>& out_dir,
              std::ostream& out)
{
  const Scenario scenario = load_scenario(path);
  const VerifyReport report = run_verification(scenario);
  const fs::path dir = ensure_dir(out_dir.value_or(scenario.output_dir));
  write_file(dir / "verify.json", report.to_json().dump(2) + "\n");
  for (const auto& e : report.entries)
  {
    out << (e.check.pass ? "PASS " : "FAIL ") << e.suite << "/" << e.check.name
        << " worst_margin=" << e.check.worst_margin << '\n';
  }
  if (report.k2_sweep)
  {
    out << (report.k2_sweep->passes(report.k2_scenario) ? "PASS " : "FAIL ")
        << "lyapunov/slow_system k2=" << report.k2_scenario
        << " largest_passing_k2=" << report.k2_sweep->largest_passing_k2() << '\n';
  }
  for (const auto& e : report.eps_sweeps)
  {
    out << (e.report.strictly_decreasing() ? "PASS " : "FAIL ")
        << "averaging/eps_sweep " << e.label << '\n';
  }
  out << (report.all_passed() ? "all checks passed" : "some checks failed") << " -> "
      << (dir / "verify.json").string() << '\n';
  return report.all_passed() ? 0 : 1;
}

int do_sweep(const std::string& path, const std::vector<double>& eps,
             const std::optional<std::string>& out_dir, std::optional<double> horizon,
             std::ostream& out)
{
  const Scenario scenario = load_scenario(path);
  const fs::path dir = ensure_dir(out_dir.value_or(scenario.output_dir));
  bool ok = true;
  for (const auto& ic : scenario.initial_states)
  {
    ConvergenceSetup setup;
    setup.params = scenario.params;
    setup.objective = scenario.objective.build();
    setup.gains = scenario.gains;
    setup.dither_q = scenario.dither.q;
    setup.initial = ic.state;
    if (horizon)
    {
      setup.horizon = *horizon;
    }
    const DeviationReport report = converging_trajectories_experiment(setup, eps);
    std::ostringstream csv;
    report.write_csv(csv);
    const fs::path file = dir / ("deviation_" + ic.label + ".csv");
    write_file(file, csv.str());
    const bool dec = report.strictly_decreasing();
    ok = ok && dec;
    out << ic.label << ": " << (dec ? "strictly decreasing" : "NOT strictly decreasing")
        << " -> " << file.string() << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Extremum-seeking antenna pointing: simulation and verification"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::string> out_dir;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<int> stride;
  std::vector<double> eps;
  std::string preset_name;

  auto* simulate = app.add_subcommand("simulate", "run a scenario, write CSVs and report.json");
  simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--dt", dt, "integration step [s]");
  simulate->add_option("--t-end", t_end, "final time [s]");
  simulate->add_option("--stride", stride, "store every n-th step");

  auto* verify = app.add_subcommand("verify", "run the invariant suites, write verify.json");
  verify->add_option("scenario", scenario_path, "scenario JSON file")->required();
  verify->add_option("--out", out_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep-eps", "closed loop vs averaged deviation over eps");
  sweep->add_option("scenario", scenario_path, "scenario JSON file")->required();
  sweep->add_option("--eps", eps, "comma-separated, strictly decreasing")
    ->required()
    ->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--t-end", t_end, "comparison horizon [s]");

  auto* preset = app.add_subcommand("preset", "print a built-in scenario");
  preset->add_option("name", preset_name, "preset name")
    ->required()
    ->check(CLI::IsMember({"paper-sec4"}));

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    return app.exit(e, out, err);
  }

  try
  {
    if (*simulate)
    {
      RunOptions options;
      options.out_dir = out_dir;
      options.dt = dt;
      options.t_end = t_end;
      options.stride = stride;
      return do_simulate(scenario_path, options, out);
    }
    if (*verify)
    {
      return do_verify(scenario_path, out_dir, out);
    }
    if (*sweep)
    {
      return do_sweep(scenario_path, eps, out_dir, t_end, out);
    }
    out << to_json(preset_paper_sec4()).dump(2) << '\n';
    return 0;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int cli_main(int argc, const char* const* argv)
{
  return cli_main(argc, argv, std::cout, std::cerr);
}

}  // namespace esc

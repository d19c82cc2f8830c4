#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "esc/cli.hpp"
#include "esc/scenario.hpp"

namespace
{

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun
{
  int code;
  std::string out;
  std::string err;
};

// One directory per test: ctest runs each test in its own process, possibly in parallel.
fs::path work_dir()
{
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "esc_cli_test" / info->name();
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CliRun run_binary(const std::string& args)
{
  const char* exe = std::getenv("ESC_CLI");
  if (!exe)
  {
    ADD_FAILURE() << "ESC_CLI is not set";
    return {-1, "", ""};
  }
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string("\"") + exe + "\" " + args + " > \"" + out.string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write_scenario(const std::string& name, const esc::Scenario& s)
{
  const fs::path p = work_dir() / name;
  std::ofstream(p) << esc::to_json(s).dump(2);
  return p;
}

TEST(Cli, PresetPrintsScenarioJson)
{
  const CliRun r = run_binary("preset paper-sec4");
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc, esc::to_json(esc::preset_paper_sec4()));
  EXPECT_NO_THROW(esc::parse_scenario(doc));
}

TEST(Cli, UsageAndInputErrors)
{
  EXPECT_NE(run_binary("").code, 0);
  EXPECT_NE(run_binary("frobnicate").code, 0);
  EXPECT_NE(run_binary("preset nope").code, 0);
  const CliRun missing = run_binary("simulate /nonexistent/scenario.json");
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("error:"), std::string::npos);
  const fs::path sc = write_scenario("usage.json", esc::preset_paper_sec4());
  EXPECT_EQ(run_binary("simulate \"" + sc.string() + "\" --dt 1").code, 2);
}

TEST(Cli, InProcessEntryPoint)
{
  const char* argv[] = {"esc_cli", "preset", "paper-sec4"};
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(esc::cli_main(3, argv, out, err), 0);
  EXPECT_EQ(json::parse(out.str()), esc::to_json(esc::preset_paper_sec4()));
}

TEST(Cli, SimulateWritesCsvAndReport)
{
  const fs::path out = work_dir() / "sim";
  fs::remove_all(out);
  const fs::path sc = write_scenario("sim.json", esc::preset_paper_sec4());
  const CliRun r =
    run_binary("simulate \"" + sc.string() + "\" --t-end 0.5 --out \"" + out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"closed_loop_blue.csv", "closed_loop_red.csv", "closed_loop_yellow.csv",
                           "averaged_blue.csv", "averaged_red.csv", "averaged_yellow.csv",
                           "report.json"})
  {
    EXPECT_TRUE(fs::exists(out / name)) << name;
  }
  const json rep = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(rep.at("runs").size(), 6u);
}

TEST(Cli, SweepEpsWritesDeviationCsv)
{
  esc::Scenario s = esc::preset_paper_sec4();
  s.initial_states.resize(1);
  const fs::path sc = write_scenario("sweep.json", s);
  const fs::path out = work_dir() / "sweep";
  fs::remove_all(out);
  const CliRun r = run_binary("sweep-eps \"" + sc.string() +
                           "\" --eps 0.04,0.02,0.01 --t-end 2 --out \"" + out.string() + "\"");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const std::string csv = slurp(out / "deviation_blue.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epsilon,sup_deviation,horizon");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_NE(run_binary("sweep-eps \"" + sc.string() + "\" --eps 0.01,0.02 --out \"" +
                       out.string() + "\"")
              .code,
            0);
}

TEST(Cli, VerifyExitCodeMatchesReport)
{
  const fs::path sc = write_scenario("verify.json", esc::preset_paper_sec4());
  const fs::path out = work_dir() / "verify";
  fs::remove_all(out);
  const CliRun r = run_binary("verify \"" + sc.string() + "\" --out \"" + out.string() + "\"");
  ASSERT_TRUE(fs::exists(out / "verify.json")) << r.err;
  const json rep = json::parse(slurp(out / "verify.json"));
  const bool all = rep.at("all_passed").get<bool>();
  EXPECT_EQ(r.code, all ? 0 : 1);
}

}  // namespace

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "test_support.hpp"

using namespace orlicz;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("orlicz_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

// Every regular file under dir, keyed by name.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

int run_text(const std::string& text, const fs::path& out, std::string* log = nullptr) {
  std::ostringstream os;
  const int rc = run(parse_config(text), out, os);
  if (log) *log = os.str();
  return rc;
}

int spawn(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + ORLICZ_CLI_PATH + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const char* kPower2 = "command = \"check\"\nphi = {family = \"power\", p = \"2\"}\n";
const char* kDoublePhase = "command = \"check\"\nphi = {family = \"double_phase\", p = \"1.5\", q = \"3\", mu = \"1\"}\n";
const char* kSolve =
    "command = \"solve\"\nphi = {family = \"power\", p = \"2\", normalized = true}\n"
    "[grid]\nextent = [-1, 1]\nn = 201\n";

}  // namespace

TEST(Run, CheckPowerTwoHoldsEverywhere) {
  const auto dir = scratch("check");
  EXPECT_EQ(run_text(kPower2, dir), kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "check.json"));
  ASSERT_FALSE(j["reports"].empty());
  for (const auto& r : j["reports"]) EXPECT_EQ(r["verdict"], "holds") << r["property"];
}

TEST(Run, CheckWithAFailingPropertyExitsTwo) {
  const auto dir = scratch("fails");
  EXPECT_EQ(run_text(kDoublePhase, dir), kExitFails);
  const auto j = nlohmann::json::parse(slurp(dir / "check.json"));
  bool any = false;
  for (const auto& r : j["reports"]) any = any || r["verdict"] == "fails";
  EXPECT_TRUE(any);
}

TEST(Run, CheckReportsSampledFieldBounds) {
  const auto dir = scratch("bounds");
  run_text("command = \"check\"\nphi = {family = \"var_exponent\", p = \"1.2 + 0.3*x^2\"}\n[grid]\nextent = [0, 1]\n",
           dir);
  const auto j = nlohmann::json::parse(slurp(dir / "check.json"));
  EXPECT_NEAR(j["field_bounds"]["p"]["lo"].get<double>(), 1.2, 1e-6);
  EXPECT_NEAR(j["field_bounds"]["p"]["hi"].get<double>(), 1.5, 1e-6);
  EXPECT_EQ(j["field_bounds"]["p"]["rigorous"], false);
}

TEST(Run, SolveCenterValueMatchesPoisson) {
  const auto dir = scratch("solve");
  ASSERT_EQ(run_text(kSolve, dir), kExitOk);
  std::istringstream csv(slurp(dir / "solution.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,value");
  bool found = false;
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    if (std::stod(line.substr(0, comma)) == 0.0) {
      EXPECT_NEAR(std::stod(line.substr(comma + 1)), 0.5, 1e-10);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  const auto j = nlohmann::json::parse(slurp(dir / "solve.json"));
  EXPECT_LE(j["result"]["residual_inf"].get<double>(), 1e-10);
}

TEST(Run, ConstantsBestConstantAtLeastCr) {
  const auto dir = scratch("constants");
  ASSERT_EQ(run_text("command = \"constants\"\n[options]\nr = [1.5, 3]\nresolution = 400\n", dir), kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "constants.json"));
  ASSERT_EQ(j["powerlaw"].size(), 2u);
  EXPECT_GE(j["powerlaw"][0]["best_constant"].get<double>(), 0.5);
  EXPECT_EQ(j["powerlaw"][0]["verification"]["verdict"], "holds");
  EXPECT_TRUE(fs::exists(dir / "constants_r1.5.csv"));
  EXPECT_TRUE(fs::exists(dir / "constants_r3.csv"));
  EXPECT_EQ(slurp(dir / "constants_r3.csv").rfind("eta1,eta2,ratio\n", 0), 0u);
}

TEST(Run, ConstantsWithPhiAddsGeneralizedReport) {
  const auto dir = scratch("constants_phi");
  ASSERT_EQ(run_text("command = \"constants\"\nphi = {family = \"power\", p = \"3\"}\n[options]\nr = [2]\n"
                     "resolution = 50\n",
                     dir),
            kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "constants.json"));
  ASSERT_EQ(j["generalized"].size(), 1u);
  EXPECT_EQ(j["generalized"][0]["verdict"], "holds");
}

TEST(Run, ConjugateTabulatesClosedForm) {
  const auto dir = scratch("conjugate");
  ASSERT_EQ(run_text("command = \"conjugate\"\nphi = {family = \"power\", p = \"2\"}\n[options]\ns_count = 5\n", dir),
            kExitOk);
  std::istringstream csv(slurp(dir / "conjugate.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,s,conjugate");
  int rows = 0;
  while (std::getline(csv, line)) {
    double x, s, c;
    char a, b;
    std::istringstream(line) >> x >> a >> s >> b >> c;
    EXPECT_NEAR(c, s * s / 4.0, 1e-12 * std::max(1.0, s * s));
    ++rows;
  }
  EXPECT_EQ(rows, 5);
}

TEST(Run, ConjugateOn2DGridHasBothCoordinates) {
  const auto dir = scratch("conjugate2d");
  ASSERT_EQ(run_text("command = \"conjugate\"\nphi = {family = \"var_exponent\", p = \"2 + x*y\"}\n"
                     "[grid]\nextent = [0, 1, 0, 1]\nn = 3\n[options]\ns_count = 2\n",
                     dir),
            kExitOk);
  const std::string csv = slurp(dir / "conjugate.csv");
  EXPECT_EQ(csv.rfind("x,y,s,conjugate\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 9 * 2);
}

TEST(Run, RefineWritesReport) {
  const auto dir = scratch("refine");
  ASSERT_EQ(run_text("command = \"refine\"\nphi = {family = \"power\", p = \"2\", normalized = true}\n"
                     "[grid]\nextent = [0, 1, 0, 1]\n[options]\nn_sequence = [5, 9, 17]\n",
                     dir),
            kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "refine.json"));
  EXPECT_EQ(j["report"]["verdict"], "holds");
}

TEST(Run, ErrorsExitOneWithMessage) {
  const auto dir = scratch("errors");
  RunConfig cfg = parse_config(kPower2);
  cfg.command = "teleport";
  std::ostringstream log;
  EXPECT_EQ(run(cfg, dir, log), kExitError);
  EXPECT_NE(log.str().find("command"), std::string::npos);

  // solver blow-up surfaces as exit 1, not a crash
  std::string msg;
  EXPECT_EQ(run_text("command = \"solve\"\nphi = {family = \"power\", p = \"2\"}\n[grid]\nextent = [0, 1]\nn = 41\n"
                     "[options]\nmethod = \"descent\"\ntol = 1e-300\n",
                     dir, &msg),
            kExitError);
  EXPECT_NE(msg.find("error:"), std::string::npos);
}

// ---- the binary ----

TEST(Binary, ExitCodes) {
  const auto dir = scratch("bin_exit");
  spit(dir / "p2.cfg", kPower2);
  spit(dir / "dp.cfg", kDoublePhase);
  spit(dir / "bad.cfg", "command = \"check\"\nphi = {family = \"power\", p = \"0.5\"}\n");
  spit(dir / "broken.cfg", "phi = {family = \"power\"\n");
  const fs::path log = dir / "log.txt";
  EXPECT_EQ(spawn("check \"" + (dir / "p2.cfg").string() + "\" --out \"" + (dir / "a").string() + "\"", log), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "check.json"));
  EXPECT_EQ(spawn("check \"" + (dir / "dp.cfg").string() + "\" --out \"" + (dir / "b").string() + "\"", log), 2);
  EXPECT_EQ(spawn("check \"" + (dir / "bad.cfg").string() + "\" --out \"" + (dir / "c").string() + "\"", log), 1);
  EXPECT_NE(slurp(log).find("validation"), std::string::npos);
  EXPECT_EQ(spawn("check \"" + (dir / "broken.cfg").string() + "\"", log), 1);
  EXPECT_NE(slurp(log).find("at 2:"), std::string::npos);  // line of the error
  EXPECT_EQ(spawn("check \"" + (dir / "missing.cfg").string() + "\"", log), 1);
  EXPECT_EQ(spawn("frobnicate x.cfg", log), 1);
  EXPECT_EQ(spawn("check", log), 1);
  EXPECT_EQ(spawn("--help", log), 0);
}

TEST(Binary, SubcommandSelectsCommand) {
  const auto dir = scratch("bin_sub");
  spit(dir / "p2.cfg", kPower2);  // says check
  EXPECT_EQ(spawn("conjugate \"" + (dir / "p2.cfg").string() + "\" --out \"" + dir.string() + "\"", dir / "log"), 0);
  EXPECT_TRUE(fs::exists(dir / "conjugate.csv"));
  EXPECT_FALSE(fs::exists(dir / "check.json"));
}

TEST(Binary, SeedAndTolOverlay) {
  const auto dir = scratch("bin_seed");
  const std::string base = "command = \"constants\"\n[options]\nr = [1.5]\nresolution = 50\ntrials = 200\n";
  spit(dir / "plain.cfg", base);
  spit(dir / "seeded.cfg", base + "seed = 5\n");
  const fs::path log = dir / "log";
  auto go = [&](const std::string& cfg, const std::string& out, const std::string& extra) {
    return spawn("constants \"" + (dir / cfg).string() + "\" --out \"" + (dir / out).string() + "\" " + extra, log);
  };
  ASSERT_EQ(go("plain.cfg", "flag5", "--seed 5"), 0);
  ASSERT_EQ(go("seeded.cfg", "cfg5", ""), 0);
  ASSERT_EQ(go("seeded.cfg", "flag6", "--seed 6"), 0);
  EXPECT_EQ(slurp(dir / "flag5" / "constants.json"), slurp(dir / "cfg5" / "constants.json"));
  EXPECT_NE(slurp(dir / "flag6" / "constants.json"), slurp(dir / "cfg5" / "constants.json"));

  spit(dir / "solve.cfg", kSolve);
  ASSERT_EQ(spawn("solve \"" + (dir / "solve.cfg").string() + "\" --out \"" + (dir / "loose").string() +
                      "\" --tol 1e-3 --seed 1",
                  log),
            0);
  const auto j = nlohmann::json::parse(slurp(dir / "loose" / "solve.json"));
  EXPECT_LE(j["result"]["residual_inf"].get<double>(), 1e-3);
}

TEST(Binary, RepeatedRunsAreByteIdentical) {
  const auto dir = scratch("bin_det");
  spit(dir / "check.cfg",
       "command = \"check\"\nphi = {family = \"log_double_phase\", p = \"1.5\", q = \"2\", mu = \"x\"}\n"
       "[grid]\nextent = [0, 1]\nn = 5\n[options]\nseed = 11\n");
  spit(dir / "constants.cfg",
       "command = \"constants\"\nphi = {family = \"double_phase\", p = \"1.5\", q = \"3\", mu = \"1\"}\n"
       "[options]\nr = [1.2, 4]\nresolution = 60\nseed = 11\n");
  spit(dir / "solve.cfg",
       "command = \"solve\"\nphi = {family = \"log_double_phase\", p = \"1.5\", q = \"2\", mu = \"x\"}\n"
       "[grid]\nextent = [0, 1, 0, 1]\nn = 9\n[options]\nf = \"1 + x\"\n");
  for (const std::string cmd : {"check", "constants", "solve"}) {
    const auto a = dir / (cmd + "_a"), b = dir / (cmd + "_b");
    const std::string cfg = "\"" + (dir / (cmd + ".cfg")).string() + "\"";
    ASSERT_LE(spawn(cmd + " " + cfg + " --out \"" + a.string() + "\"", dir / "log"), 2);
    ASSERT_LE(spawn(cmd + " " + cfg + " --out \"" + b.string() + "\"", dir / "log"), 2);
    const auto sa = snapshot(a), sb = snapshot(b);
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, sb) << cmd;
  }
}

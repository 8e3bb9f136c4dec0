#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

CmdResult run_cli(const std::string& args) {
  const fs::path capture = fs::absolute("tmp_cli_capture.txt");
  std::string cmd = std::string("'") + MATCHRL_BIN + "' " + args + " > '" +
                    capture.string() + "' 2>&1";
  int status = std::system(cmd.c_str());
  CmdResult r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  std::ifstream in(capture);
  std::ostringstream os;
  os << in.rdbuf();
  r.output = os.str();
  fs::remove(capture);
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  REQUIRE(os.good());
  os << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kTinyCfg =
    "learner = tabq\n"
    "env.grid_width = 3\n"
    "env.grid_height = 2\n"
    "env.num_agents = 8\n"
    "env.dar = 0.6\n"
    "run.steps = 300\n"
    "run.eval_period = 100\n"
    "run.converged_periods = 2\n"
    "run.seeds = 1,2\n";

}  // namespace

TEST_CASE("bare invocation and help") {
  CHECK(run_cli("").code == 2);
  CmdResult help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK(help.output.find("run") != std::string::npos);
  CHECK(help.output.find("oracle") != std::string::npos);
  CHECK(help.output.find("gradcheck") != std::string::npos);
  CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("configuration mistakes exit with code two") {
  fs::remove_all("tmp_cli");
  fs::create_directories("tmp_cli");
  CmdResult missing = run_cli("run --config tmp_cli/absent.cfg");
  CHECK(missing.code == 2);
  CHECK(missing.output.find("config error") != std::string::npos);

  write_file("tmp_cli/unknown.cfg", std::string(kTinyCfg) + "mystery = 1\n");
  CmdResult unknown = run_cli("run --config tmp_cli/unknown.cfg");
  CHECK(unknown.code == 2);
  CHECK(unknown.output.find("mystery") != std::string::npos);
  CHECK(unknown.output.find(":10") != std::string::npos);  // offending line

  write_file("tmp_cli/badtype.cfg",
             std::string(kTinyCfg) + "hp.gamma = quickly\n");
  CmdResult badtype = run_cli("run --config tmp_cli/badtype.cfg");
  CHECK(badtype.code == 2);
  CHECK(badtype.output.find("hp.gamma") != std::string::npos);

  write_file("tmp_cli/badlearner.cfg",
             "learner = sarsa\nrun.steps = 100\nrun.eval_period = 100\n");
  CHECK(run_cli("run --config tmp_cli/badlearner.cfg").code == 2);

  write_file("tmp_cli/tiny.cfg", kTinyCfg);
  CHECK(run_cli("run --config tmp_cli/tiny.cfg --set run.steps=nope").code ==
        2);
  CHECK(run_cli("run --config tmp_cli/tiny.cfg --set run.steps").code == 2);
  fs::remove_all("tmp_cli");
}

TEST_CASE("a run writes its outputs and replays from the manifest") {
  fs::remove_all("tmp_cli");
  fs::create_directories("tmp_cli");
  write_file("tmp_cli/tiny.cfg", kTinyCfg);

  CmdResult first =
      run_cli("run --config tmp_cli/tiny.cfg --out tmp_cli/out1 --jobs 1");
  CHECK(first.code == 0);
  CHECK(first.output.find("seed 1:") != std::string::npos);
  CHECK(first.output.find("mean over 2 seeds") != std::string::npos);
  for (const char* name :
       {"manifest.cfg", "run_tabq_seed1.csv", "run_tabq_seed2.csv",
        "agents_tabq_seed1.csv", "agents_tabq_seed2.csv", "summary.csv"})
    CHECK(fs::exists(fs::path("tmp_cli/out1") / name));

  // Replaying the manifest must reproduce every data file byte for byte.
  CmdResult replay =
      run_cli("run --config tmp_cli/out1/manifest.cfg --out tmp_cli/out2");
  CHECK(replay.code == 0);
  for (const char* name : {"run_tabq_seed1.csv", "run_tabq_seed2.csv",
                           "agents_tabq_seed1.csv", "summary.csv"})
    CHECK(slurp(fs::path("tmp_cli/out1") / name) ==
          slurp(fs::path("tmp_cli/out2") / name));

  // Seed override narrows the run set.
  CmdResult narrowed = run_cli(
      "run --config tmp_cli/tiny.cfg --out tmp_cli/out3 --seeds 5");
  CHECK(narrowed.code == 0);
  CHECK(fs::exists("tmp_cli/out3/run_tabq_seed5.csv"));
  CHECK_FALSE(fs::exists("tmp_cli/out3/run_tabq_seed1.csv"));
  fs::remove_all("tmp_cli");
}

TEST_CASE("sweeps cover scenario and learner combinations") {
  fs::remove_all("tmp_cli");
  fs::create_directories("tmp_cli");
  write_file("tmp_cli/s1.cfg", kTinyCfg);
  write_file("tmp_cli/s2.cfg",
             std::string(kTinyCfg) + "env.dar = 0.25\n");
  CmdResult sweep = run_cli(
      "sweep --scenarios tmp_cli/s1.cfg,tmp_cli/s2.cfg --learners tabq "
      "--seeds 1 --out tmp_cli/sw "
      "--set hp.replay_min_fill=40 --set hp.hidden=8");
  CHECK(sweep.code == 0);
  CHECK(fs::exists("tmp_cli/sw/s1_tabq/summary.csv"));
  CHECK(fs::exists("tmp_cli/sw/s2_tabq/run_tabq_seed1.csv"));
  CHECK(fs::exists("tmp_cli/sw/summary.csv"));
  std::string combined = slurp("tmp_cli/sw/summary.csv");
  // Header plus one row per scenario-learner-seed combination.
  CHECK(std::count(combined.begin(), combined.end(), '\n') == 3);
  fs::remove_all("tmp_cli");
}

TEST_CASE("verification subcommands succeed and reject bad arguments") {
  CHECK(run_cli("gradcheck --trials 99").code == 2);
  CmdResult gc = run_cli("gradcheck --trials 100 --seed 7");
  CHECK(gc.code == 0);
  CHECK(gc.output.find("gradcheck: PASS") != std::string::npos);

  CmdResult sim = run_cli("oracle --which simulator --quick");
  CHECK(sim.code == 0);
  CHECK(sim.output.find("oracle: PASS") != std::string::npos);
  CHECK(sim.output.find("FAIL") == std::string::npos);

  CmdResult bandit = run_cli("oracle --which bandit --quick");
  CHECK(bandit.code == 0);
  CHECK(run_cli("oracle --which cooking").code == 2);
}

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "davydov/config.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using davydov::read_csv;

namespace {

const std::string kSim = DAVYDOV_SIM;
const fs::path kConfigs = DAVYDOV_CONFIG_DIR;
const char* kBundle[] = {"populations.csv", "temperature.csv", "phasespace.csv", "energy.csv", "run_manifest.json"};

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "davydov_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result sim(const std::string& args) {
  const fs::path out = workdir() / "stdout.txt";
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = "'" + kSim + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string config(const std::string& name) { return "'" + (kConfigs / name).string() + "'"; }

const std::string kSmall =
    " --override run.trajectories=3 --override run.master_seed=7 --override run.t_total_ps=0.2";

}  // namespace

TEST_CASE("validate reports physics warnings") {
  Result r = sim("validate --config " + config("fig3_sparse.json"));
  CHECK(r.status == 0);
  CHECK(r.err.find("0.667") != std::string::npos);
  CHECK(r.err.find("recursion") != std::string::npos);

  r = sim("validate --config " + config("fig3_dense.json"));
  CHECK(r.status == 0);
  CHECK(r.err.empty());

  r = sim("validate --config " + config("fig3_aggregate.json") + " --override thermal.nu_per_ps=50");
  CHECK(r.status == 0);
  CHECK(r.err.find("Poisson limit degraded") != std::string::npos);
}

TEST_CASE("validation failures exit nonzero with the key") {
  Result r = sim("validate --config " + config("fig3_aggregate.json") + " --override bath.modes=3");
  CHECK(r.status != 0);
  CHECK(r.err.find("bath.modes") != std::string::npos);

  r = sim("validate --config " + config("fig3_aggregate.json") + " --override thermal.tau_ps=0.0105");
  CHECK(r.status != 0);
  CHECK(r.err.find("thermal.tau_ps") != std::string::npos);

  r = sim("validate --config /nonexistent.json");
  CHECK(r.status != 0);
  CHECK(r.err.find("/nonexistent.json") != std::string::npos);

  r = sim("run --config " + config("fig3_aggregate.json") + " --out '" + (workdir() / "never").string() +
          "' --override run.dt_fs=0");
  CHECK(r.status != 0);
  CHECK(r.err.find("run.dt_fs") != std::string::npos);
  CHECK_FALSE(fs::exists(workdir() / "never" / "populations.csv"));

  CHECK(sim("").status != 0);
}

TEST_CASE("identical runs are byte-identical and reproducible from the manifest") {
  const fs::path a = workdir() / "a", b = workdir() / "b", c = workdir() / "c";
  REQUIRE(sim("run --config " + config("fig3_aggregate.json") + " --out '" + a.string() + "' --threads 2" + kSmall).status == 0);
  REQUIRE(sim("run --config " + config("fig3_aggregate.json") + " --out '" + b.string() + "' --threads 2" + kSmall).status == 0);
  for (const char* f : kBundle) CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);

  REQUIRE(sim("run --config '" + (a / "run_manifest.json").string() + "' --out '" + c.string() + "'").status == 0);
  for (const char* f : kBundle) CHECK_MESSAGE(slurp(a / f) == slurp(c / f), f);

  const auto pops = read_csv(a / "populations.csv");
  CHECK(pops.rows.size() == 21);
  CHECK(pops.rows.front()[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("thread count does not change results beyond round-off") {
  const fs::path one = workdir() / "t1", four = workdir() / "t4";
  REQUIRE(sim("run --config " + config("fig3_aggregate.json") + " --out '" + one.string() + "' --threads 1" + kSmall).status == 0);
  REQUIRE(sim("run --config " + config("fig3_aggregate.json") + " --out '" + four.string() + "' --threads 4" + kSmall).status == 0);
  for (const char* f : {"populations.csv", "temperature.csv", "energy.csv"}) {
    const auto x = read_csv(one / f), y = read_csv(four / f);
    REQUIRE(x.rows.size() == y.rows.size());
    for (std::size_t s = 0; s < x.rows.size(); ++s)
      for (std::size_t k = 0; k < x.rows[s].size(); ++k)
        CHECK(std::abs(x.rows[s][k] - y.rows[s][k]) <= 1e-12 * std::max(1.0, std::abs(x.rows[s][k])));
  }
}

TEST_CASE("checkpoint and resume") {
  const fs::path part = workdir() / "part", rest = workdir() / "rest", whole = workdir() / "whole";
  const fs::path ckpt = workdir() / "ckpt.bin";
  const std::string base = "run --config " + config("fig3_aggregate.json") +
                           " --override run.master_seed=3 --override run.t_total_ps=0.1 --threads 1";
  REQUIRE(sim(base + " --override run.trajectories=2 --out '" + part.string() + "' --checkpoint '" + ckpt.string() + "'").status == 0);
  REQUIRE(sim(base + " --override run.trajectories=5 --out '" + rest.string() + "' --resume '" + ckpt.string() + "'").status == 0);
  REQUIRE(sim(base + " --override run.trajectories=5 --out '" + whole.string() + "'").status == 0);
  const auto x = read_csv(rest / "populations.csv"), y = read_csv(whole / "populations.csv");
  for (std::size_t s = 0; s < x.rows.size(); ++s)
    for (std::size_t k = 0; k < x.rows[s].size(); ++k) CHECK(x.rows[s][k] == doctest::Approx(y.rows[s][k]).epsilon(1e-12));
  std::ifstream is(rest / "run_manifest.json");
  CHECK(nlohmann::json::parse(is)["trajectories_completed"] == 5);
}

TEST_CASE("per-trajectory dump") {
  const fs::path d = workdir() / "dump";
  REQUIRE(sim("run --config " + config("fig3_aggregate.json") + " --out '" + d.string() + "' --dump-trajectories" + kSmall).status == 0);
  for (int i = 0; i < 3; ++i) {
    const fs::path f = d / "trajectories" / ("traj_00000" + std::to_string(i) + ".csv");
    REQUIRE(fs::exists(f));
    const auto t = read_csv(f);
    CHECK(t.rows.size() == 21);
    CHECK(t.header.back() == "E_total_cm");
  }
}

TEST_CASE("thread count from the environment is recorded") {
  const fs::path d = workdir() / "env";
  setenv("DAVYDOV_THREADS", "3", 1);
  REQUIRE(sim("run --config " + config("fig3_aggregate.json") + " --out '" + d.string() + "'" + kSmall).status == 0);
  unsetenv("DAVYDOV_THREADS");
  std::ifstream is(d / "run_manifest.json");
  CHECK(nlohmann::json::parse(is)["threads"] == 3);
}

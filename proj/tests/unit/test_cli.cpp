#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gibbsgap_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(GIBBSGAP_EXE) + " --out " + out.string() + " " + args + " >" +
                          (out / "stdout.txt").string() + " 2>" + (out / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  const auto dir = scratch("usage");
  CHECK(run("analyze --model equicorrelated_binary --d 2 --bogus", dir) == 2);
  CHECK(run("", dir) == 2);
  CHECK(run("sample --model equicorrelated_binary --d 2 --replicas 0", dir) == 2);
  CHECK(run("sample --model equicorrelated_binary --d 2 --f values:0,2,0,1", dir) == 2);
  CHECK(run("counterexample --q 1 --N 10", dir) == 2);
  CHECK(run("counterexample --q 0.5 --N 10,10", dir) == 2);
  CHECK(run("sweep --d 2,3", dir) == 2);
  CHECK(run("analyze --model equicorrelated_binary --d 2 --scan dsg:1,1", dir) == 2);
  CHECK(run("analyze --target /nonexistent.json", dir) == 2);
  CHECK(run("--version", dir) == 0);
}

TEST_CASE("state cap refusal exits with status 3") {
  const auto dir = scratch("cap");
  CHECK(run("--cap 100 analyze --model independent_uniform --d 8", dir) == 3);
  CHECK(run("counterexample --N 2000", dir) == 3);
  CHECK_FALSE(fs::exists(dir / "analyze.json"));
}

TEST_CASE("analyze reports the worked example") {
  const auto dir = scratch("analyze");
  REQUIRE(run("analyze --model equicorrelated_binary --d 2 --epsilon 0.25 --scan dsg:1,2 --scan rsg:uniform", dir) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "analyze.json"));
  CHECK(j["tool"] == "gibbsgap");
  CHECK(j["config"]["seed"] == 0);
  CHECK(std::abs(j["scans"][0]["spectral_radius_centered"].get<double>() - 0.25) <= 1e-10);
  CHECK(std::abs(j["scans"][0]["l2_norm_centered"].get<double>() - 0.5) <= 1e-10);
  CHECK(std::abs(j["scans"][1]["l2_norm_centered"].get<double>() - 0.75) <= 1e-10);
  CHECK(std::abs(j["angle"]["closed_form"]["value"].get<double>() - 0.5) <= 1e-9);
  CHECK(j["assertions"]["bounds_ok"] == true);
  const std::string csv = slurp(dir / "analyze_bounds.csv");
  CHECK(csv.rfind("# {", 0) == 0);
}

TEST_CASE("sweep, sample and counterexample run and are byte-identical on rerun") {
  const std::string cmds[] = {
      "sweep --d 2,3,4",
      "sample --model equicorrelated_binary --d 2 --steps 20000 --replicas 300 --tail-n 100 --seed 5 --trace",
      "counterexample --q 0.5 --N 5,10 --b 1.5 --kernels",
  };
  int k = 0;
  for (const auto& cmd : cmds) {
    const auto a = scratch("rerun_a" + std::to_string(k));
    const auto b = scratch("rerun_b" + std::to_string(k));
    ++k;
    REQUIRE(run(cmd, a) == 0);
    REQUIRE(run(cmd, b) == 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      const auto name = e.path().filename().string();
      if (name == "stdout.txt" || name == "stderr.txt") continue;
      ++files;
      CHECK_MESSAGE(slurp(e.path()) == slurp(b / name), name);
    }
    CHECK(files >= 2);
  }
}

TEST_CASE("counterexample table") {
  const auto dir = scratch("counter");
  REQUIRE(run("counterexample --q 0.5 --N 10,20 --b 2", dir) == 0);
  const std::string csv = slurp(dir / "counterexample.csv");
  CHECK(csv.find("\nN,states,pi00,gap_K,") != std::string::npos);
  CHECK(csv.find(",inf,true\n") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "counterexample.json"));
  CHECK(j["gap_K_decreasing"] == true);
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch("env");
  const std::string cmd = "GIBBSGAP_OUT_DIR=" + dir.string() + " " + GIBBSGAP_EXE +
                          " counterexample --N 3,4 >/dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "counterexample.json"));
}

// End-to-end checks of the v2xsim command-line surface. The binary path
// arrives as the first program argument (wired up by CMake).
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

std::string g_bin;
namespace fs = std::filesystem;

int run_cmd(const std::string& args) {
  std::string cmd = g_bin + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

std::string fast_flags() {
  return "--scenario 3 --duration-tti 300 --warmup-tti 100 --seed 5";
}

}  // namespace

TEST_CASE("run writes csvs and a manifest and exits zero") {
  auto out = fresh_dir("v2x_cli_run");
  REQUIRE(run_cmd("run " + fast_flags() + " --mode proposed --sigma-m 5 --out " +
                  out.string()) == 0);
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().extension() == ".csv") ++csvs;
  CHECK(csvs >= 4);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "summary.csv"));
  fs::remove_all(out);
}

TEST_CASE("cli flags override config file values and the manifest reflects it") {
  auto out = fresh_dir("v2x_cli_override");
  auto cfg_path = fs::temp_directory_path() / "v2x_cli_cfg.txt";
  {
    std::ofstream cfg(cfg_path);
    cfg << "# run configuration\n"
        << "scenario = 3\n"
        << "mode = baseline1\n"
        << "sigma_m = 50\n"
        << "duration_tti = 300\n"
        << "warmup_tti = 100\n";
  }
  REQUIRE(run_cmd("run --config " + cfg_path.string() + " --sigma-m 5 --mode proposed --out " +
                  out.string()) == 0);
  std::ifstream manifest(out / "manifest.json");
  auto j = nlohmann::json::parse(manifest);
  CHECK(j.at("config").at("sigma_m").get<double>() == 5.0);
  CHECK(j.at("config").at("mode").get<std::string>() == "proposed");
  CHECK(j.at("config").at("scenario").get<int>() == 3);  // from the file
  CHECK(j.contains("version"));
  fs::remove_all(out);
  fs::remove(cfg_path);
}

TEST_CASE("generic --set overrides reach the manifest") {
  auto out = fresh_dir("v2x_cli_set");
  REQUIRE(run_cmd("run " + fast_flags() + " --set pf_beta=0.02 --set n_prb=25 --out " +
                  out.string()) == 0);
  std::ifstream manifest(out / "manifest.json");
  auto j = nlohmann::json::parse(manifest);
  CHECK(j.at("config").at("pf_beta").get<double>() == 0.02);
  CHECK(j.at("config").at("n_prb").get<int>() == 25);
  fs::remove_all(out);
}

TEST_CASE("bad invocations exit with code 2") {
  CHECK(run_cmd("run --no-such-flag") == 2);
  CHECK(run_cmd("run --config /nonexistent/path.cfg") == 2);
  CHECK(run_cmd("run --duration-tti 0") == 2);
  CHECK(run_cmd("run --set nonsense_key=1") == 2);
  CHECK(run_cmd("compare --modes proposed,proposed --seeds 1 " + fast_flags()) == 2);
  CHECK(run_cmd("compare --modes proposed --seeds 1 " + fast_flags()) == 2);
}

TEST_CASE("compare runs the grid and emits ordering columns") {
  auto out = fresh_dir("v2x_cli_compare");
  REQUIRE(run_cmd("compare --modes proposed,baseline1,baseline2 --seeds 1,2,3 " + fast_flags() +
                  " --sigma-m 5 --out " + out.string()) == 0);
  int manifests = 0;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.path().filename() == "manifest.json") ++manifests;
  CHECK(manifests == 9);  // 3 modes x 3 seeds
  std::ifstream csv(out / "comparison.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.find("latency_ordering_pass") != std::string::npos);
  CHECK(header.find("throughput_ordering_pass") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 3);  // one per seed
  fs::remove_all(out);
}

TEST_CASE("sweep lays out one directory per cell") {
  auto out = fresh_dir("v2x_cli_sweep");
  REQUIRE(run_cmd("sweep --scenarios 3 --modes proposed --sigmas 5,50 --seeds 1 " +
                  fast_flags() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "scen3_proposed_sigma5_seed1" / "summary.csv"));
  CHECK(fs::exists(out / "scen3_proposed_sigma50_seed1" / "summary.csv"));
  fs::remove_all(out);
}

TEST_CASE("topology dump emits per-epoch csvs when requested") {
  auto out = fresh_dir("v2x_cli_dump");
  REQUIRE(run_cmd("run " + fast_flags() + " --mode proposed --dump-topology --out " +
                  out.string()) == 0);
  CHECK(fs::exists(out / "topology_epoch_0.csv"));
  CHECK(fs::exists(out / "topology_epoch_200.csv"));
  std::ifstream dump(out / "topology_epoch_0.csv");
  std::string header;
  std::getline(dump, header);
  CHECK(header == "vehicle_id,cluster_id,leader_id,x_m,y_m");
  fs::remove_all(out);
}

int main(int argc, char** argv) {
  doctest::Context context;
  if (argc > 1 && argv[1][0] != '-') {
    g_bin = argv[1];
    context.applyCommandLine(argc - 1, argv + 1);
  } else {
    context.applyCommandLine(argc, argv);
  }
  if (g_bin.empty()) {
    const char* env = std::getenv("V2XSIM_BIN");
    if (env) g_bin = env;
  }
  if (g_bin.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-v2xsim>\n");
    return 1;
  }
  return context.run();
}

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path p = [] {
    auto d = fs::temp_directory_path() / "aperio_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(APERIO_CLI) + " " + args + " > " + (scratch() / "stdout").string() + " 2> " +
                          (scratch() / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const std::string& name, const nlohmann::json& j) {
  auto p = scratch() / name;
  std::ofstream(p) << j.dump();
  return p.string();
}

nlohmann::json config() {
  return nlohmann::json::parse(R"({
    "name": "cli",
    "lattice": {"generator": "fibonacci", "dimension": 1, "window": [[-60, 60]]},
    "model": {"kernel": "identity"},
    "tasks": ["verify", "tree"],
    "numerics": {"tree_depth": 3}
  })");
}

nlohmann::json last_error() {
  std::ifstream in(scratch() / "stderr");
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("run succeeds and writes a manifest") {
  const auto out = scratch() / "run";
  CHECK(cli("run --config " + write_config("ok.json", config()) + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "tree.json"));
  std::ifstream in(out / "manifest.json");
  auto m = nlohmann::json::parse(in);
  CHECK(m["exit_code"] == 0);
  CHECK(m.contains("config_sha256"));
  CHECK(!m["files"].empty());
}

TEST_CASE("config errors exit with code 2 and name the key") {
  auto j = config();
  j["numerics"]["tree_depht"] = 3;
  CHECK(cli("run --config " + write_config("typo.json", j)) == 2);
  CHECK(last_error()["key"] == "/numerics/tree_depht");
  CHECK(cli("run --config " + write_config("ok.json", config()) + " --task nonsense") == 2);
  CHECK(cli("sweep --config " + write_config("ok.json", config()) + " --axis /numerics/tree_depth --values \"\"") ==
        2);
  CHECK(cli("sweep --config " + write_config("ok.json", config()) + " --axis /model/none --values 1") == 2);
  CHECK(last_error()["key"] == "/model/none");
}

TEST_CASE("numerical failures exit with code 1") {
  // The free square lattice has no spectral gap.
  auto j = nlohmann::json::parse(R"({
    "name": "gapless",
    "lattice": {"generator": "periodic", "dimension": 2, "window": [[0, 9], [0, 9]]},
    "model": {"kernel": "nn_hofstadter", "params": {"t": 1.0, "nn_radius": 1.01}},
    "tasks": ["chern"],
    "numerics": {"bulk_margin": 2, "gap_floor": 0.2}
  })");
  CHECK(cli("run --config " + write_config("gapless.json", j) + " --out " + (scratch() / "gapless").string()) == 1);
  CHECK(fs::exists(scratch() / "gapless" / "error.json"));
}

TEST_CASE("sweep and export") {
  const auto out = scratch() / "sweep";
  CHECK(cli("sweep --config " + write_config("ok.json", config()) +
            " --axis /numerics/tree_depth --values 2,3 --threads 2 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "sweep.csv"));
  CHECK(fs::exists(out / "point_1" / "tree.json"));
  CHECK(cli("export " + out.string() + " --out " + (scratch() / "plots").string()) == 0);
  CHECK(fs::exists(scratch() / "plots" / "index.json"));
}

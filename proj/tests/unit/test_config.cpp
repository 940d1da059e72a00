#include "pipeline/config.hpp"
#include "pipeline/pipeline.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace aperio::tools;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "name": "unit",
    "seed": 4,
    "lattice": {"generator": "periodic", "dimension": 2, "window": [[0, 11], [0, 11]]},
    "model": {"kernel": "nn_hofstadter", "params": {"t": 1.0, "nn_radius": 1.01}, "flux": 0.25},
    "tasks": ["verify", "spectrum"],
    "numerics": {"bulk_margin": 3, "energy": -2.0},
    "output": "out/unit"
  })");
}

std::string error_key(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("configs round-trip through json") {
  auto c = parse_config(base_config());
  CHECK(c.lattice.window.size() == 2);
  CHECK(c.model.flux == 0.25);
  CHECK(c.numerics.bulk_margin == 3.0);
  CHECK(parse_config(to_json(c)) == c);
}

TEST_CASE("malformed configs name the offending key") {
  auto j = base_config();
  j["lattice"]["extra"] = 1;
  CHECK(error_key(j) == "/lattice/extra");
  j = base_config();
  j["model"]["flux"] = "quarter";
  CHECK(error_key(j) == "/model/flux");
  j = base_config();
  j["tasks"] = {"verify", "frobnicate"};
  CHECK(error_key(j) == "/tasks/1");
  j = base_config();
  j["lattice"]["window"] = {{0, 11}};
  CHECK_FALSE(error_key(j).empty());
}

TEST_CASE("json pointer helpers") {
  auto j = base_config();
  CHECK(numeric_at(j, "/model/flux") == 0.25);
  CHECK(numeric_at(with_value(j, "/model/flux", 0.2), "/model/flux") == 0.2);
  CHECK_THROWS_AS(numeric_at(j, "/model/kernel"), ConfigError);
  CHECK_THROWS_AS(numeric_at(j, "/nowhere"), ConfigError);
}

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("seeds are derived deterministically") {
  auto c = parse_config(base_config());
  CHECK(lattice_seed(c) == lattice_seed(c));
  CHECK(task_seed(c, 3) != task_seed(c, 4));
  auto d = c;
  d.lattice.seed = 77;
  CHECK(lattice_seed(d) == 77);
}

TEST_CASE("runs are reproducible byte for byte") {
  auto c = parse_config(base_config());
  const auto root = std::filesystem::temp_directory_path() / "aperio_unit_run";
  std::filesystem::remove_all(root);
  auto a = run(c, root / "a");
  auto b = run(c, root / "b");
  CHECK(a.exit_code == exit_ok);
  CHECK(b.exit_code == exit_ok);
  for (const char* f : {"verify.json", "spectrum.json", "spectrum.csv"}) {
    std::ifstream fa(root / "a" / f), fb(root / "b" / f);
    std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(!sa.empty());
    CHECK(sa == sb);
  }
  std::filesystem::remove_all(root);
}

#pragma once

#include "aperio/geometry.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aperio::tools {

/// Malformed configuration; `key` is a JSON pointer to the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct LatticeSpec {
  std::string generator = "periodic";  // periodic, fibonacci, ammann_beenker, amorphous
  int dimension = 2;
  double spacing = 1.0;  // periodic
  double r = 0.4;        // amorphous
  double R = 0.9;        // amorphous
  std::vector<std::array<double, 2>> window;
  double perturb = 0;
  std::uint64_t seed = 0;

  bool operator==(const LatticeSpec&) const = default;
};

struct ModelSpec {
  std::string kernel = "nn_hofstadter";  // nn_hofstadter, exp_hopping, qwz, ssh, kitaev, shift, identity
  nlohmann::json params = nlohmann::json::object();
  double flux = 0;                          // d = 2 only
  std::vector<double> period;               // empty: open sample

  bool operator==(const ModelSpec&) const = default;
};

struct Numerics {
  std::optional<double> bulk_margin;
  double round_tol = 0.05;
  double gap_floor = 0.02;
  double energy = 0;
  double fredholm_threshold = 0.25;
  double kernel_tol = 1e-6;
  std::optional<double> cut;
  int cut_dir = 1;
  std::vector<int> weak_dirs{0};
  std::optional<double> slab_width;
  double bulk_boundary_tol = 0.1;
  int tree_depth = 3;
  std::string zeta = "log";
  std::vector<double> eps{0.1};
  int trials = 100;
  int seeds = 5;
  std::vector<int> scan_depths;
  double delta = 0.25;
  std::vector<double> residue_s{2.2, 2.4, 2.6, 2.8, 3.0};
  int sobolev_order = 1;
  int sobolev_power = 1;

  bool operator==(const Numerics&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  LatticeSpec lattice;
  ModelSpec model;
  std::vector<std::string> tasks;
  Numerics numerics;
  std::string output = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

const std::vector<std::string>& known_tasks();

/// Strict parse: unknown keys, wrong types and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

/// Value at a JSON pointer; ConfigError naming the pointer if absent or not a number.
double numeric_at(const nlohmann::json& j, const std::string& pointer);
/// Copy of j with the number at `pointer` replaced.
nlohmann::json with_value(const nlohmann::json& j, const std::string& pointer, double value);

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

}  // namespace aperio::tools

#pragma once

#include "aperio/geometry.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aperio {

struct Provenance {
  std::string generator;
  std::uint64_t seed = 0;
  nlohmann::json parameters = nlohmann::json::object();
};

/// Finite sample of an (r,R)-Delone set. Points are kept in lexicographic
/// order; a spatial index is built once at construction.
class DeloneSet {
 public:
  DeloneSet(int dimension, std::vector<Vec> points, double r, double R, Box window, Provenance provenance = {},
            bool exact_coordinates = false);

  int dimension() const { return dim_; }
  const std::vector<Vec>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Vec& operator[](std::size_t i) const { return points_[i]; }
  double r() const { return r_; }
  double R() const { return R_; }
  const Box& window() const { return window_; }
  const Provenance& provenance() const { return provenance_; }
  /// Integer generators compare patches exactly (coordinates are exact
  /// multiples of the spacing).
  bool exact_coordinates() const { return exact_; }
  /// Patch comparison tolerance: 1e-9 * window diameter.
  double tol_patch() const;

  const SpatialIndex& index() const { return *index_; }
  std::optional<std::size_t> find(const Vec& x, double tol = -1) const;
  std::vector<std::size_t> within(const Vec& x, double radius) const { return index_->within(x, radius); }

  /// Copy with different Delone constants (used to test certification).
  DeloneSet with_constants(double r, double R) const;
  DeloneSet without_point(std::size_t i) const;

 private:
  int dim_;
  std::vector<Vec> points_;
  double r_, R_;
  Box window_;
  Provenance provenance_;
  bool exact_;
  std::shared_ptr<SpatialIndex> index_;
};

/// Pattern (L - x) cap B(0; radius), stored relative to its center.
struct Patch {
  double radius = 0;
  std::vector<Vec> relative_points;  // sorted lexicographically, contains 0
  std::vector<std::int64_t> key;     // coordinates on the tol_patch grid

  bool operator==(const Patch& o) const { return key == o.key; }
  bool operator<(const Patch& o) const { return key < o.key; }
  std::size_t size() const { return relative_points.size(); }
};

struct PatchKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& k) const;
};

Patch make_patch(std::vector<Vec> relative_points, double radius, double tol);

struct PatchClass {
  Patch patch;
  std::size_t multiplicity = 0;
  std::vector<std::size_t> witnesses;  // site indices, ascending
};

struct DeloneReport {
  bool discrete_ok = false;
  bool dense_ok = false;
  bool inside_ok = false;
  double min_pairwise = 0;
  double worst_gap = 0;
  Vec worst_gap_center;
  std::size_t grid_points = 0;

  bool ok() const { return discrete_ok && dense_ok && inside_ok; }
};

enum class CutProjectScheme { fibonacci, ammann_beenker };

DeloneSet generate_periodic(int d, double spacing, const Box& window);
DeloneSet generate_cut_and_project(CutProjectScheme scheme, const Box& window);
DeloneSet generate_amorphous(int d, double r, double target_R, const Box& window, std::uint64_t seed);
DeloneSet perturb(const DeloneSet& set, double amplitude, std::uint64_t seed);
DeloneSet translate(const DeloneSet& set, const Vec& a);

DeloneReport verify_delone(const DeloneSet& set);

Patch patch_at(const DeloneSet& set, std::size_t site, double radius);
Patch patch_at(const DeloneSet& set, const Vec& x, double radius);
/// Patch clipped to the window (no error); `clipped` reports whether the
/// ball left the window.
Patch clipped_patch_at(const DeloneSet& set, std::size_t site, double radius, bool* clipped);

/// Sites whose radius-ball lies in the window.
std::vector<std::size_t> eligible_centers(const DeloneSet& set, double radius);
/// Patch classes in key order with multiplicities and witness sites.
std::vector<PatchClass> enumerate_patches(const DeloneSet& set, double radius);

CutProjectScheme parse_scheme(const std::string& name);
std::string scheme_name(CutProjectScheme s);

inline constexpr double golden_ratio = 1.6180339887498948482;

}  // namespace aperio

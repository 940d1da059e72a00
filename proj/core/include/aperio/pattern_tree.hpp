#pragma once

#include "aperio/delone.hpp"
#include "aperio/operator.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace aperio {

struct TreeVertex {
  int level = 0;
  Patch patch;
  std::vector<std::size_t> witnesses;  // site indices, lexicographic order
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
};

/// Rooted tree of patch classes at radii n*R, n = 0..depth.
struct PatternTree {
  double R = 0;
  int depth = 0;
  std::vector<TreeVertex> vertices;
  std::vector<std::vector<std::size_t>> levels;  // vertex ids per level
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  /// Site coordinates of the underlying sample.
  std::vector<Vec> sites;
  Box window;
  /// site_class[n][s]: vertex id of the level-n pattern of site s, or -1
  /// when the ball of radius n*R around s leaves the window.
  std::vector<std::vector<long>> site_class;

  std::size_t level_size(int n) const { return levels.at(static_cast<std::size_t>(n)).size(); }
  /// True if site s lies in the cylinder set of vertex v.
  bool in_cylinder(std::size_t site, std::size_t v) const;
  std::optional<std::size_t> find_vertex(int level, const Patch& p) const;
};

struct ChoicePair {
  std::vector<std::size_t> tau_plus;   // site index per vertex
  std::vector<std::size_t> tau_minus;
  std::vector<bool> degenerate;        // tau_plus == tau_minus was forced
  std::uint64_t seed = 0;
};

enum class Zeta { log, exp };

/// zeta_n = log(1+n) or exp(n R).
double zeta_value(Zeta z, int n, double R);
Zeta parse_zeta(const std::string& s);

/// Largest n <= cap such that at least `min_centers` sites have their n*R
/// ball inside the window.
int default_depth(const DeloneSet& set, double R, std::size_t min_centers = 20, int cap = 64);

PatternTree build_tree(const DeloneSet& set, int depth, std::optional<double> level_radius = std::nullopt);

struct UltrametricResult {
  double value = 1;
  int level = 0;          // largest level with equal patterns
  bool saturated = false;  // equal through the requested depth
};

UltrametricResult ultrametric(const DeloneSet& set, std::size_t a, std::size_t b, int depth, double R);
/// Same, read off the tree's site_class table (sites must be classified at
/// every level up to the tree depth to saturate).
UltrametricResult ultrametric(const PatternTree& tree, std::size_t a, std::size_t b);

struct ChoiceOptions {
  /// Witnesses must have this much clearance from the window (for fibers).
  double min_clearance = 0;
};

ChoicePair choice_pair(const PatternTree& tree, std::uint64_t seed, const ChoiceOptions& opt = {});
/// Every tau(v) lies in C_v.
bool verify_choice(const PatternTree& tree, const ChoicePair& pair);

/// D = [[0, D+^*],[D+, 0]] on l^2(V) (x) C^2 with D+ = zeta_{|v|}.
OperatorSample pb_operator(const PatternTree& tree, Zeta zeta);

using SiteFunction = std::function<double(std::size_t site)>;

double commutator_norm(const PatternTree& tree, const ChoicePair& pair, const SiteFunction& f, Zeta zeta);
/// Indicator of the cylinder set C_v.
SiteFunction cylinder_indicator(const PatternTree& tree, std::size_t v);
/// sup_n zeta_n e^{-nR}: the Lipschitz-to-commutator constant.
double lipschitz_constant(const PatternTree& tree, Zeta zeta);

/// sum_{|v| <= |p|} [chi_p(tau+(v)) - chi_p(tau-(v))].
long quasi_hom_pairing(const PatternTree& tree, const ChoicePair& pair, const Patch& p, int level);

}  // namespace aperio

#include "aperio/pattern_tree.hpp"

#include "aperio/error.hpp"
#include "aperio/random.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace aperio {

bool PatternTree::in_cylinder(std::size_t site, std::size_t v) const {
  const auto& vx = vertices.at(v);
  return site_class.at(static_cast<std::size_t>(vx.level)).at(site) == static_cast<long>(v);
}

std::optional<std::size_t> PatternTree::find_vertex(int level, const Patch& p) const {
  if (level < 0 || level > depth) return std::nullopt;
  for (std::size_t v : levels[static_cast<std::size_t>(level)])
    if (vertices[v].patch == p) return v;
  return std::nullopt;
}

double zeta_value(Zeta z, int n, double R) { return z == Zeta::log ? std::log1p(n) : std::exp(n * R); }

Zeta parse_zeta(const std::string& s) {
  if (s == "log") return Zeta::log;
  if (s == "exp") return Zeta::exp;
  throw InvalidArgument("unknown zeta sequence: " + s);
}

int default_depth(const DeloneSet& set, double R, std::size_t min_centers, int cap) {
  int n = 0;
  while (n < cap && eligible_centers(set, (n + 1) * R).size() >= min_centers) ++n;
  return n;
}

PatternTree build_tree(const DeloneSet& set, int depth, std::optional<double> level_radius) {
  if (depth < 0) throw InvalidArgument("build_tree: depth must be nonnegative");
  PatternTree t;
  t.R = level_radius ? *level_radius : set.R();
  t.depth = depth;
  t.sites = set.points();
  t.window = set.window();
  if (eligible_centers(set, depth * t.R).empty())
    throw InsufficientSample("build_tree: window too small for depth " + std::to_string(depth));

  t.levels.resize(static_cast<std::size_t>(depth) + 1);
  t.site_class.assign(static_cast<std::size_t>(depth) + 1, std::vector<long>(set.size(), -1));
  for (int n = 0; n <= depth; ++n) {
    for (auto& pc : enumerate_patches(set, n * t.R)) {
      std::size_t id = t.vertices.size();
      for (std::size_t s : pc.witnesses) t.site_class[static_cast<std::size_t>(n)][s] = static_cast<long>(id);
      TreeVertex v;
      v.level = n;
      v.patch = std::move(pc.patch);
      v.witnesses = std::move(pc.witnesses);
      if (n > 0) {
        long parent = t.site_class[static_cast<std::size_t>(n) - 1][v.witnesses.front()];
        if (parent < 0) throw NumericalError("build_tree: restriction of an eligible patch is not eligible");
        v.parent = static_cast<std::size_t>(parent);
      }
      t.levels[static_cast<std::size_t>(n)].push_back(id);
      t.vertices.push_back(std::move(v));
    }
  }
  for (std::size_t id = 0; id < t.vertices.size(); ++id)
    if (t.vertices[id].parent) {
      t.vertices[*t.vertices[id].parent].children.push_back(id);
      t.edges.emplace_back(*t.vertices[id].parent, id);
    }
  return t;
}

UltrametricResult ultrametric(const DeloneSet& set, std::size_t a, std::size_t b, int depth, double R) {
  UltrametricResult res;
  res.level = 0;
  for (int n = 1; n <= depth; ++n) {
    Patch pa = patch_at(set, a, n * R);
    Patch pb = patch_at(set, b, n * R);
    if (!(pa == pb)) break;
    res.level = n;
  }
  res.saturated = res.level == depth;
  res.value = std::exp(-res.level * R);
  return res;
}

UltrametricResult ultrametric(const PatternTree& tree, std::size_t a, std::size_t b) {
  UltrametricResult res;
  for (int n = 1; n <= tree.depth; ++n) {
    long ca = tree.site_class[static_cast<std::size_t>(n)][a];
    long cb = tree.site_class[static_cast<std::size_t>(n)][b];
    if (ca < 0 || cb < 0)
      throw InsufficientSample("ultrametric: site pattern unavailable at level " + std::to_string(n));
    if (ca != cb) break;
    res.level = n;
  }
  res.saturated = res.level == tree.depth;
  res.value = std::exp(-res.level * tree.R);
  return res;
}

ChoicePair choice_pair(const PatternTree& tree, std::uint64_t seed, const ChoiceOptions& opt) {
  ChoicePair cp;
  cp.seed = seed;
  const std::size_t V = tree.vertices.size();
  cp.tau_plus.resize(V);
  cp.tau_minus.resize(V);
  cp.degenerate.assign(V, false);
  for (std::size_t v = 0; v < V; ++v) {
    std::vector<std::size_t> cand;
    for (std::size_t s : tree.vertices[v].witnesses)
      if (tree.window.clearance(tree.sites[s]) >= opt.min_clearance) cand.push_back(s);
    if (cand.empty()) cand = tree.vertices[v].witnesses;
    cp.tau_plus[v] = cand.front();
    if (cand.size() < 2) {
      cp.tau_minus[v] = cand.front();
      cp.degenerate[v] = true;
    } else if (seed == 0) {
      cp.tau_minus[v] = cand[1];
    } else {
      Rng rng(child_seed(seed, v));
      std::uniform_int_distribution<std::size_t> pick(1, cand.size() - 1);
      cp.tau_minus[v] = cand[pick(rng)];
    }
  }
  return cp;
}

bool verify_choice(const PatternTree& tree, const ChoicePair& pair) {
  for (std::size_t v = 0; v < tree.vertices.size(); ++v)
    if (!tree.in_cylinder(pair.tau_plus[v], v) || !tree.in_cylinder(pair.tau_minus[v], v)) return false;
  return true;
}

OperatorSample pb_operator(const PatternTree& tree, Zeta zeta) {
  const std::size_t V = tree.vertices.size();
  OperatorSample D;
  D.dimension = tree.window.dimension();
  D.q = 2;
  D.window = tree.window;
  D.matrix = CMat::Zero(static_cast<Eigen::Index>(2 * V), static_cast<Eigen::Index>(2 * V));
  for (std::size_t v = 0; v < V; ++v) {
    D.sites.push_back(tree.sites[tree.vertices[v].witnesses.front()]);
    double z = zeta_value(zeta, tree.vertices[v].level, tree.R);
    auto i = static_cast<Eigen::Index>(2 * v);
    D.matrix(i + 1, i) = z;
    D.matrix(i, i + 1) = z;
  }
  D.boundary_affected.assign(V, false);
  return D;
}

double commutator_norm(const PatternTree& tree, const ChoicePair& pair, const SiteFunction& f, Zeta zeta) {
  double worst = 0;
  for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
    double z = zeta_value(zeta, tree.vertices[v].level, tree.R);
    worst = std::max(worst, z * std::abs(f(pair.tau_plus[v]) - f(pair.tau_minus[v])));
  }
  return worst;
}

SiteFunction cylinder_indicator(const PatternTree& tree, std::size_t v) {
  const auto& row = tree.site_class.at(static_cast<std::size_t>(tree.vertices.at(v).level));
  const long id = static_cast<long>(v);
  return [&row, id](std::size_t s) { return row[s] == id ? 1.0 : 0.0; };
}

double lipschitz_constant(const PatternTree& tree, Zeta zeta) {
  double c = 0;
  for (int n = 0; n <= tree.depth; ++n) c = std::max(c, zeta_value(zeta, n, tree.R) * std::exp(-n * tree.R));
  return c;
}

long quasi_hom_pairing(const PatternTree& tree, const ChoicePair& pair, const Patch& p, int level) {
  if (level > tree.depth) throw InvalidArgument("quasi_hom_pairing: level exceeds tree depth");
  auto pv = tree.find_vertex(level, p);
  if (!pv) throw InvalidArgument("quasi_hom_pairing: patch is not a vertex at level " + std::to_string(level));
  long total = 0;
  for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
    if (tree.vertices[v].level > level) continue;
    total += (tree.in_cylinder(pair.tau_plus[v], *pv) ? 1 : 0) - (tree.in_cylinder(pair.tau_minus[v], *pv) ? 1 : 0);
  }
  return total;
}

}  // namespace aperio

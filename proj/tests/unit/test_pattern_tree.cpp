#include "aperio/pattern_tree.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace aperio;

TEST_CASE("periodic trees are chains") {
  for (int d : {1, 2, 3}) {
    auto tree = build_tree(generate_periodic(d, 1.0, Box::cube(d, -6, 6)), 3);
    for (int n = 0; n <= 3; ++n) CHECK(tree.level_size(n) == 1);
    CHECK(tree.edges.size() == 3);
  }
}

TEST_CASE("fibonacci level sizes match patch enumeration") {
  auto s = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -300, 300));
  auto tree = build_tree(s, 5);
  for (int n = 0; n <= 5; ++n) CHECK(tree.level_size(n) == enumerate_patches(s, n * s.R()).size());
  for (const auto& [parent, child] : tree.edges) CHECK(tree.vertices[child].level == tree.vertices[parent].level + 1);
}

TEST_CASE("PB operator spectrum is +-zeta with level multiplicities") {
  auto s = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -200, 200));
  auto tree = build_tree(s, 4);
  for (Zeta z : {Zeta::log, Zeta::exp}) {
    auto D = pb_operator(tree, z);
    auto e = eigh(D.matrix, false);
    std::map<long, std::size_t> count;
    for (Eigen::Index k = 0; k < e.values.size(); ++k) count[std::lround(1e8 * std::abs(e.values(k)))]++;
    for (int n = 0; n <= 4; ++n) {
      const long key = std::lround(1e8 * zeta_value(z, n, s.R()));
      if (key == 0) continue;
      CHECK(count[key] == 2 * tree.level_size(n));
    }
  }
}

TEST_CASE("pattern distance is an ultrametric") {
  auto s = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -200, 200));
  auto tree = build_tree(s, 6);
  auto sites = eligible_centers(s, 6 * s.R());
  REQUIRE(sites.size() > 10);
  for (std::size_t i = 0; i + 2 < sites.size(); i += 3) {
    const double ab = ultrametric(tree, sites[i], sites[i + 1]).value;
    const double bc = ultrametric(tree, sites[i + 1], sites[i + 2]).value;
    const double ac = ultrametric(tree, sites[i], sites[i + 2]).value;
    CHECK(ac <= std::max(ab, bc) + 1e-12);
  }
  CHECK(ultrametric(tree, sites[0], sites[0]).saturated);
}

TEST_CASE("choice functions land in their cylinder sets") {
  auto s = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -150, 150));
  auto tree = build_tree(s, 4);
  auto p = choice_pair(tree, 3);
  CHECK(verify_choice(tree, p));
  CHECK(p.tau_plus == choice_pair(tree, 3).tau_plus);
  for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
    CHECK(tree.in_cylinder(p.tau_plus[v], v));
    CHECK(tree.in_cylinder(p.tau_minus[v], v));
  }
}

TEST_CASE("zeta sequences") {
  CHECK(zeta_value(Zeta::log, 0, 1.0) == doctest::Approx(0.0));
  CHECK(zeta_value(Zeta::log, 3, 1.0) == doctest::Approx(std::log(4.0)));
  CHECK(zeta_value(Zeta::exp, 2, 0.5) == doctest::Approx(std::exp(1.0)));
  CHECK(parse_zeta("exp") == Zeta::exp);
}

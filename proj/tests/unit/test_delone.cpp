#include "aperio/delone.hpp"
#include "aperio/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

using namespace aperio;

TEST_CASE("periodic lattice constants and certification") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, -3, 3));
  CHECK(s.size() == 49);
  CHECK(s.r() == doctest::Approx(0.5));
  CHECK(s.R() == doctest::Approx(std::sqrt(0.5)));
  CHECK(s.exact_coordinates());
  auto rep = verify_delone(s);
  CHECK(rep.ok());
  CHECK(rep.min_pairwise == doctest::Approx(1.0));
}

TEST_CASE("verification rejects wrong constants and holes") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, -5, 5));
  CHECK_FALSE(verify_delone(s.with_constants(0.6, std::sqrt(0.5))).discrete_ok);
  auto centre = s.find(make_vec({0, 0}));
  REQUIRE(centre);
  CHECK_FALSE(verify_delone(s.without_point(*centre)).dense_ok);
}

TEST_CASE("fibonacci chain has two tile lengths in golden ratio") {
  auto s = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -100, 100));
  CHECK(verify_delone(s).ok());
  std::set<long> lengths;
  for (std::size_t i = 1; i < s.size(); ++i) lengths.insert(std::lround(1e6 * (s[i](0) - s[i - 1](0))));
  REQUIRE(lengths.size() == 2);
  CHECK(static_cast<double>(*lengths.rbegin()) / static_cast<double>(*lengths.begin()) ==
        doctest::Approx(golden_ratio).epsilon(1e-5));
  CHECK(s.find(make_vec({0})));
}

TEST_CASE("ammann-beenker matches brute-force cut and project") {
  const Box win = Box::cube(2, -6, 6);
  auto s = generate_cut_and_project(CutProjectScheme::ammann_beenker, win);
  CHECK(verify_delone(s).ok());
  CHECK(s.find(make_vec({0, 0})));
  const auto g = s.provenance().parameters.at("gamma");
  const Eigen::Vector2d gamma(g[0].get<double>(), g[1].get<double>());
  std::array<Eigen::Vector2d, 4> e, ep, normal;
  for (int k = 0; k < 4; ++k) {
    e[k] = {std::cos(k * std::numbers::pi / 4), std::sin(k * std::numbers::pi / 4)};
    ep[k] = {std::cos(3 * k * std::numbers::pi / 4), std::sin(3 * k * std::numbers::pi / 4)};
    normal[k] = {-ep[k].y(), ep[k].x()};
  }
  // The window is the zonotope sum_k [-1/2, 1/2] ep[k].
  auto in_window = [&](const Eigen::Vector2d& y) {
    for (const auto& n : normal) {
      double h = 0;
      for (const auto& v : ep) h += 0.5 * std::abs(n.dot(v));
      if (std::abs(n.dot(y)) > h) return false;
    }
    return true;
  };
  const int M = 10;
  std::size_t count = 0;
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b)
      for (int c = -M; c <= M; ++c)
        for (int d = -M; d <= M; ++d) {
          Eigen::Vector2d x = a * e[0] + b * e[1] + c * e[2] + d * e[3];
          if (!win.contains(make_vec({x.x(), x.y()}), 1e-12)) continue;
          if (!in_window(a * ep[0] + b * ep[1] + c * ep[2] + d * ep[3] - gamma)) continue;
          ++count;
          CHECK(s.find(make_vec({x.x(), x.y()}), 1e-9));
        }
  CHECK(count == s.size());
}

TEST_CASE("amorphous sets are seeded and certified") {
  auto a = generate_amorphous(2, 0.4, 0.9, Box::cube(2, -5, 5), 11);
  auto b = generate_amorphous(2, 0.4, 0.9, Box::cube(2, -5, 5), 11);
  CHECK(a.points() == b.points());
  auto rep = verify_delone(a);
  CHECK(rep.ok());
  CHECK(rep.min_pairwise >= 0.8 - 1e-12);
}

TEST_CASE("perturbation moves points by at most the amplitude") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, -4, 4));
  auto p = perturb(s, 0.05, 5);
  REQUIRE(p.size() == s.size());
  CHECK(p.points() == perturb(s, 0.05, 5).points());
  CHECK(p.points() != perturb(s, 0.05, 6).points());
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto j = s.find(p[i], 0.1);
    REQUIRE(j);
    CHECK((p[i] - s[*j]).norm() <= 0.05 * std::sqrt(2.0) + 1e-12);
  }
  CHECK(verify_delone(p).ok());
}

TEST_CASE("translation by set points composes") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, -4, 4));
  const Vec a = make_vec({1, 2}), b = make_vec({-1, 1});
  auto ab = translate(translate(s, a), b);
  auto direct = translate(s, a + b);
  CHECK(ab.points() == direct.points());
  CHECK_THROWS_AS(translate(s, make_vec({0.5, 0})), InvalidArgument);
}

TEST_CASE("patch classes cover the eligible centers") {
  auto s = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -200, 200));
  const double radius = 3 * s.R();
  auto classes = enumerate_patches(s, radius);
  std::size_t total = 0;
  for (const auto& c : classes) {
    total += c.multiplicity;
    CHECK(c.witnesses.size() == c.multiplicity);
    CHECK(patch_at(s, c.witnesses.front(), radius) == c.patch);
  }
  CHECK(total == eligible_centers(s, radius).size());
  // Z has a single patch class at every radius.
  CHECK(enumerate_patches(generate_periodic(1, 1.0, Box::cube(1, -20, 20)), 4.0).size() == 1);
}

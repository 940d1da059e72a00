#include "aperio/io.hpp"

#include <doctest.h>

using namespace aperio;

TEST_CASE("delone sets round-trip through json") {
  auto s = generate_cut_and_project(CutProjectScheme::ammann_beenker, Box::cube(2, -4, 4));
  auto back = delone_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(back.points() == s.points());
  CHECK(back.r() == s.r());
  CHECK(back.R() == s.R());
  CHECK(back.provenance().generator == s.provenance().generator);
  CHECK(back.exact_coordinates() == s.exact_coordinates());
}

TEST_CASE("boxes and vectors round-trip") {
  Box b = Box::cube(3, -1.5, 2);
  Box back = box_from_json(to_json(b));
  CHECK(back.lo == b.lo);
  CHECK(back.hi == b.hi);
  CHECK(vec_from_json(to_json(make_vec({1, 2}))) == make_vec({1, 2}));
}

TEST_CASE("text exports") {
  auto s = generate_periodic(1, 1.0, Box::cube(1, 0, 3));
  auto csv = points_csv(s);
  CHECK(csv.find('\n') != std::string::npos);
  auto tree = build_tree(s, 2);
  CHECK(tree_dot(tree).rfind("digraph", 0) == 0);
  RVec e(2);
  e << -1, 1;
  CHECK(spectrum_csv(e).rfind("index,eigenvalue", 0) == 0);
}

TEST_CASE("reports leave out runtime") {
  InvariantReport rep;
  rep.name = "chern";
  rep.runtime_s = 12.0;
  rep.set_raw(cd(1.02, 0));
  auto j = to_json(rep);
  CHECK_FALSE(j.contains("runtime_s"));
  CHECK(rep.rounded == 1);
}

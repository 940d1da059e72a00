#include "aperio/boundary.hpp"

#include <doctest.h>

#include <cmath>

using namespace aperio;

TEST_CASE("half space keeps the sites beyond the cut") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 9));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle::from_flux(0.25), 1.01, {2.0});
  auto hs = half_space(H, 1, 4.5);
  CHECK(hs.retained.size() == 50);
  for (std::size_t i : hs.retained) CHECK(H.sites[i](1) > 4.5);
  CHECK(hs.compressed.dim() == 50);
  CHECK(hermitian_defect(hs.compressed.matrix) < 1e-14);
}

TEST_CASE("ssh zero modes per boundary") {
  auto chain = generate_periodic(1, 1.0, Box::cube(1, 0, 59));
  for (auto [v, w, expect] : std::vector<std::tuple<double, double, long>>{{0.4, 1.0, 1}, {1.0, 0.4, 0}}) {
    auto ring = ssh_model(chain, v, w, {std::nullopt, make_vec({60.0})});
    auto bb = bulk_boundary_odd(ring, ssh_model(chain, v, w), ssh_chirality(), -0.5);
    REQUIRE(bb.zero_modes);
    CHECK(bb.zero_modes->per_boundary == expect);
    REQUIRE(bb.bulk.oracle);
    CHECK(std::labs(*bb.bulk.oracle) == expect);
    CHECK(bb.agree);
  }
}

TEST_CASE("hofstadter bulk and boundary invariants cancel") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 29));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle::from_flux(0.25), 1.01, {6.0});
  BulkBoundaryOptions o;
  o.dir = 1;
  o.cut = 14.5;
  o.boundary.slab_width = 4;
  o.boundary.lateral_margin = 6;
  auto bb = bulk_boundary_even(H, -2.0, o);
  CHECK(std::abs(bb.bulk.raw.real()) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(bb.difference < 0.1);
  CHECK(bb.agree);
  CHECK_FALSE(bb.edge_states.empty());
}

TEST_CASE("boundary unitary is unitary and decays away from the cut") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 19));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle::from_flux(0.25), 1.01, {5.0});
  auto sd = spectral_gap(H, -2.0);
  auto hs = half_space(H, 1, 9.5);
  auto bu = boundary_unitary(hs, smooth_gap_function(*sd.gap));
  CHECK(bu.unitarity_defect < 1e-10);
  REQUIRE(bu.decay_profile.size() > 4);
  CHECK(bu.decay_profile.back().second < bu.decay_profile.front().second);
}

#include "aperio/error.hpp"
#include "aperio/hamiltonians.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace aperio;

TEST_CASE("ring spectrum is 2 t cos(k)") {
  const int N = 24;
  auto ring = generate_periodic(1, 1.0, Box::cube(1, 0, N - 1));
  auto H = nn_hofstadter(ring, 1.0, MagneticCocycle(1), 1.01, {std::nullopt, make_vec({double(N)})});
  auto e = eigh(H.matrix, false);
  std::vector<double> expect;
  for (int k = 0; k < N; ++k) expect.push_back(2 * std::cos(2 * std::numbers::pi * k / N));
  std::sort(expect.begin(), expect.end());
  for (int k = 0; k < N; ++k) CHECK(e.values(k) == doctest::Approx(expect[static_cast<std::size_t>(k)]).epsilon(1e-10));
}

TEST_CASE("hofstadter gaps carry the expected densities") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 23));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle::from_flux(0.25), 1.01, {6.0});
  auto sd = spectral_gap(H, -2.0);
  REQUIRE(sd.gaps.size() == 2);
  CHECK(bulk_density(sd, H, sd.gaps[0].mid()) == doctest::Approx(0.25).epsilon(0.02));
  CHECK(bulk_density(sd, H, sd.gaps[1].mid()) == doctest::Approx(0.75).epsilon(0.02));
  REQUIRE(sd.gap);
  CHECK(sd.gap->contains(sd.fermi_level));
  auto P = fermi_projection(sd, H);
  CHECK((P.matrix * P.matrix - P.matrix).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gap tracking keeps the density along a homotopy") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 19));
  auto B = MagneticCocycle::from_flux(0.25);
  auto H0 = nn_hofstadter(s, 1.0, B, 1.01, {5.0});
  auto H1 = nn_hofstadter(s, 1.3, B, 1.01, {5.0});
  auto sd = spectral_gap(H0, -2.0);
  auto tr = track_gap(H0, H1, *sd.gap, 3);
  CHECK(tr.open);
  REQUIRE(tr.density.size() == 4);
  for (double n : tr.density) CHECK(n == doctest::Approx(tr.density.front()).epsilon(1e-3));
  REQUIRE(tr.end);
  CHECK(tr.end->gap->lo == doctest::Approx(1.3 * sd.gap->lo).epsilon(1e-9));
  auto other = generate_periodic(2, 1.0, Box::cube(2, 0, 18));
  CHECK_THROWS_AS(track_gap(H0, nn_hofstadter(other, 1.0, B, 1.01), *sd.gap, 2), InvalidArgument);
}

TEST_CASE("symmetries of the one-dimensional models") {
  auto chain = generate_periodic(1, 1.0, Box::cube(1, 0, 39));
  CHECK(symmetry_defect(ssh_model(chain, 0.4, 1.0), ssh_chirality()) < 1e-14);
  CHECK(symmetry_defect(kitaev_model(chain, 0.5, 1.0, 1.0), kitaev_particle_hole()) < 1e-14);
  // The open topological chain has edge zero modes; the ring is gapped.
  CHECK_THROWS_AS(fermi_unitary(ssh_model(chain, 0.4, 1.0), ssh_chirality()), NumericalError);
  auto U = fermi_unitary(ssh_model(chain, 0.4, 1.0, {std::nullopt, make_vec({40.0})}), ssh_chirality());
  CHECK(unitarity_defect(U.matrix) < 1e-10);
}

TEST_CASE("qwz closes its gap at m = 2") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 7));
  const ModelOptions torus{std::nullopt, make_vec({8, 8})};
  auto gapped = eigh(qwz_model(s, 1.0, MagneticCocycle(2), torus).matrix, false).values;
  auto critical = eigh(qwz_model(s, 2.0, MagneticCocycle(2), torus).matrix, false).values;
  CHECK(gapped.cwiseAbs().minCoeff() > 0.5);
  CHECK(critical.cwiseAbs().minCoeff() < 1e-10);
}

TEST_CASE("smooth gap function") {
  auto f = smooth_gap_function(Gap{-1, 1});
  CHECK(f(-2) == 0.0);
  CHECK(f(0) == doctest::Approx(0.5));
  CHECK(f(2) == 1.0);
  CHECK_THROWS_AS(smooth_gap_function(Gap{1, 1}), InvalidArgument);
}

TEST_CASE("gapless operators have no Fermi projection") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 9));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle(2), 1.01, {2.0});
  auto sd = spectral_gap(H, 0.0, {0.2});
  CHECK(sd.gapless);
  CHECK_THROWS_AS(occupied_basis(sd), GaplessError);
}

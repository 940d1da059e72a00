#include "aperio/invariants.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace aperio;

namespace {

constexpr double pi = std::numbers::pi;

OperatorSample shift_operator(int k, int n = 200) {
  auto z = generate_periodic(1, 1.0, Box::cube(1, -n, n));
  return represent(z, shift_kernel(k), MagneticCocycle(1), {20.0});
}

InvariantReport qwz_chern(double m) {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 19));
  auto H = qwz_model(s, m, MagneticCocycle(2), {5.0});
  auto sd = spectral_gap(H, 0.0);
  return chern_even(fermi_projection(sd, H), {0, 1});
}

}  // namespace

TEST_CASE("pairing constants") {
  CHECK(std::abs(chern_constant(2) - cd(0, -2 * pi)) < 1e-14);
  CHECK(std::abs(chern_constant(4) - cd(-2 * pi * pi, 0)) < 1e-12);
  CHECK(std::abs(odd_constant(1) - cd(2, 0)) < 1e-14);
  CHECK(std::abs(odd_constant(3) - cd(0, 2 * pi / 3)) < 1e-14);
  CHECK_THROWS(chern_constant(3));
}

TEST_CASE("shift winding: raw 2k, index -k") {
  for (int k = 1; k <= 3; ++k) {
    auto rep = winding_odd(shift_operator(k), {0});
    CHECK(rep.raw.real() == doctest::Approx(2.0 * k).epsilon(1e-9));
    REQUIRE(rep.oracle);
    CHECK(*rep.oracle == -k);
    CHECK(*rep.ratio == doctest::Approx(-2.0));
  }
}

TEST_CASE("qwz chern numbers across the phase diagram") {
  auto a = qwz_chern(1.0), b = qwz_chern(3.0), c = qwz_chern(5.0);
  CHECK(std::abs(a.rounded) == 1);
  CHECK(b.rounded == -a.rounded);
  CHECK(c.rounded == 0);
  for (const auto* r : {&a, &b, &c}) CHECK(r->within_tolerance);
}

TEST_CASE("hofstadter chern matches the Fredholm index") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, 0, 23));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle::from_flux(0.25), 1.01, {6.0});
  auto sd = spectral_gap(H, -2.0);
  auto P = fermi_projection(sd, H);
  auto c = chern_even(P, {0, 1});
  auto f = fredholm_even(P, make_vec({11.31, 11.17}));
  CHECK(std::abs(c.rounded) == 1);
  CHECK(f.index == c.rounded);
}

TEST_CASE("kitaev Z2 index follows the Pfaffian sign") {
  // Pfaffian oracle: sign Pf(H(0)) Pf(H(pi)) = sign((mu - 2t)(mu + 2t)), so the
  // chain is topological exactly when |mu| < 2|t|.
  auto chain = generate_periodic(1, 1.0, Box::cube(1, 0, 59));
  for (auto [mu, t] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {1.5, 1.0}, {3.0, 1.0}, {-2.5, 1.0}}) {
    const int oracle = (mu - 2 * t) * (mu + 2 * t) < 0 ? 1 : 0;
    auto H = kitaev_model(chain, mu, t, 1.0);
    Z2Options o;
    Box left = H.window;
    left.hi(0) = H.window.center()(0);
    o.region = left;
    auto z = z2_index(H, kitaev_particle_hole(), o);
    CHECK(z.value == oracle);
    CHECK(z.symmetry_defect < 1e-12);
  }
}

TEST_CASE("sobolev norm of the shift is 1 + k") {
  for (int k = 1; k <= 3; ++k) {
    CHECK(sobolev_norm(shift_operator(k, 100), 1, 1) == doctest::Approx(1.0 + k).epsilon(1e-10));
    CHECK(sobolev_norm(shift_operator(k, 100), 1, 2) == doctest::Approx(1.0 + k).epsilon(1e-10));
  }
  CHECK(sobolev_norm(shift_operator(1, 100), 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("zeta residue and sphere volumes") {
  CHECK(sphere_volume(1) == doctest::Approx(2.0));
  CHECK(sphere_volume(2) == doctest::Approx(2 * pi));
  CHECK(sphere_volume(3) == doctest::Approx(4 * pi));
  auto r = residue_check(generate_periodic(1, 1.0, Box::cube(1, -2000, 2000)), {1.2, 1.4, 1.6, 1.8, 2.0});
  CHECK(r.relative_error < 0.05);
}

TEST_CASE("off-lattice cut avoids sites") {
  auto U = shift_operator(1, 10);
  const double c = off_lattice_cut(U, 0, 0.0);
  CHECK(std::abs(c - std::round(c)) == doctest::Approx(0.5));
}

#include "aperio/error.hpp"
#include "aperio/groupoid.hpp"
#include "aperio/hamiltonians.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace aperio;

TEST_CASE("magnetic cocycle identities") {
  auto B = MagneticCocycle::from_flux(0.3);
  CHECK(B.B()(0, 1) == doctest::Approx(std::numbers::pi * 0.3));
  CHECK(B.skew_defect() < 1e-15);
  auto triples = random_triples(2, 200, 5.0, 7);
  CHECK(check_2cocycle(B, triples) < 1e-12);
  std::vector<Vec> xs;
  for (const auto& t : triples) xs.push_back(t[0]);
  CHECK(normalization_defect(B, xs) < 1e-12);
  Eigen::MatrixXd bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(MagneticCocycle{bad}, InvalidArgument);
}

TEST_CASE("plaquette phase is 2 pi phi") {
  const double phi = 0.2;
  auto s = generate_periodic(2, 1.0, Box::cube(2, -3, 3));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle::from_flux(phi), 1.01);
  auto at = [&](double x, double y) { return static_cast<Eigen::Index>(*s.find(make_vec({x, y}))); };
  const auto a = at(0, 0), b = at(1, 0), c = at(1, 1), d = at(0, 1);
  cd loop = H.matrix(a, b) * H.matrix(b, c) * H.matrix(c, d) * H.matrix(d, a);
  CHECK(std::abs(loop) == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(std::arg(loop)) - 2 * std::numbers::pi * phi) < 1e-12);
}

TEST_CASE("represent, convolve and adjoint") {
  auto s = generate_cut_and_project(CutProjectScheme::ammann_beenker, Box::cube(2, -4, 4));
  auto B = MagneticCocycle::from_flux(0.25);
  auto I = represent(s, identity_kernel(), B);
  CHECK((I.matrix - CMat::Identity(I.dim(), I.dim())).cwiseAbs().maxCoeff() < 1e-14);
  auto H = exp_hopping(s, 2.0, B, 3.0);
  CHECK(hermitian_defect(H.matrix) < 1e-12);
  CHECK((adjoint(H).matrix - H.matrix).cwiseAbs().maxCoeff() < 1e-12);
  auto HH = convolve(H, H);
  CHECK((HH.matrix - H.matrix * H.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("derivations obey the Leibniz rule") {
  auto s = generate_amorphous(2, 0.4, 0.9, Box::cube(2, -4, 4), 2);
  auto H = exp_hopping(s, 2.0, MagneticCocycle::from_flux(0.1), 2.5);
  for (int j = 0; j < 2; ++j) {
    CMat dH = derivation_matrix(H, j);
    CMat lhs = derivation_matrix(H.with_matrix(H.matrix * H.matrix), j);
    CHECK((lhs - dH * H.matrix - H.matrix * dH).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(hermitian_defect(cd(0, 1) * dH) < 1e-12);
  }
}

TEST_CASE("magnetic translations intertwine the representation") {
  auto s = generate_periodic(2, 1.0, Box::cube(2, -5, 5));
  auto B = MagneticCocycle::from_flux(0.25);
  CHECK(covariance_defect(s, nn_kernel(1.0, 1.01), B, make_vec({2, -1})) < 1e-10);
  CHECK(covariance_defect(s, exp_kernel(2.0, 3.0), B, make_vec({1, 3})) < 1e-10);
  // Translation reorders tied coordinates; sites are matched by position.
  auto ab = generate_cut_and_project(CutProjectScheme::ammann_beenker, Box::cube(2, -6, 6));
  const Vec a = ab[*ab.find(make_vec({1 / std::numbers::sqrt2, -1 - 1 / std::numbers::sqrt2}))];
  CHECK(covariance_defect(ab, nn_kernel(1.0, 2 * ab.R()), B, a) < 1e-10);
}

TEST_CASE("frames form a partition of unity") {
  auto s = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -40, 40));
  auto frame = s_cover_frame(s, 0.4 * s.r(), 0.1);
  auto H = exp_hopping(s, 2.0, MagneticCocycle(1), 3.0);
  auto rep = check_frame(frame, s, 3.0, &H);
  CHECK(rep.partition_defect < 1e-10);
  CHECK(rep.injective);
  CHECK(rep.reconstruction_residual < 1e-10);
  CHECK(frame_reconstruction_residual(frame, H, H.range + frame.eps()) < 1e-10);
}

#include "aperio/cuntz_pimsner.hpp"

#include <doctest.h>

#include <cmath>

using namespace aperio;

TEST_CASE("ordering of the fibonacci chain") {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -60, 60));
  auto ol = order_lattice(fib);
  CHECK(ol.site(0) == 0.0);
  CHECK(ol.min_gap() < ol.max_gap());
  for (long n = ol.n_min() + 1; n <= ol.n_max(); ++n) {
    const double step = ol.site(n) - ol.site(n - 1);
    CHECK(step >= ol.min_gap() - 1e-12);
    CHECK(step <= ol.max_gap() + 1e-12);
    CHECK(degree(ol, ol.site(n)) == n);
    CHECK(ol.index_of(ol.site(n)) == n);
  }
}

TEST_CASE("factorization into elementary steps is unique") {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -60, 60));
  auto ol = order_lattice(fib);
  for (long n : {-7L, -1L, 1L, 5L, 12L}) {
    auto steps = factorize(ol, ol.site(n));
    CHECK(static_cast<long>(steps.size()) == std::labs(n));
    double sum = 0;
    for (double s : steps) sum += s;
    CHECK(sum == doctest::Approx(ol.site(n)));
    CHECK(count_factorizations(ol, ol.site(n)) == 1);
  }
  // On Z the steps are all 1.
  auto z = order_lattice(generate_periodic(1, 1.0, Box::cube(1, -10, 10)));
  CHECK(factorize(z, 4.0) == std::vector<double>(4, 1.0));
}

TEST_CASE("degree is additive") {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -80, 80));
  auto rep = check_degree_additivity(fib, 40);
  CHECK(rep.ok());
  CHECK(rep.bases > 0);
}

TEST_CASE("bimodule inner products") {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -60, 60));
  auto ol = order_lattice(fib);
  StepKernel f1{[](double t, double x) { return cd(std::cos(t), x); }, ol.min_gap(), ol.max_gap()};
  StepKernel f2{[](double t, double x) { return cd(1 + 0.01 * t, -x); }, ol.min_gap(), ol.max_gap()};
  auto rep = check_bimodule(ol, f1, f2, constant_kernel(ol, cd(0.5, 0.25)));
  CHECK(rep.points > 0);
  CHECK(rep.imprimitivity_defect < 1e-12);
  CHECK(rep.right_adjoint_defect < 1e-12);
  CHECK(rep.left_adjoint_defect < 1e-12);
  auto right = right_inner(ol, f1, f1);
  for (const auto& v : right.values) CHECK(v.real() >= -1e-14);
}

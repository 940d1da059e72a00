#include "aperio/kasparov.hpp"

#include <doctest.h>

#include <memory>

using namespace aperio;

namespace {

struct Setup {
  std::shared_ptr<const PatternTree> tree;
  Frame frame;
  FiberSpace fs;
};

Setup make_setup(const DeloneSet& set, int depth, double eps) {
  auto tree = std::make_shared<const PatternTree>(build_tree(set, depth));
  Frame fr = s_cover_frame(set, eps, default_pitch(set.dimension(), eps));
  const double rad = depth * tree->R + 2 * fr.support();
  auto pair = choice_pair(*tree, 3, {rad});
  auto fs = build_fiber_space(set, tree, pair, {rad});
  return {tree, fr, std::move(fs)};
}

}  // namespace

TEST_CASE("clifford generators") {
  for (int d : {1, 2, 3}) {
    CMat G = clifford_grading(d);
    const auto n = G.rows();
    CHECK(n == (1 << d));
    for (int j = 0; j < d; ++j) {
      CMat gj = clifford_generator(d, j);
      CHECK((gj * G + G * gj).cwiseAbs().maxCoeff() < 1e-15);
      for (int k = 0; k < d; ++k) {
        CMat gk = clifford_generator(d, k);
        CMat anti = gj * gk + gk * gj;
        CMat expect = j == k ? CMat(2 * CMat::Identity(n, n)) : CMat(CMat::Zero(n, n));
        CHECK((anti - expect).cwiseAbs().maxCoeff() < 1e-15);
      }
    }
  }
}

TEST_CASE("block operator algebra agrees with dense matrices") {
  BlockOperator A{{CMat::Random(3, 3), CMat::Random(2, 2)}};
  BlockOperator B{{CMat::Random(3, 3), CMat::Random(2, 2)}};
  CHECK(A.dim() == 5);
  CHECK(((A * B).dense() - A.dense() * B.dense()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(((A + B).dense() - (A.dense() + B.dense())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((A.adjoint().dense() - A.dense().adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("anticommutator bound on a jittered square lattice") {
  auto jit = perturb(generate_periodic(2, 1.0, Box::cube(2, -7, 7)), 0.02, 3);
  const double eps = 0.4 * jit.r();
  auto st = make_setup(jit, 1, eps);
  auto X = operator_X(st.fs);
  auto T = operator_T(st.fs, st.frame, Zeta::log);
  auto rep = anticommutator_estimate(st.fs, X, T, 100, 1);
  CHECK(rep.trials == 100);
  CHECK(rep.max_displacement > 0);
  CHECK(rep.max_ratio > 0);
  CHECK(rep.max_ratio <= 2 * eps);
}

TEST_CASE("product operator spectrum is symmetric") {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -80, 80));
  auto st = make_setup(fib, 2, 0.1);
  auto X = operator_X(st.fs);
  auto T = operator_T(st.fs, st.frame, Zeta::log);
  auto kappa = operator_kappa(st.fs);
  CHECK(((X * kappa + kappa * X).max_abs()) < 1e-14);
  CHECK(((T * kappa).dense() - (kappa * T).dense()).cwiseAbs().maxCoeff() < 1e-14);
  auto ps = product_spectrum(st.fs, X, T);
  CHECK(ps.eigenvalues.size() == st.fs.dim);
  CHECK(ps.hermitian_defect < 1e-12);
  CHECK(ps.symmetry_defect < 1e-10);
}

TEST_CASE("commutator scans separate log and exp growth") {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -150, 150));
  auto t3 = std::make_shared<const PatternTree>(build_tree(fib, 3));
  SiteFunction f = cylinder_indicator(*t3, t3->levels[3][0]);
  auto lg = log_commutator_scan(fib, {2, 3, 4, 5}, f, 3 * t3->R, 0.25, Zeta::log);
  auto ex = log_commutator_scan(fib, {2, 3, 4, 5}, f, 3 * t3->R, 0.25, Zeta::exp);
  CHECK(lg.bounded);
  CHECK(ex.growth > 3);
}

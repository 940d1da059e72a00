// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "aperio/aperio.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace aperio;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DeloneSet square(double lo, double hi) { return generate_periodic(2, 1.0, Box::cube(2, lo, hi)); }

const Vec& fredholm_origin() {
  static const Vec o = make_vec({19.31, 19.17});
  return o;
}

struct GapValue {
  Gap gap;
  long chern = 0;
  double deviation = 0;
  long fredholm = 0;
  double seconds = 0;
};

GapValue pair_at(const OperatorSample& H, const SpectralData& sd) {
  auto t0 = std::chrono::steady_clock::now();
  GapValue g;
  g.gap = *sd.gap;
  auto P = fermi_projection(sd, H);
  auto c = chern_even(P, {0, 1});
  CMat V = occupied_basis(sd);
  FredholmOptions fo;
  fo.range_basis = &V;
  auto f = fredholm_even(P, fredholm_origin(), fo);
  g.chern = c.rounded;
  g.deviation = c.deviation;
  g.fredholm = f.index;
  g.seconds = seconds_since(t0);
  return g;
}

std::vector<GapValue> all_gaps(const OperatorSample& H) {
  auto sd = spectral_gap(H, 0.0);
  std::vector<GapValue> out;
  for (const auto& g : sd.gaps) out.push_back(pair_at(H, select_gap(sd, g.mid())));
  return out;
}

OperatorSample hofstadter(const DeloneSet& set, double flux, double nn) {
  return nn_hofstadter(set, 1.0, MagneticCocycle::from_flux(flux), nn, {6.0});
}

// Chern-Fredholm agreement on 40x40, fluxes 1/4 and 1/6.
Outcome c1() {
  std::ostringstream os;
  bool ok = true;
  std::size_t gaps = 0;
  double worst_dev = 0, worst_t = 0;
  for (double flux : {0.25, 1.0 / 6}) {
    auto t0 = std::chrono::steady_clock::now();
    auto H = hofstadter(square(0, 39), flux, 1.01);
    auto sd = spectral_gap(H, 0.0);
    const double shared = seconds_since(t0);
    os << "flux " << flux << ":";
    if (sd.gaps.empty()) ok = false;
    for (const auto& g : sd.gaps) {
      auto v = pair_at(H, select_gap(sd, g.mid()));
      ++gaps;
      worst_dev = std::max(worst_dev, v.deviation);
      worst_t = std::max(worst_t, v.seconds + shared);
      ok = ok && v.chern == v.fredholm && v.deviation < 0.05;
      os << " (" << v.chern << "," << v.fredholm << ")";
    }
    os << "; ";
  }
  ok = ok && worst_t < 120;
  os << gaps << " gaps, max |raw-rounded| " << worst_dev << ", max s/gap " << worst_t;
  return {ok, os.str()};
}

// Perturbation and exp-hopping robustness.
Outcome c2() {
  std::ostringstream os;
  bool ok = true;
  std::size_t realizations = 0, closed = 0;
  for (double flux : {0.25, 1.0 / 6}) {
    auto base = square(0, 39);
    auto H = hofstadter(base, flux, 1.01);
    auto sd = spectral_gap(H, 0.0);
    std::vector<long> ref;
    for (const auto& g : sd.gaps) ref.push_back(pair_at(H, select_gap(sd, g.mid())).chern);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto Hp = hofstadter(perturb(base, 0.05, seed), flux, 1.2);
      auto sp = spectral_gap(Hp, 0.0);
      for (std::size_t k = 0; k < sd.gaps.size(); ++k) {
        auto s2 = select_gap(sp, sd.gaps[k].mid());
        if (!s2.gap || !(s2.gap->lo < sd.gaps[k].hi && s2.gap->hi > sd.gaps[k].lo)) {
          ok = false;
          os << "flux " << flux << " seed " << seed << " lost gap " << k << "; ";
          continue;
        }
        auto v = pair_at(Hp, s2);
        ++realizations;
        if (v.chern != ref[k] || v.fredholm != ref[k]) {
          ok = false;
          os << "flux " << flux << " seed " << seed << " gap " << k << " gave (" << v.chern << "," << v.fredholm
             << ") expected " << ref[k] << "; ";
        }
      }
    }
    auto He = exp_hopping(base, 2.0, MagneticCocycle::from_flux(flux), std::nullopt, {6.0});
    for (std::size_t k = 0; k < sd.gaps.size(); ++k) {
      auto tr = track_gap(H, He, sd.gaps[k], 4);
      if (!tr.open) {
        ++closed;
        continue;
      }
      auto v = pair_at(He, *tr.end);
      ++realizations;
      if (v.chern != ref[k] || v.fredholm != ref[k]) {
        ok = false;
        os << "flux " << flux << " exp gap " << k << " gave (" << v.chern << "," << v.fredholm << ") expected "
           << ref[k] << "; ";
      }
    }
    // Gaps of the exp model itself: formula and index agree wherever it is gapped.
    for (const auto& v : all_gaps(He)) {
      ++realizations;
      if (v.chern != v.fredholm) {
        ok = false;
        os << "flux " << flux << " exp gap [" << v.gap.lo << "," << v.gap.hi << "] chern " << v.chern << " fredholm "
           << v.fredholm << "; ";
      }
    }
  }
  os << realizations << " realizations agree, " << closed << " tracked gaps closed along the exp homotopy";
  return {ok, os.str()};
}

// Even bulk-boundary on a 40x60 sample cut at y = 19.5.
Outcome c3() {
  auto set = generate_periodic(2, 1.0, Box{make_vec({0, 0}), make_vec({39, 59})});
  auto H = hofstadter(set, 0.25, 1.01);
  BulkBoundaryOptions o;
  o.dir = 1;
  o.cut = 19.5;
  o.boundary.slab_width = 4;
  auto bb = bulk_boundary_even(H, -2.0, o);
  const double single = bb.boundary_value;
  const double doubled = -bb.boundary->details["doubled"]["index_normalized"].get<double>();
  const auto retained = bb.boundary->details.value("boundary_sites", 0);
  std::ostringstream os;
  os << "bulk " << bb.bulk.raw.real() << ", boundary " << single << ", doubled slab " << doubled << ", |sum| "
     << bb.difference << ", retained " << bb.details.value("retained_sites", 0) << " sites, slab sites " << retained;
  const bool ok = bb.agree && bb.difference < 0.1 && std::abs(doubled - single) <= 0.05 &&
                  bb.details.value("retained_sites", 0) >= 1600;
  return {ok, os.str()};
}

// Odd bulk-boundary for SSH.
Outcome c4() {
  std::ostringstream os;
  bool ok = true;
  for (auto [v, w, expect] : std::vector<std::tuple<double, double, long>>{{0.4, 1.0, 1}, {1.0, 0.4, 0}}) {
    auto ring = generate_periodic(1, 1.0, Box::cube(1, 0, 59));
    auto Hr = ssh_model(ring, v, w, {std::nullopt, make_vec({60.0})});
    auto Ho = ssh_model(ring, v, w);
    auto bb = bulk_boundary_odd(Hr, Ho, ssh_chirality(), -0.5);
    const long oracle = bb.bulk.oracle ? std::labs(*bb.bulk.oracle) : -1;
    const long modes = bb.zero_modes ? bb.zero_modes->per_boundary : -1;
    ok = ok && bb.agree && oracle == modes && oracle == expect;
    os << "v=" << v << " w=" << w << ": |index| " << oracle << ", zero modes per boundary " << modes << "; ";
  }
  return {ok, os.str()};
}

// Odd constant bookkeeping for shifts.
Outcome c5() {
  std::ostringstream os;
  bool ok = true;
  std::set<long> ratios;
  for (int k = 1; k <= 3; ++k) {
    auto ring = generate_periodic(1, 1.0, Box::cube(1, 0, 59));
    auto U = represent(ring, shift_kernel(k), MagneticCocycle(1), {std::nullopt, make_vec({60.0})});
    auto w = winding_odd(U, {0});
    const double ratio = w.ratio ? *w.ratio : 0;
    ratios.insert(std::lround(ratio));
    ok = ok && w.oracle && *w.oracle == -k && std::abs(w.raw.real() - 2.0 * k) < 1e-8 && std::abs(ratio + 2) < 1e-8;
    os << "k=" << k << " raw " << w.raw.real() << " index " << (w.oracle ? *w.oracle : 0) << " ratio " << ratio << "; ";
  }
  ok = ok && ratios.size() == 1 && *ratios.begin() == -2;
  return {ok, os.str()};
}

// Algebraic identities across generators x models.
Outcome c6() {
  struct Gen {
    std::string name;
    DeloneSet set;
  };
  const Box win = Box::cube(2, -6, 6);
  std::vector<Gen> gens{{"periodic", generate_periodic(2, 1.0, win)},
                        {"ammann-beenker", generate_cut_and_project(CutProjectScheme::ammann_beenker, win)},
                        {"amorphous", generate_amorphous(2, 0.4, 0.9, win, 11)},
                        {"perturbed", perturb(generate_periodic(2, 1.0, win), 0.05, 5)}};
  const auto B = MagneticCocycle::from_flux(0.25);
  using Builder = std::function<OperatorSample(const DeloneSet&)>;
  std::vector<std::pair<std::string, Builder>> models{
      {"nn", [&](const DeloneSet& s) { return nn_hofstadter(s, 1.0, B, 2 * s.R(), {}); }},
      {"exp", [&](const DeloneSet& s) { return exp_hopping(s, 2.0, B, 4.0, {}); }},
      {"qwz", [&](const DeloneSet& s) { return qwz_model(s, 1.0, B, {}); }}};
  double worst[5] = {0, 0, 0, 0, 0};
  std::size_t combos = 0;
  const Vec target = make_vec({0.7, -1.3});
  const Frame frame(2, 0.3, default_pitch(2, 0.3));
  for (const auto& g : gens)
    for (const auto& [mname, build] : models) {
      OperatorSample H = build(g.set);
      std::vector<Triple> triples;
      const auto& pts = g.set.points();
      for (std::size_t i = 0; i + 2 < pts.size(); i += 7) triples.push_back({pts[i], pts[i + 1], pts[i + 2]});
      worst[0] = std::max(worst[0], check_2cocycle(B, triples));
      worst[1] = std::max(worst[1], hermitian_defect(H.matrix));
      for (int j = 0; j < 2; ++j) {
        CMat HH = H.matrix * H.matrix;
        CMat dH = derivation_matrix(H, j);
        CMat lhs = derivation_matrix(H.with_matrix(HH), j);
        worst[2] = std::max(worst[2], (lhs - dH * H.matrix - H.matrix * dH).cwiseAbs().maxCoeff());
      }
      worst[3] = std::max(worst[3], frame_reconstruction_residual(frame, H, H.range + frame.eps()));
      // Covariance is defined for translations by points of the set.
      Vec a = pts.front();
      for (const auto& p : pts)
        if ((p - target).norm() < (a - target).norm()) a = p;
      worst[4] = std::max(worst[4], covariance_defect(H, build(translate(g.set, a)), B, a));
      ++combos;
    }
  std::ostringstream os;
  os << combos << " combinations; cocycle " << worst[0] << ", hermiticity " << worst[1] << ", leibniz " << worst[2]
     << ", frame " << worst[3] << ", covariance " << worst[4];
  bool ok = combos >= 12;
  for (double w : worst) ok = ok && w < 1e-10;
  return {ok, os.str()};
}

// Zeta residue for Z^2 and Z.
Outcome c7() {
  auto z2 = residue_check(generate_periodic(2, 1.0, Box::cube(2, -60, 60)), {2.2, 2.4, 2.6, 2.8, 3.0});
  auto z1 = residue_check(generate_periodic(1, 1.0, Box::cube(1, -2000, 2000)), {1.2, 1.4, 1.6, 1.8, 2.0});
  std::ostringstream os;
  os << "d=2 " << z2.extrapolated << " vs " << z2.target << " (" << 100 * z2.relative_error << "%), d=1 "
     << z1.extrapolated << " vs " << z1.target << " (" << 100 * z1.relative_error << "%)";
  return {z2.relative_error < 0.05 && z1.relative_error < 0.05, os.str()};
}

// Pattern trees.
Outcome c8() {
  std::ostringstream os;
  bool ok = true;
  for (int d : {1, 2, 3}) {
    auto set = generate_periodic(d, 1.0, Box::cube(d, -6, 6));
    auto tree = build_tree(set, 3);
    for (int n = 0; n <= 3; ++n) ok = ok && tree.level_size(n) == 1;
  }
  os << "Z^1..Z^3 one vertex per level; ";
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -300, 300));
  auto tree = build_tree(fib, 6);
  os << "Fibonacci level sizes";
  for (int n = 0; n <= 6; ++n) {
    const std::size_t oracle = enumerate_patches(fib, n * tree.R).size();
    ok = ok && tree.level_size(n) == oracle;
    os << " " << tree.level_size(n) << "/" << oracle;
  }
  // D^2 has eigenvalue zeta_n^2 with multiplicity 2 |level n|; zeta = exp keeps the levels apart.
  auto D = pb_operator(tree, Zeta::exp);
  auto e = eigh(D.matrix, false);
  std::map<long, std::size_t> mult;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) > 0) ++mult[std::lround(std::log(e.values(i)) / tree.R)];
  bool mult_ok = mult.size() == 7;
  for (int n = 0; n <= 6; ++n) mult_ok = mult_ok && mult[n] == tree.level_size(n);
  ok = ok && mult_ok;
  os << "; PB multiplicities " << (mult_ok ? "match" : "differ");
  Rng rng(99);
  std::vector<std::size_t> centers = eligible_centers(fib, 6 * tree.R);
  std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
  std::size_t violations = 0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t a = centers[pick(rng)], b = centers[pick(rng)], c = centers[pick(rng)];
    double ab = ultrametric(tree, a, b).value, bc = ultrametric(tree, b, c).value, ac = ultrametric(tree, a, c).value;
    if (ac > std::max(ab, bc) + 1e-15) ++violations;
  }
  ok = ok && violations == 0;
  os << "; strong triangle violations " << violations << "/1000";
  return {ok, os.str()};
}

// Kasparov product estimates.
Outcome c9() {
  std::ostringstream os;
  bool ok = true;
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -150, 150));
  auto ab = generate_cut_and_project(CutProjectScheme::ammann_beenker, Box::cube(2, -8, 8));
  auto jit = perturb(generate_periodic(2, 1.0, Box::cube(2, -7, 7)), 0.02, 3);
  struct Case {
    std::string name;
    const DeloneSet* set;
    int depth;
    std::vector<double> eps;
  };
  std::vector<Case> cases{{"fibonacci", &fib, 4, {0.1, 0.2, 0.4 * fib.r()}},
                          {"ammann-beenker", &ab, 2, {0.1 * ab.r(), 0.2 * ab.r(), 0.4 * ab.r()}},
                          {"jittered Z^2", &jit, 1, {0.1 * jit.r(), 0.2 * jit.r(), 0.4 * jit.r()}}};
  double worst_rel = 0;
  for (const auto& c : cases) {
    auto tree = std::make_shared<const PatternTree>(build_tree(*c.set, c.depth));
    os << c.name << ":";
    for (double eps : c.eps) {
      Frame fr = s_cover_frame(*c.set, eps, default_pitch(c.set->dimension(), eps));
      const double rad = c.depth * tree->R + 2 * fr.support();
      auto pair = choice_pair(*tree, 3, {rad});
      auto fs = build_fiber_space(*c.set, tree, pair, {rad});
      auto X = operator_X(fs);
      auto T = operator_T(fs, fr, Zeta::log);
      double mx = 0;
      std::size_t vectors = 0;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto rep = anticommutator_estimate(fs, X, T, 100, seed);
        mx = std::max(mx, rep.max_ratio);
        vectors += rep.trials;
      }
      ok = ok && mx <= 2 * eps && vectors == 500;
      worst_rel = std::max(worst_rel, mx / (2 * eps));
      os << " " << mx;
    }
    os << ";";
  }
  os << " worst ratio/(2 eps) " << worst_rel;
  // Norm scans for the indicator of a level-3 cylinder.
  auto t3 = std::make_shared<const PatternTree>(build_tree(fib, 3));
  SiteFunction f = cylinder_indicator(*t3, t3->levels[3][0]);
  auto lg = log_commutator_scan(fib, {2, 3, 4, 5}, f, 3 * t3->R, 0.25, Zeta::log);
  auto ex = log_commutator_scan(fib, {2, 3, 4, 5}, f, 3 * t3->R, 0.25, Zeta::exp);
  os << "; log scan";
  for (const auto& r : lg.rows) os << " " << r.norm;
  os << " (bounded " << lg.bounded << "), exp growth " << ex.growth;
  ok = ok && lg.bounded && ex.growth > 3;
  return {ok, os.str()};
}

// d = 1 structure on the Fibonacci chain.
Outcome c10() {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -150, 150));
  auto ol = order_lattice(fib);
  auto add = check_degree_additivity(fib, 200);
  std::size_t unique = 0, targets = 0;
  for (long n = -25; n <= 25; ++n) {
    if (n == 0) continue;
    const double x = ol.site(n);
    auto steps = factorize(ol, x);
    double sum = 0;
    for (double s : steps) sum += s;
    ++targets;
    if (count_factorizations(ol, x) == 1 && std::abs(sum - x) < 1e-9 &&
        static_cast<long>(steps.size()) == std::labs(n))
      ++unique;
  }
  StepKernel f1{[](double t, double x) { return cd(std::cos(t), x); }, ol.min_gap(), ol.max_gap()};
  StepKernel f2{[](double t, double x) { return cd(1 + 0.01 * t, -x); }, ol.min_gap(), ol.max_gap()};
  StepKernel f3{[](double t, double x) { return cd(std::sin(3 * t), 0.5); }, ol.min_gap(), ol.max_gap()};
  auto bm = check_bimodule(ol, f1, f2, f3);
  std::ostringstream os;
  os << "additivity " << add.pairs - add.failures << "/" << add.pairs << " composable pairs; unique factorizations "
     << unique << "/" << targets << "; imprimitivity defect " << bm.imprimitivity_defect;
  return {add.ok() && add.pairs > 0 && unique == targets && targets == 50 && bm.imprimitivity_defect < 1e-12,
          os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 chern-fredholm agreement", c1}, {"C2 aperiodicity robustness", c2},
      {"C3 bulk-boundary even", c3},        {"C4 bulk-boundary odd", c4},
      {"C5 odd-constant bookkeeping", c5},  {"C6 algebraic identities", c6},
      {"C7 zeta residue", c7},              {"C8 pattern tree", c8},
      {"C9 product-operator estimates", c9}, {"C10 one-dimensional structure", c10}};
  // Optional arguments select criteria by label, e.g. `aperio_acceptance C2 C6`.
  std::set<std::string> only(argv + 1, argv + argc);
  int failures = 0, ran = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name.substr(0, name.find(' ')))) continue;
    ++ran;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}

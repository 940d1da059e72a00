#include "aperio/aperio.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace aperio;

namespace {

DeloneSet square(int n) { return generate_periodic(2, 1.0, Box::cube(2, 0, n - 1)); }

void BM_GeneratePeriodic(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(square(static_cast<int>(state.range(0))).size());
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_GeneratePeriodic)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_AmmannBeenker(benchmark::State& state) {
  const double h = static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(generate_cut_and_project(CutProjectScheme::ammann_beenker, Box::cube(2, -h, h)).size());
}
BENCHMARK(BM_AmmannBeenker)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_VerifyDelone(benchmark::State& state) {
  auto s = generate_cut_and_project(CutProjectScheme::ammann_beenker, Box::cube(2, -state.range(0), state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(verify_delone(s).ok());
}
BENCHMARK(BM_VerifyDelone)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PatternTree(benchmark::State& state) {
  auto s = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -300, 300));
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(s, static_cast<int>(state.range(0))).vertices.size());
}
BENCHMARK(BM_PatternTree)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_Hofstadter(benchmark::State& state) {
  auto s = square(static_cast<int>(state.range(0)));
  auto B = MagneticCocycle::from_flux(0.25);
  for (auto _ : state) benchmark::DoNotOptimize(nn_hofstadter(s, 1.0, B, 1.01).matrix.data());
}
BENCHMARK(BM_Hofstadter)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Eigh(benchmark::State& state) {
  auto s = square(static_cast<int>(state.range(0)));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle::from_flux(0.25), 1.01);
  for (auto _ : state) benchmark::DoNotOptimize(eigh(H.matrix).values.data());
  state.SetComplexityN(H.dim());
}
BENCHMARK(BM_Eigh)->Arg(12)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

void BM_ChernEven(benchmark::State& state) {
  auto s = square(static_cast<int>(state.range(0)));
  auto H = nn_hofstadter(s, 1.0, MagneticCocycle::from_flux(0.25), 1.01, {state.range(0) / 4.0});
  auto P = fermi_projection(spectral_gap(H, -2.0), H);
  for (auto _ : state) benchmark::DoNotOptimize(chern_even(P, {0, 1}).raw);
}
BENCHMARK(BM_ChernEven)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_FredholmEven(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto H = nn_hofstadter(square(n), 1.0, MagneticCocycle::from_flux(0.25), 1.01, {n / 4.0});
  auto sd = spectral_gap(H, -2.0);
  auto P = fermi_projection(sd, H);
  CMat V = occupied_basis(sd);
  FredholmOptions o;
  o.range_basis = &V;
  const Vec origin = make_vec({n / 2 - 0.69, n / 2 - 0.83});
  for (auto _ : state) benchmark::DoNotOptimize(fredholm_even(P, origin, o).index);
}
BENCHMARK(BM_FredholmEven)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_Anticommutator(benchmark::State& state) {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -150, 150));
  const int depth = static_cast<int>(state.range(0));
  auto tree = std::make_shared<const PatternTree>(build_tree(fib, depth));
  Frame fr = s_cover_frame(fib, 0.1, default_pitch(1, 0.1));
  const double rad = depth * tree->R + 2 * fr.support();
  auto fs = build_fiber_space(fib, tree, choice_pair(*tree, 3, {rad}), {rad});
  auto X = operator_X(fs);
  auto T = operator_T(fs, fr, Zeta::log);
  for (auto _ : state) benchmark::DoNotOptimize(anticommutator_estimate(fs, X, T, 20, 1).max_ratio);
}
BENCHMARK(BM_Anticommutator)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DegreeAdditivity(benchmark::State& state) {
  auto fib = generate_cut_and_project(CutProjectScheme::fibonacci, Box::cube(1, -150, 150));
  for (auto _ : state)
    benchmark::DoNotOptimize(check_degree_additivity(fib, static_cast<std::size_t>(state.range(0))).pairs);
}
BENCHMARK(BM_DegreeAdditivity)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

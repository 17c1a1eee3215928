#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "orbitlab/expansion.hpp"
#include "orbitlab/loops.hpp"
#include "orbitlab/orbit.hpp"
#include "orbitlab/periodic_ode.hpp"
#include "orbitlab/reduction.hpp"
#include "orbitlab/spectral.hpp"

using namespace orbitlab;

namespace {

Mat random_samples(int N, int cols) {
  std::mt19937_64 rng(N);
  std::normal_distribution<double> g;
  Mat X(N, cols);
  for (int i = 0; i < N; ++i)
    for (int c = 0; c < cols; ++c) X(i, c) = g(rng);
  return X;
}

geometry::Scenario modulated() {
  geometry::ScenarioSpec m;
  m.b0 = -1.0;
  m.b_mod = 0.3;
  m.c3 = 0.7;
  return geometry::Scenario(m);
}

void BM_SpectralDerivative(benchmark::State& st) {
  const Mat X = random_samples(static_cast<int>(st.range(0)), 3);
  for (auto _ : st) benchmark::DoNotOptimize(spectral::derivative(X));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_SpectralDerivative)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_SolveConstant(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const Vec sigma = random_samples(N, 1).col(0);
  const double l = periodic_ode::lambda_to_period_one(-100.0);
  for (auto _ : st) benchmark::DoNotOptimize(periodic_ode::solve_constant(l, sigma));
}
BENCHMARK(BM_SolveConstant)->RangeMultiplier(2)->Range(64, 1024);

void BM_SolveConstantConvolution(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const Vec sigma = random_samples(N, 1).col(0);
  const double l = periodic_ode::lambda_to_period_one(-100.0);
  for (auto _ : st) benchmark::DoNotOptimize(periodic_ode::solve_constant_convolution(l, sigma));
}
BENCHMARK(BM_SolveConstantConvolution)->RangeMultiplier(2)->Range(64, 256);

void BM_BuildBundle(benchmark::State& st) {
  const auto s = modulated();
  const auto x0 = loops::circle_cover(static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(expansion::build_bundle(s, x0));
}
BENCHMARK(BM_BuildBundle)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_NewtonCorrection(benchmark::State& st) {
  const auto s = modulated();
  const auto b = expansion::build_bundle(s, loops::circle_cover(static_cast<int>(st.range(0)), 1));
  for (auto _ : st) benchmark::DoNotOptimize(orbit::correct_from_bundle(s, b, 5e-4));
}
BENCHMARK(BM_NewtonCorrection)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SolveNormal(benchmark::State& st) {
  const auto s = geometry::Scenario::sphere_quartic();
  const auto base = loops::great_circle(static_cast<int>(st.range(0)), Vec::Unit(3, 0), Vec::Unit(3, 1));
  const auto h = loops::perturbed_loop(s, base, 1, 0.3);
  reduction::NormalOptions o;
  o.cross_check = false;
  for (auto _ : st)
    benchmark::DoNotOptimize(reduction::solve_normal(s, h, 1e-3, reduction::Mode::repulsive, o));
}
BENCHMARK(BM_SolveNormal)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ReducedGradient(benchmark::State& st) {
  const auto s = geometry::Scenario::sphere_quartic();
  const auto base = loops::great_circle(128, Vec::Unit(3, 0), Vec::Unit(3, 1));
  const auto state = reduction::solve_normal(s, loops::perturbed_loop(s, base, 2, 0.3), 1e-3,
                                             reduction::Mode::repulsive);
  for (auto _ : st) benchmark::DoNotOptimize(reduction::reduced_gradient(s, state));
}
BENCHMARK(BM_ReducedGradient);

void BM_EnergyGradient(benchmark::State& st) {
  const auto s = geometry::Scenario::torus(-1.0);
  const auto h = loops::perturbed_loop(s, loops::torus_loop(static_cast<int>(st.range(0)), 1, 1, 2, 1), 3, 0.2);
  for (auto _ : st) benchmark::DoNotOptimize(loops::energy_gradient(s, h));
}
BENCHMARK(BM_EnergyGradient)->Arg(128)->Arg(512);

}  // namespace
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "regen/brownian.hpp"
#include "regen/composition.hpp"
#include "regen/levy_model.hpp"
#include "regen/random.hpp"
#include "regen/special_math.hpp"

using namespace regen;

static void BM_Polygamma(benchmark::State& state) {
  double s = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(polygamma(static_cast<int>(state.range(0)), s));
    s += 1e-3;
  }
}
BENCHMARK(BM_Polygamma)->Arg(0)->Arg(1)->Arg(2);

static void BM_PhiQuadrature(benchmark::State& state) {
  const LevyModel m = LevyModel::gamma(1, 1);
  const double t = std::pow(10.0, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(phi(m, t, PhiMethod::quadrature));
}
BENCHMARK(BM_PhiQuadrature)->DenseRange(2, 8, 2);

static void BM_GammaIngredient(benchmark::State& state) {
  const auto m = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gamma_decrement_ingredient(m, 2.0 * m + 1));
}
BENCHMARK(BM_GammaIngredient)->Arg(10)->Arg(40)->Arg(200)->Arg(2000);

static void BM_DecrementRow(benchmark::State& state) {
  const LevyModel models[] = {LevyModel::gamma(1, 1), LevyModel::gamma_like(1, 1),
                              LevyModel::compound_poisson(JumpDistribution::exponential(1))};
  const LevyModel& m = models[state.range(0)];
  const auto n = static_cast<std::uint64_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(decrement_row(m, n));
  state.SetLabel(std::string(to_string(m.kind())));
}
BENCHMARK(BM_DecrementRow)->ArgsProduct({{0, 1, 2}, {100, 500}});

static void BM_BlockCountGammaLike(benchmark::State& state) {
  const DecrementSampler s(LevyModel::gamma_like(1, 1));
  RandomStream rng(1, 1);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(s.sample_block_count(n, rng));
}
BENCHMARK(BM_BlockCountGammaLike)->RangeMultiplier(100)->Range(100, 1000000);

static void BM_BlockCountGammaCached(benchmark::State& state) {
  const DecrementSampler s(LevyModel::gamma(1, 1));
  RandomStream rng(1, 1);
  for (int i = 0; i < 200; ++i) s.sample_block_count(500, rng);  // warm the row cache
  for (auto _ : state) benchmark::DoNotOptimize(s.sample_block_count(500, rng));
}
BENCHMARK(BM_BlockCountGammaCached);

static void BM_PathwiseTrajectory(benchmark::State& state) {
  const LevyModel m = LevyModel::gamma_like(1, 1);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    PathwiseTrajectory traj(m, 1e-6, RandomStream(7, stream++));
    benchmark::DoNotOptimize(traj.extend_to(n));
  }
}
BENCHMARK(BM_PathwiseTrajectory)->Arg(1000)->Arg(100000);

static void BM_CpApproximation(benchmark::State& state) {
  const JumpDistribution jump = JumpDistribution::exponential(1);
  RandomStream rng(3, 3);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cp_block_count_approx(jump, t, rng));
}
BENCHMARK(BM_CpApproximation)->Arg(100)->Arg(10000);

static void BM_BrownianConvolution(benchmark::State& state) {
  RandomStream rng(5, 5);
  const BrownianPath path = simulate_bm(1.0, 1.0 / static_cast<double>(state.range(0)), rng);
  const KernelSpec k = KernelSpec::power(1.5);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_bm(path, k, 1.0));
}
BENCHMARK(BM_BrownianConvolution)->Arg(1000)->Arg(100000);
BENCHMARK_MAIN();

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cvvqe/fock.hpp"
#include "cvvqe/models.hpp"
#include "cvvqe/vqe.hpp"
#include "cvvqe/wick.hpp"

using namespace cvvqe;

namespace {

std::vector<double> random_params(std::size_t count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.3);
  std::vector<double> x(count);
  for (auto& v : x) v = normal(rng);
  return x;
}

LadderMonomial alternating_monomial(std::size_t length, int n_modes) {
  LadderMonomial m;
  for (std::size_t i = 0; i < length; ++i) {
    const int mode = static_cast<int>(i / 2) % n_modes;
    m.ops.push_back(i % 2 == 0 ? LadderOp::create(mode) : LadderOp::annihilate(mode));
  }
  return m;
}

}  // namespace

static void BM_SumMatchings(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto params = GaussianParams::from_flat(random_params(6, 1), 2);
  const ContractionTable table(gaussian_covariance(params));
  const auto monomial = alternating_monomial(length, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sum_matchings(monomial, table).value);
  state.counters["matchings"] = static_cast<double>(perfect_matching_count(length));
}
BENCHMARK(BM_SumMatchings)->DenseRange(4, 12, 2);

static void BM_Energy(benchmark::State& state) {
  const auto ansatz = AnsatzConfig::with_subtractions(2, static_cast<int>(state.range(0)));
  const auto h = bose_hubbard_polynomial(BoseHubbardParams{});
  const auto x = random_params(ansatz.parameter_count(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(energy(x, ansatz, h));
}
BENCHMARK(BM_Energy)->DenseRange(0, 3);

static void BM_Gradient(benchmark::State& state) {
  const auto ansatz = AnsatzConfig::with_subtractions(2, 1);
  const auto h = bose_hubbard_polynomial(BoseHubbardParams{});
  const auto x = random_params(ansatz.parameter_count(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(x, ansatz, h).norm());
}
BENCHMARK(BM_Gradient);

static void BM_FockGaussianState(benchmark::State& state) {
  const auto params = GaussianParams::from_flat(random_params(6, 4), 2);
  const FockSpace space(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_state_fock(params, space).amplitudes.norm());
}
BENCHMARK(BM_FockGaussianState)->Arg(20)->Arg(30)->Arg(45)->Unit(benchmark::kMillisecond);

static void BM_GroundEnergy(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bh_ground_energy(BoseHubbardParams{}, n_max));
}
BENCHMARK(BM_GroundEnergy)->Arg(12)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

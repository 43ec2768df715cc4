// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "scobot/env.hpp"
#include "scobot/kernels.hpp"

using namespace scobot;

namespace {

std::vector<Frame> paddles_frames(int n) {
  GameState s = reset(GameId::Paddles, 1);
  Rng rng(2);
  std::vector<Frame> out;
  while (static_cast<int>(out.size()) < n) {
    if (step(s, rng.below(3)).done) s = reset(GameId::Paddles, rng.next());
    out.push_back(render(s));
  }
  return out;
}

std::vector<double> random_matrix(std::size_t rows, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> m(rows * static_cast<std::size_t>(dim));
  for (double& v : m) v = rng.uniform();
  return m;
}

template <bool Parallel>
void BM_BackgroundMode(benchmark::State& state) {
  const auto frames = paddles_frames(100);
  std::vector<const Frame*> ptrs;
  for (const Frame& f : frames) ptrs.push_back(&f);
  std::vector<std::uint8_t> out;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::background_mode(ptrs, out);
    else kernels::serial::background_mode(ptrs, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_NearestCentroid(benchmark::State& state) {
  const int dim = 11;
  const auto pts = random_matrix(static_cast<std::size_t>(state.range(0)), dim, 3);
  const auto cen = random_matrix(4, dim, 4);
  std::vector<int> a;
  std::vector<double> d;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::nearest_centroid(pts, cen, dim, a, d);
    else kernels::serial::nearest_centroid(pts, cen, dim, a, d);
    benchmark::DoNotOptimize(a.data());
  }
}

template <bool Parallel>
void BM_BestSplits(benchmark::State& state) {
  const int dim = 24;
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto x = random_matrix(n, dim, 5);
  Rng rng(6);
  std::vector<int> y(n), rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = x[i * dim] + 0.2 * rng.uniform() > 0.6 ? 1 : rng.below(3);
    rows[i] = static_cast<int>(i);
  }
  for (auto _ : state) {
    auto s = Parallel ? kernels::best_splits(x, dim, y, 3, rows) : kernels::serial::best_splits(x, dim, y, 3, rows);
    benchmark::DoNotOptimize(s.data());
  }
}

template <bool Parallel>
void BM_RuleSupport(benchmark::State& state) {
  const int dim = 7;
  const std::size_t n = 50000;
  const auto x = random_matrix(n, dim, 7);
  Rng rng(8);
  std::vector<int> y(n);
  for (int& v : y) v = rng.below(3);
  std::vector<std::vector<kernels::PremiseTerm>> premises(static_cast<std::size_t>(state.range(0)));
  std::vector<int> conclusions;
  for (auto& p : premises) {
    for (int t = 0; t < 3; ++t) p.push_back({rng.below(dim), rng.bernoulli(0.5), rng.uniform()});
    conclusions.push_back(rng.below(3));
  }
  for (auto _ : state) {
    auto s = Parallel ? kernels::rule_support(x, dim, y, premises, conclusions)
                      : kernels::serial::rule_support(x, dim, y, premises, conclusions);
    benchmark::DoNotOptimize(s.data());
  }
}

}  // namespace

BENCHMARK(BM_BackgroundMode<false>)->Name("background_mode/serial");
BENCHMARK(BM_BackgroundMode<true>)->Name("background_mode/omp");
BENCHMARK(BM_NearestCentroid<false>)->Name("nearest_centroid/serial")->Arg(100000);
BENCHMARK(BM_NearestCentroid<true>)->Name("nearest_centroid/omp")->Arg(100000);
BENCHMARK(BM_BestSplits<false>)->Name("best_splits/serial")->Arg(20000);
BENCHMARK(BM_BestSplits<true>)->Name("best_splits/omp")->Arg(20000);
BENCHMARK(BM_RuleSupport<false>)->Name("rule_support/serial")->Arg(200);
BENCHMARK(BM_RuleSupport<true>)->Name("rule_support/omp")->Arg(200);

BENCHMARK_MAIN();

// Serial reference vs OpenMP kernels on hypervector-sized inputs.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "ilac/hdc/kernels.hpp"
#include "ilac/rng.hpp"

namespace k = ilac::hdc::kernels;

namespace {

constexpr std::size_t kDims = 10000;

std::vector<std::int8_t> bipolar(std::size_t n, std::uint64_t seed) {
  ilac::CounterRng rng(seed);
  std::vector<std::int8_t> v(n);
  for (auto& x : v) x = rng.uniform() < 0.5 ? -1 : 1;
  return v;
}

std::vector<std::int64_t> ints(std::size_t n, std::uint64_t seed) {
  ilac::CounterRng rng(seed);
  std::vector<std::int64_t> v(n);
  for (auto& x : v) x = static_cast<std::int64_t>(rng.below(255)) - 127;
  return v;
}

template <bool Parallel>
void BM_EncodeBatch(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t features = 64;
  const auto base = bipolar(features * kDims, 1);
  const auto feat = ints(rows * features, 2);
  std::vector<std::int64_t> out(rows * kDims);
  for (auto _ : state) {
    std::fill(out.begin(), out.end(), 0);
    const k::Int8Rows b{base, features, kDims};
    const k::Int64Rows f{feat, rows, features};
    const k::MutInt64Rows o{out, rows, kDims};
    if constexpr (Parallel) {
      k::parallel::encode_batch(b, f, o);
    } else {
      k::serial::encode_batch(b, f, o);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}

template <bool Parallel>
void BM_DotBatch(benchmark::State& state) {
  const auto queries = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t classes = 50;
  const auto q = ints(queries * kDims, 3);
  const auto c = ints(classes * kDims, 4);
  std::vector<std::int64_t> scores(queries * classes);
  for (auto _ : state) {
    const k::Int64Rows qr{q, queries, kDims};
    const k::Int64Rows cr{c, classes, kDims};
    if constexpr (Parallel) {
      k::parallel::dot_batch(qr, cr, scores);
    } else {
      k::serial::dot_batch(qr, cr, scores);
    }
    benchmark::DoNotOptimize(scores.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries));
}

template <bool Parallel>
void BM_Add(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto acc = ints(n, 5);
  const auto x = ints(n, 6);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::add(acc, x);
    } else {
      k::serial::add(acc, x);
    }
    benchmark::DoNotOptimize(acc.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(n * sizeof(std::int64_t)));
}

}  // namespace

BENCHMARK(BM_EncodeBatch<false>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EncodeBatch<true>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DotBatch<false>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DotBatch<true>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Add<false>)->Arg(10000)->Arg(1000000);
BENCHMARK(BM_Add<true>)->Arg(10000)->Arg(1000000);
BENCHMARK_MAIN();

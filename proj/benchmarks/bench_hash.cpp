#include <benchmark/benchmark.h>

#include <vector>

#include "jlsh/family.hpp"
#include "jlsh/harness.hpp"
#include "jlsh/index.hpp"
#include "jlsh/projection.hpp"
#include "jlsh/sampling.hpp"

using namespace jlsh;

namespace {

constexpr std::size_t kDim = 128;

std::vector<RealVector> inputs(std::size_t n, std::size_t dim) {
  std::vector<RealVector> xs;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(sample_unit_vector(dim, derive_seed(Seed{99}, i)));
  return xs;
}

// Arg is the position in default_families(kDim).
void BM_FamilyHash(benchmark::State& state) {
  const FamilyKind kind = default_families(kDim).at(static_cast<std::size_t>(state.range(0)));
  const MinhashFamily family(kind, kDim, Seed{1});
  const MinhashFunction h = family.function(0);
  const auto xs = inputs(256, kDim);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(h(xs[i++ & 255].components()));
  }
  state.SetLabel(describe(kind));
}
BENCHMARK(BM_FamilyHash)->DenseRange(0, 5);

void BM_FunctionConstruction(benchmark::State& state) {
  const FamilyKind kind = default_families(kDim).at(static_cast<std::size_t>(state.range(0)));
  const MinhashFamily family(kind, kDim, Seed{1});
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(family.function(i++));
  }
  state.SetLabel(describe(kind));
}
BENCHMARK(BM_FunctionConstruction)->DenseRange(0, 5);

void BM_FeatureHashingApply(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto p = make_feature_hashing(kDim, 64, k, Seed{2});
  const auto xs = inputs(256, kDim);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(apply(p, xs[i++ & 255]));
}
BENCHMARK(BM_FeatureHashingApply)->Arg(1)->Arg(2)->Arg(4);

void BM_DenseApply(benchmark::State& state) {
  const auto d_out = static_cast<std::size_t>(state.range(0));
  const auto p = make_gaussian(kDim, d_out, Seed{3});
  const auto xs = inputs(256, kDim);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(apply(p, xs[i++ & 255]));
}
BENCHMARK(BM_DenseApply)->Arg(16)->Arg(64);

void BM_IndexQuery(benchmark::State& state) {
  const auto base = inputs(10000, kDim);
  const MinhashFamily family(Hyperplane{6}, kDim, Seed{4});
  const auto index = LshIndex::build(base, family, {5, 21}, Seed{5});
  const auto qs = inputs(64, kDim);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.query_knn(qs[i++ & 63], 10, DistanceKind::EuclideanRaw));
  }
}
BENCHMARK(BM_IndexQuery);

}  // namespace

BENCHMARK_MAIN();

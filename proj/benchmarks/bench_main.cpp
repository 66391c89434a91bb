#include "clwe/neighbors.hpp"
#include "clwe/projection.hpp"
#include "clwe/retrofit.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace clwe;

namespace {

EmbeddingMatrix random_embeddings(Index n, Index d, std::uint64_t seed, const std::string& prefix) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) m(i, k) = normal(rng);
  }
  Vocabulary vocab;
  for (Index i = 0; i < n; ++i) vocab.add(prefix + std::to_string(i));
  return {std::move(vocab), std::move(m)};
}

IndexedDictionary diagonal(Index n, Index pairs) {
  IndexedDictionary dict(n, n);
  for (Index i = 0; i < pairs; ++i) dict.insert({i, i});
  return dict;
}

void BM_TopkCosine(benchmark::State& state) {
  const Index n = state.range(0);
  auto q = random_embeddings(n, 300, 1, "q");
  auto k = random_embeddings(n, 300, 2, "k");
  for (auto _ : state) benchmark::DoNotOptimize(topk_cosine(q, k, 10));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_TopkCosine)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_CslsIndex(benchmark::State& state) {
  const Index n = state.range(0);
  auto src = random_embeddings(n, 300, 3, "s");
  auto tgt = random_embeddings(n, 300, 4, "t");
  for (auto _ : state) benchmark::DoNotOptimize(build_csls_index(src, tgt, 10));
}
BENCHMARK(BM_CslsIndex)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Procrustes(benchmark::State& state) {
  const Index d = state.range(0);
  auto src = random_embeddings(5000, d, 5, "s");
  auto tgt = random_embeddings(5000, d, 6, "t");
  const auto dict = diagonal(5000, 5000);
  for (auto _ : state) benchmark::DoNotOptimize(fit_procrustes(src, tgt, dict));
}
BENCHMARK(BM_Procrustes)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Retrofit(benchmark::State& state) {
  const Index n = state.range(0);
  AlignedEmbeddings aligned{random_embeddings(n, 300, 7, "s"), random_embeddings(n, 300, 8, "t")};
  const auto dict = diagonal(n, n / 2);
  RetrofitConfig cfg;
  cfg.convergence_tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(retrofit(aligned, dict, cfg));
}
BENCHMARK(BM_Retrofit)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

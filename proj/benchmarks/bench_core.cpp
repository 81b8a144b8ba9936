#include <benchmark/benchmark.h>

#include <random>

#include "riscore/embedder.hpp"
#include "riscore/evaluator.hpp"
#include "riscore/prompter.hpp"

namespace {

using riscore::EmbeddingVector;

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t dim) {
  std::normal_distribution<double> d;
  std::vector<double> v(dim);
  for (auto& x : v) x = d(gen);
  return v;
}

void BM_Cosine(benchmark::State& state) {
  std::mt19937_64 gen(1);
  const auto dim = static_cast<std::size_t>(state.range(0));
  const EmbeddingVector a{random_vector(gen, dim), "m"}, b{random_vector(gen, dim), "m"};
  for (auto _ : state) benchmark::DoNotOptimize(riscore::cosine(a, b));
}
BENCHMARK(BM_Cosine)->Arg(384)->Arg(1536);

void BM_TopK(benchmark::State& state) {
  std::mt19937_64 gen(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  riscore::VectorIndex index(384);
  for (std::size_t i = 0; i < n; ++i) index.add("r" + std::to_string(i), {random_vector(gen, 384), "m"});
  const EmbeddingVector q{random_vector(gen, 384), "m"};
  for (auto _ : state) benchmark::DoNotOptimize(riscore::top_k(index, q, 8));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_TopK)->Arg(500)->Arg(5000);

riscore::Riddle riddle(const std::string& id, riscore::Variant v) {
  return {id, "g-" + id, v, "What can you hold in your left hand but not in your right?",
          {"Your right elbow.", "A pencil.", "Your left hand.", "None of the above"}, 0,
          riscore::Source::BrainTeaserSP};
}

void BM_RenderRiscore(benchmark::State& state) {
  const auto shots = static_cast<std::size_t>(state.range(0));
  std::vector<riscore::Riddle> ex;
  for (std::size_t i = 0; i < shots / 2; ++i) {
    ex.push_back(riddle("o" + std::to_string(i), riscore::Variant::Original));
    auto c = riddle("o" + std::to_string(i) + "-c", riscore::Variant::Context);
    c.group_id = ex.back().group_id;
    ex.push_back(c);
  }
  const auto test = riddle("t", riscore::Variant::Original);
  for (auto _ : state) benchmark::DoNotOptimize(riscore::render(riscore::Strategy::Riscore, shots, test, ex));
}
BENCHMARK(BM_RenderRiscore)->Arg(2)->Arg(8);

void BM_ExtractChoice(benchmark::State& state) {
  const std::vector<std::string> opts = {"Your right elbow.", "A pencil.", "Your left hand.", "None of the above"};
  std::string raw(2000, 'x');
  raw += " so the answer is [option 1]: Your right elbow.";
  for (auto _ : state) benchmark::DoNotOptimize(riscore::extract_choice(raw, opts));
}
BENCHMARK(BM_ExtractChoice);

}  // namespace

BENCHMARK_MAIN();

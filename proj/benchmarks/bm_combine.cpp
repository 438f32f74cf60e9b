#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "qecomb/combine.hpp"
#include "qecomb/ngram_lm.hpp"
#include "qecomb/scorers.hpp"

using namespace qecomb;

namespace {

TokenSeq random_sentence(std::mt19937_64& rng, std::size_t n) {
  static const std::vector<std::string> vocab = {"the", "a", "cat", "dog", "sat", "on", "mat",
                                                 "ran", "to", "home", ",", "."};
  TokenSeq s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(vocab[rng() % vocab.size()]);
  return s;
}

std::shared_ptr<const NgramModel> lm() {
  static const auto model = [] {
    std::mt19937_64 rng(1);
    std::vector<TokenSeq> corpus;
    for (int i = 0; i < 2000; ++i) corpus.push_back(random_sentence(rng, 5 + rng() % 20));
    return std::make_shared<const NgramModel>(NgramModel::train(corpus, 3, 0.1));
  }();
  return model;
}

// One substitution every other token, spread over three systems.
EditUnion union_of(const TokenSeq& source, std::size_t edits) {
  std::vector<SystemEdits> systems = {{"a", {}}, {"b", {}}, {"c", {}}};
  for (std::size_t i = 0; i < edits; ++i) {
    const std::size_t pos = 2 * i;
    systems[i % 3].edits.push_back(make_edit(source, pos, pos + 1, {"fix" + std::to_string(i)}));
  }
  return edit_union(systems, source);
}

void BM_BeamCombine(benchmark::State& state) {
  const auto edits = static_cast<std::size_t>(state.range(0));
  CombinerConfig config;
  config.beam_size = static_cast<int>(state.range(1));
  std::mt19937_64 rng(2);
  const TokenSeq source = random_sentence(rng, 2 * edits + 4);
  const EditUnion u = union_of(source, edits);
  const NgramScorer scorer(lm());
  for (auto _ : state) benchmark::DoNotOptimize(beam_combine(source, u, scorer, config));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BeamCombine)->ArgsProduct({{4, 8, 16}, {1, 4, 16}});

void BM_BruteForce(benchmark::State& state) {
  const auto edits = static_cast<std::size_t>(state.range(0));
  CombinerConfig config;
  std::mt19937_64 rng(3);
  const TokenSeq source = random_sentence(rng, 2 * edits + 4);
  const EditUnion u = union_of(source, edits);
  const NgramScorer scorer(lm());
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_combine(source, u, scorer, config));
}
BENCHMARK(BM_BruteForce)->DenseRange(4, 12, 4);

void BM_ExtractEdits(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  const TokenSeq source = random_sentence(rng, n);
  TokenSeq hyp = source;
  for (std::size_t i = 0; i < n; i += 5) hyp[i] = "x";
  for (auto _ : state) benchmark::DoNotOptimize(extract_edits(source, hyp));
}
BENCHMARK(BM_ExtractEdits)->Range(8, 256);

void BM_NgramLabels(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const TokenSeq h = random_sentence(rng, static_cast<std::size_t>(state.range(0)));
  const NgramScorer scorer(lm());
  for (auto _ : state) benchmark::DoNotOptimize(scorer.labels(h));
}
BENCHMARK(BM_NgramLabels)->Range(8, 128);

}  // namespace
BENCHMARK_MAIN();

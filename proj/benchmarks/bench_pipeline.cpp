#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "citegen/eval.hpp"
#include "citegen/genpipe.hpp"
#include "citegen/mock_backends.hpp"

using namespace citegen;

static void ParseTagged(benchmark::State& state) {
  AttributedAnswer fixture;
  for (int i = 0; i < 5; ++i) {
    fixture.pairs.push_back({{"Rivers carry load through deep values v0.",
                              "Engines load through deep values change v1."},
                             "A short claim about the corpus.",
                             std::nullopt});
  }
  std::string text = render_attributed(fixture);
  for (auto _ : state) {
    AttributedAnswer answer = parse_attributed(text, true);
    benchmark::DoNotOptimize(answer.pairs.size());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(ParseTagged);

static void InterleavedGeneration(benchmark::State& state) {
  PassageSet passages = benchutil::corpus(static_cast<std::size_t>(state.range(0)));
  WordTokenizer tokenizer = WordTokenizer::build(passages.inventory_texts());
  PrefixTree tree = PrefixTree::build(passages, tokenizer);
  GenConfig config;
  config.mode = GenMode::interleave;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    SeededMockBackend refer(seed);
    SeededMockBackend claim(seed + 1);
    ++seed;
    auto outcome = generate_interleaved(Question{"q", "What changes every season?"},
                                        passages, refer, claim, config, tokenizer, &tree);
    benchmark::DoNotOptimize(outcome.answer.pairs.size());
  }
}
BENCHMARK(InterleavedGeneration)->Arg(16)->Arg(64)->Arg(256);

static void EvaluateMetrics(benchmark::State& state) {
  PassageSet passages = benchutil::corpus(64);
  WordTokenizer tokenizer = WordTokenizer::build(passages.inventory_texts());
  PrefixTree tree = PrefixTree::build(passages, tokenizer);
  GenConfig config;
  config.mode = GenMode::interleave;
  SeededMockBackend refer(11);
  SeededMockBackend claim(12);
  auto outcome = generate_interleaved(Question{"q", "What changes every season?"},
                                      passages, refer, claim, config, tokenizer, &tree);
  ContainmentNliBackend nli;
  for (auto _ : state) {
    auto cas = compute_cas(outcome.answer, nli);
    auto crs = compute_crs(outcome.answer, nli);
    auto cr = compute_cr(outcome.answer, passages);
    benchmark::DoNotOptimize(cas.num + crs.num + cr.num);
  }
}
BENCHMARK(EvaluateMetrics);

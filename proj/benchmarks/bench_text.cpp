#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "citegen/text.hpp"

using namespace citegen;

static void SplitSentences(benchmark::State& state) {
  PassageSet passages = benchutil::corpus(static_cast<std::size_t>(state.range(0)));
  const std::string& text = passages.passages()[0].text;
  for (auto _ : state) {
    auto spans = split_sentences(text);
    benchmark::DoNotOptimize(spans.size());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(SplitSentences)->RangeMultiplier(4)->Range(8, 512);

static void NormalizeText(benchmark::State& state) {
  PassageSet passages = benchutil::corpus(static_cast<std::size_t>(state.range(0)));
  const std::string& text = passages.passages()[0].text;
  for (auto _ : state) {
    std::string out = normalize(text);
    benchmark::DoNotOptimize(out.size());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(NormalizeText)->RangeMultiplier(4)->Range(8, 512);

static void FindSentence(benchmark::State& state) {
  PassageSet passages = benchutil::corpus(static_cast<std::size_t>(state.range(0)));
  const auto& inventory = passages.sentence_inventory();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& probe = inventory[i++ % inventory.size()].text;
    auto found = passages.find_sentence(probe);
    benchmark::DoNotOptimize(found.size());
  }
}
BENCHMARK(FindSentence)->RangeMultiplier(4)->Range(8, 512);

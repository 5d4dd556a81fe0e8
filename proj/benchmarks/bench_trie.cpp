#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "citegen/trie.hpp"

using namespace citegen;

static void TrieBuild(benchmark::State& state) {
  PassageSet passages = benchutil::corpus(static_cast<std::size_t>(state.range(0)));
  WordTokenizer tokenizer = WordTokenizer::build(passages.inventory_texts());
  for (auto _ : state) {
    PrefixTree tree = PrefixTree::build(passages, tokenizer);
    benchmark::DoNotOptimize(tree.leaf_count());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(TrieBuild)->RangeMultiplier(4)->Range(8, 512)->Complexity();

static void WalkerEnumerate(benchmark::State& state) {
  PassageSet passages = benchutil::corpus(static_cast<std::size_t>(state.range(0)));
  WordTokenizer tokenizer = WordTokenizer::build(passages.inventory_texts());
  PrefixTree tree = PrefixTree::build(passages, tokenizer);
  for (auto _ : state) {
    auto accepted = enumerate_accepted(tree, 2);
    benchmark::DoNotOptimize(accepted.size());
  }
}
BENCHMARK(WalkerEnumerate)->Arg(4)->Arg(8)->Arg(16);

static void WalkerGreedyPass(benchmark::State& state) {
  PassageSet passages = benchutil::corpus(static_cast<std::size_t>(state.range(0)));
  WordTokenizer tokenizer = WordTokenizer::build(passages.inventory_texts());
  PrefixTree tree = PrefixTree::build(passages, tokenizer);
  TokenId closing = tokenizer.encode(std::string(kReferenceCloseTag)).ids[0];
  for (auto _ : state) {
    TrieWalker walker(tree);
    // Greedily take the lowest candidate until only closing remains.
    while (true) {
      auto candidates = walker.valid_next_tokens(closing);
      if (candidates.empty() || candidates.front() == closing) break;
      walker.advance(candidates.front());
      if (walker.completed_count() >= 4) break;
    }
    benchmark::DoNotOptimize(walker.completed_count());
  }
}
BENCHMARK(WalkerGreedyPass)->RangeMultiplier(4)->Range(8, 512);

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "citegen/backends.hpp"

namespace citegen {

// Every candidate equally likely; argmax then falls to the tie-break.
// generate_free replays a fixed reply (default a one-sentence claim).
class UniformMockBackend final : public GenerationBackend {
 public:
  explicit UniformMockBackend(std::string free_reply = "This is a claim. </claim>")
      : free_reply_(std::move(free_reply)) {}

  std::vector<ScoredCandidate> score_candidates(
      const std::string& context, const std::vector<TokenId>& candidates) override;
  FreeGeneration generate_free(const std::string& context,
                               const std::vector<std::string>& stop_strings,
                               int max_tokens) override;

 private:
  std::string free_reply_;
};

// Fully scripted backend for transcript-level tests. Each score_candidates
// call pops one preference list (ranked token ids, best first; unlisted ids
// score lowest); each generate_free pops one reply.
class ScriptedMockBackend final : public GenerationBackend {
 public:
  void push_preference(std::vector<TokenId> ranked_best_first);
  void push_reply(std::string text);

  std::vector<ScoredCandidate> score_candidates(
      const std::string& context, const std::vector<TokenId>& candidates) override;
  FreeGeneration generate_free(const std::string& context,
                               const std::vector<std::string>& stop_strings,
                               int max_tokens) override;

  // Call log for context-shape assertions.
  const std::vector<std::string>& score_contexts() const { return score_contexts_; }
  const std::vector<std::string>& free_contexts() const { return free_contexts_; }

 private:
  std::mutex mutex_;
  std::deque<std::vector<TokenId>> preferences_;
  std::deque<std::string> replies_;
  std::vector<std::string> score_contexts_;
  std::vector<std::string> free_contexts_;
};

// Deterministic pseudo-random backend: scores are a pure function of
// (seed, context, candidate id), so identical runs are byte-identical no
// matter how calls interleave. Free generation synthesizes short claims
// from a fixed lexicon; when corpus sentences are supplied, unconstrained
// reference spans quote a real sentence most of the time and fabricate
// otherwise (exercising CR < 1 in unconstrained mode).
class SeededMockBackend final : public GenerationBackend {
 public:
  explicit SeededMockBackend(std::uint64_t seed);
  SeededMockBackend(std::uint64_t seed, std::vector<std::string> corpus_sentences,
                    double fabricate_probability = 0.3);

  std::vector<ScoredCandidate> score_candidates(
      const std::string& context, const std::vector<TokenId>& candidates) override;
  FreeGeneration generate_free(const std::string& context,
                               const std::vector<std::string>& stop_strings,
                               int max_tokens) override;

 private:
  std::uint64_t seed_;
  std::vector<std::string> corpus_;
  double fabricate_probability_ = 0.0;
};

// Entailment oracle: entailed iff every content word of the hypothesis
// occurs among the premise's content words. Deterministic and
// order-insensitive; an empty premise supports nothing.
class ContainmentNliBackend final : public NliBackend {
 public:
  EntailmentVerdict entails(const std::string& premise,
                            const std::string& hypothesis) override;
};

// Scripted segmenter keyed by the answer text. Answers marked via
// fail_answer() raise SegmentationFormatError, simulating an unparseable
// model reply.
class ScriptedSegmenterBackend final : public SegmenterBackend {
 public:
  void script(const std::string& answer, std::vector<ClauseCitation> pairs);
  void fail_answer(const std::string& answer);

  std::vector<ClauseCitation> segment_answer(const std::string& question,
                                             const PassageSet& passages,
                                             const std::string& answer) override;

 private:
  std::map<std::string, std::vector<ClauseCitation>> scripts_;
  std::map<std::string, bool> failures_;
};

// Naive splitter used when no real segmenter is configured: each answer
// sentence becomes a clause, cited with the inventory sentence sharing the
// most content words.
class HeuristicSegmenterBackend final : public SegmenterBackend {
 public:
  std::vector<ClauseCitation> segment_answer(const std::string& question,
                                             const PassageSet& passages,
                                             const std::string& answer) override;
};

}  // namespace citegen

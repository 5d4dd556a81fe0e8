#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citegen/answer.hpp"
#include "citegen/tokenizer.hpp"

namespace citegen {

// One scored candidate token. Logprobs are natural logs, renormalized over
// the candidate set, so they are always <= 0.
struct ScoredCandidate {
  TokenId token_id = 0;
  double logprob = 0.0;
};

struct BackendEndpoint {
  std::string url;
  std::string model_name;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::map<std::string, std::string> headers;
  std::chrono::milliseconds backoff{200};

  bool is_mock() const { return url.rfind("mock://", 0) == 0; }
};

struct EntailmentVerdict {
  bool entailed = false;
  double score = 0.0;
  double threshold_used = 0.5;
};

struct FreeGeneration {
  std::string text;     // up to, excluding, the first stop string
  bool truncated = false;  // no stop string within max_tokens
};

// Autoregressive model role. score_candidates drives constrained decoding
// (the engine owns the trie and sends only currently-valid ids);
// generate_free produces unconstrained spans up to a stop string.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::vector<ScoredCandidate> score_candidates(
      const std::string& context, const std::vector<TokenId>& candidates) = 0;
  virtual FreeGeneration generate_free(const std::string& context,
                                       const std::vector<std::string>& stop_strings,
                                       int max_tokens) = 0;
};

// NLI entailment role: premise supports hypothesis? An empty premise never
// entails anything.
class NliBackend {
 public:
  virtual ~NliBackend() = default;
  virtual EntailmentVerdict entails(const std::string& premise,
                                    const std::string& hypothesis) = 0;
};

// Answer segmenter role used by dataset construction: splits a long-form
// answer into (clause, citation) pairs in answer order.
struct ClauseCitation {
  std::string clause;
  std::string citation;
};

class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;
  virtual std::vector<ClauseCitation> segment_answer(const std::string& question,
                                                     const PassageSet& passages,
                                                     const std::string& answer) = 0;
};

// Renormalizes raw logprobs over the candidate set so exp sums to 1.
std::vector<ScoredCandidate> renormalize(std::vector<ScoredCandidate> scores);

// Argmax with the lowest-token-id tie-break used throughout the decoder.
TokenId pick_argmax(const std::vector<ScoredCandidate>& scores);

}  // namespace citegen

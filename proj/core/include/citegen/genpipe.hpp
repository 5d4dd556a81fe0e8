#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "citegen/answer.hpp"
#include "citegen/backends.hpp"
#include "citegen/trie.hpp"

namespace citegen {

enum class TieBreak { lowest_token_id };

// Knobs for one generation session. `constrained` switches reference parts
// between prefix-tree candidate scoring and free-running with a stop string;
// min/max_pairs bound the number of reference/claim pairs (ASQA uses 2..5,
// ELI5 4..6); max_claim_tokens also caps every other free-generated span.
struct GenConfig {
  GenMode mode = GenMode::interleave;
  bool constrained = true;
  int min_pairs = 2;
  int max_pairs = 5;
  int max_ref_sentences_per_pair = 6;
  int max_claim_tokens = 128;
  TieBreak tie_break = TieBreak::lowest_token_id;
  std::uint64_t seed = 0;

  void validate() const;  // throws ValidationError
};

// Full instruction prompt plus the tagged text generated so far. The
// history is well-formed up to the currently open tag.
struct SessionContext {
  std::string prompt;
  std::string history;
};

struct ReferencePart {
  std::vector<std::string> sentences;
  std::optional<std::vector<SentenceRef>> provenance;  // set under constrained decoding
  bool forced_close = false;
};

struct GenerationOutcome {
  AttributedAnswer answer;
  GenerationTrace trace;
};

std::string build_prompt(const Question& question, const PassageSet& passages);

// One reference part. Constrained: repeatedly scores the walker's valid
// tokens (plus the closing tag's first token once a sentence is complete),
// takes the argmax with lowest-token-id tie-break, and commits sentences per
// the walker rules; closes when the closing token wins, when
// max_ref_sentences_per_pair is hit, or when no unused sentence remains
// (both forced closes are logged). Unconstrained: free-runs to </reference>
// and splits the text afterwards. `session.history` must end just after an
// opening <reference> tag; the caller appends the returned sentences.
ReferencePart generate_reference_part(SessionContext& session, const PrefixTree* tree,
                                      GenerationBackend& backend, const GenConfig& config,
                                      const TokenizerContract* tokenizer,
                                      GenerationTrace& trace, int pair_index);

// One claim part. Interleave mode conditions on the history alone (no
// prompt, no passages); unified/prompt modes prepend the prompt. The
// history must end just after an opening <claim> tag. Truncation at
// max_claim_tokens is flagged in the trace, not an error.
std::string generate_claim_part(SessionContext& session, GenerationBackend& backend,
                                const GenConfig& config, GenerationTrace& trace,
                                int pair_index);

// Dual-model interleaving: alternates refer_backend (reference parts, full
// prompt context) and claim_backend (claims, history-only context), with the
// engine emitting connectives and tags. After each pair an end marker
// competes with the next pair's opening tag; the end preference is honored
// only once min_pairs is reached (suppressions logged) and generation
// force-stops at max_pairs.
GenerationOutcome generate_interleaved(const Question& question, const PassageSet& passages,
                                       GenerationBackend& refer_backend,
                                       GenerationBackend& claim_backend,
                                       const GenConfig& config,
                                       const TokenizerContract& tokenizer,
                                       const PrefixTree* tree = nullptr);

// Single-backend generation. Unified mode free-runs between tags and
// switches to constrained scoring inside references; prompt mode is a raw
// passthrough parsed non-strictly for baseline evaluation.
GenerationOutcome generate_unified(const Question& question, const PassageSet& passages,
                                   GenerationBackend& backend, const GenConfig& config,
                                   const TokenizerContract* tokenizer = nullptr,
                                   const PrefixTree* tree = nullptr);

}  // namespace citegen

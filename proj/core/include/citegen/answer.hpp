#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citegen/text.hpp"

namespace citegen {

struct Question {
  std::string id;
  std::string text;
};

struct Passage {
  std::string id;
  std::optional<std::string> title;
  std::string text;
};

// One segmented sentence of the passage set, stored whitespace-normalized.
struct InventorySentence {
  std::string passage_id;
  int sentence_index = 0;
  std::string text;
};

// Retrieved reference passages plus their derived sentence inventory. The
// inventory is what the prefix tree, string matching and CR all run over.
class PassageSet {
 public:
  PassageSet() = default;
  static PassageSet from_passages(std::vector<Passage> passages,
                                  const SegmenterOptions& options = {});

  const std::vector<Passage>& passages() const { return passages_; }
  const std::vector<InventorySentence>& sentence_inventory() const { return inventory_; }

  // All inventory locations whose normalized text equals normalize(sentence);
  // empty result means the sentence is not verbatim from the passages.
  std::vector<SentenceRef> find_sentence(std::string_view sentence) const;

  const InventorySentence& sentence_at(const SentenceRef& ref) const;
  std::vector<std::string> inventory_texts() const;

 private:
  std::vector<Passage> passages_;
  std::vector<InventorySentence> inventory_;
  std::unordered_map<std::string, std::vector<SentenceRef>> by_text_;
};

// Free-function spelling of the lookup, matching the rest of the text ops.
std::vector<SentenceRef> find_sentence_in_passages(std::string_view sentence,
                                                   const PassageSet& passages);

// One reference/claim pair. References are whole sentences quoted from the
// passages; provenance carries their inventory locations when known.
// Empty reference lists only appear in non-strict (baseline) parses.
struct RefClaimPair {
  std::vector<std::string> reference_sentences;
  std::string claim_text;
  std::optional<std::vector<SentenceRef>> provenance;
};

enum class GenMode { unified, interleave, prompt };
enum class TracePhase { reference, claim, connective, tag };
enum class ForcedEvent { forced_close_reference, suppressed_end, forced_end };

struct TraceStep {
  TracePhase phase;
  int token_count = 0;
};

struct GenerationTrace {
  GenMode mode = GenMode::interleave;
  std::vector<TraceStep> steps;
  std::vector<std::pair<int, ForcedEvent>> forced_events;  // (pair index, event)
  std::vector<int> truncated_pairs;  // pair indexes whose claim hit max_claim_tokens
};

std::string_view to_string(GenMode mode);
std::string_view to_string(TracePhase phase);
std::string_view to_string(ForcedEvent event);
GenMode gen_mode_from_string(std::string_view s);

inline constexpr std::string_view kDefaultReferenceConnective = "According to the citation:";
inline constexpr std::string_view kDefaultClaimConnective = "We can know that:";

// A full tagged answer. `connectives` stores the filler before each
// <reference> and each <claim>, in pair order (2 entries per pair); when the
// list does not line up with the pairs, rendering falls back to the default
// connectives above.
struct AttributedAnswer {
  std::vector<RefClaimPair> pairs;
  std::string raw_text;
  std::vector<std::string> connectives;

  bool has_stored_connectives() const { return connectives.size() == 2 * pairs.size(); }
};

// Parses tagged model output into ordered pairs. Strict mode rejects
// unbalanced or out-of-order tags (and non-whitespace trailing content) with
// the byte offset; non-strict mode additionally turns untagged answer
// sentences into pairs with empty references so baseline outputs flow
// through the same evaluator.
AttributedAnswer parse_attributed(std::string_view text, bool strict);

// Inverse of parse_attributed modulo whitespace: per pair emits
//   connective <reference> sentences </reference> connective <claim> claim </claim>
// joined by single spaces, skipping empty connectives.
std::string render_attributed(const AttributedAnswer& answer);

// All claims joined in order with single spaces; references and connectives
// are excluded. This is "the answer" every correctness metric sees.
std::string concat_claims(const AttributedAnswer& answer);

}  // namespace citegen

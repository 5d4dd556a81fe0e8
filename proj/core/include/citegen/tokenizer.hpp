#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace citegen {

using TokenId = std::int32_t;

struct TokenSeq {
  std::vector<TokenId> ids;
  std::string tokenizer_name;
};

// Shared tokenization contract between the prefix tree and the scoring
// backends. decode(encode(s)) must reproduce s exactly for every sentence
// the tree is built over; implementations must be safe for concurrent
// read-only use once constructed.
class TokenizerContract {
 public:
  virtual ~TokenizerContract() = default;
  virtual TokenSeq encode(std::string_view text) const = 0;
  virtual std::string decode(const TokenSeq& tokens) const = 0;
  virtual std::string name() const = 0;
};

// Reserved marker strings the generation engine encodes through whatever
// tokenizer is configured. They never occur inside passage sentences.
inline constexpr std::string_view kReferenceOpenTag = "<reference>";
inline constexpr std::string_view kReferenceCloseTag = "</reference>";
inline constexpr std::string_view kClaimOpenTag = "<claim>";
inline constexpr std::string_view kClaimCloseTag = "</claim>";
inline constexpr std::string_view kAnswerEndMarker = "</s>";

// Whitespace word tokenizer with a stable word->id table built per corpus.
// Words keep their ids in first-appearance order, after the reserved
// markers; decode joins words with single spaces, so the identity
// round-trip holds for any whitespace-normalized sentence.
class WordTokenizer final : public TokenizerContract {
 public:
  // Builds the vocabulary from the corpus sentences plus the reserved
  // markers (markers first, ids 0..4).
  static WordTokenizer build(const std::vector<std::string>& corpus_sentences);

  // Exact vocabulary supplied by the caller; used by tests that pin ids.
  static WordTokenizer with_vocab(std::unordered_map<std::string, TokenId> vocab);

  TokenSeq encode(std::string_view text) const override;
  std::string decode(const TokenSeq& tokens) const override;
  std::string name() const override { return "whitespace"; }

  std::size_t vocab_size() const { return word_to_id_.size(); }

 private:
  WordTokenizer() = default;

  std::unordered_map<std::string, TokenId> word_to_id_;
  std::unordered_map<TokenId, std::string> id_to_word_;
};

}  // namespace citegen

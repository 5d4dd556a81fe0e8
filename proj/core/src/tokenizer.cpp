#include "citegen/tokenizer.hpp"

#include "citegen/errors.hpp"
#include "citegen/text.hpp"

namespace citegen {

namespace {

std::vector<std::string> whitespace_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      if (!current.empty()) {
        words.push_back(current);
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(current);
  return words;
}

}  // namespace

WordTokenizer WordTokenizer::build(const std::vector<std::string>& corpus_sentences) {
  WordTokenizer tok;
  TokenId next = 0;
  auto add = [&](const std::string& word) {
    if (tok.word_to_id_.emplace(word, next).second) {
      tok.id_to_word_.emplace(next, word);
      ++next;
    }
  };
  add(std::string(kReferenceOpenTag));
  add(std::string(kReferenceCloseTag));
  add(std::string(kClaimOpenTag));
  add(std::string(kClaimCloseTag));
  add(std::string(kAnswerEndMarker));
  for (const auto& sentence : corpus_sentences) {
    for (const auto& word : whitespace_words(sentence)) add(word);
  }
  return tok;
}

WordTokenizer WordTokenizer::with_vocab(std::unordered_map<std::string, TokenId> vocab) {
  WordTokenizer tok;
  for (const auto& [word, id] : vocab) {
    if (id < 0) throw UsageError("token ids must be non-negative: " + word);
    if (!tok.id_to_word_.emplace(id, word).second)
      throw UsageError("duplicate token id " + std::to_string(id));
  }
  tok.word_to_id_ = std::move(vocab);
  return tok;
}

TokenSeq WordTokenizer::encode(std::string_view text) const {
  TokenSeq seq;
  seq.tokenizer_name = name();
  for (const auto& word : whitespace_words(text)) {
    auto it = word_to_id_.find(word);
    if (it == word_to_id_.end())
      throw UsageError("word outside tokenizer vocabulary: '" + word + "'");
    seq.ids.push_back(it->second);
  }
  return seq;
}

std::string WordTokenizer::decode(const TokenSeq& tokens) const {
  std::string out;
  for (TokenId id : tokens.ids) {
    auto it = id_to_word_.find(id);
    if (it == id_to_word_.end())
      throw UsageError("unknown token id " + std::to_string(id));
    if (!out.empty()) out.push_back(' ');
    out += it->second;
  }
  return out;
}

}  // namespace citegen

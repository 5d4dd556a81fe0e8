#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "citegen/answer.hpp"
#include "citegen/tokenizer.hpp"

namespace citegen {

// Token-level prefix tree over the sentence inventory. Each root-to-leaf
// path decodes to exactly one inventory sentence; identical token sequences
// are deduplicated (first occurrence keeps the sentence ref). A node may
// carry both a leaf marker and children when one sentence's tokenization is
// a strict prefix of another's.
//
// Immutable after build; share freely across concurrent walkers.
class PrefixTree {
 public:
  struct Node {
    TokenId token = -1;                       // -1 at the root
    std::map<TokenId, std::uint32_t> children;
    std::optional<std::uint32_t> leaf;        // ordinal of the completed sentence
    std::vector<std::uint32_t> subtree_sentences;  // ordinals reachable below/at this node
  };

  struct Sentence {
    SentenceRef ref;
    std::string text;
    std::vector<TokenId> tokens;
  };

  static PrefixTree build(const std::vector<InventorySentence>& inventory,
                          const TokenizerContract& tokenizer);
  static PrefixTree build(const PassageSet& passages, const TokenizerContract& tokenizer);

  const Node& node(std::uint32_t index) const { return nodes_[index]; }
  std::uint32_t root() const { return 0; }
  std::size_t leaf_count() const { return sentences_.size(); }
  const Sentence& sentence(std::uint32_t ordinal) const { return sentences_[ordinal]; }
  const std::string& tokenizer_name() const { return tokenizer_name_; }
  bool contains_token(TokenId id) const { return alphabet_.count(id) > 0; }
  const std::set<TokenId>& alphabet() const { return alphabet_; }

  // Debug format: one line per distinct sentence,
  //   passage_id/sentence_index<TAB>token ids<TAB>sentence text
  std::string dump() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Sentence> sentences_;
  std::string tokenizer_name_;
  std::set<TokenId> alphabet_;
};

// Cursor for one reference part. Tracks the tokens emitted since the last
// root reset, the sentences completed so far, and which sentences are spent
// (a sentence may be cited at most once per reference part).
class TrieWalker {
 public:
  explicit TrieWalker(const PrefixTree& tree);

  // Valid next tokens, sorted ascending. Mid-path this is the unexhausted
  // children; once at least one sentence is complete (cursor back at root,
  // or parked on an interior leaf marker) the restart tokens of unexhausted
  // root children and `closing_first_token` join the set. A fresh walker
  // never offers the closing token: a reference holds at least one sentence.
  std::vector<TokenId> valid_next_tokens(TokenId closing_first_token) const;

  // Consumes one non-closing token. Completing a childless leaf commits its
  // sentence and resets the cursor to the root; a token that leaves an
  // interior leaf marker toward the root first commits the shorter sentence.
  // Tokens outside valid_next_tokens raise ConstraintViolationError.
  void advance(TokenId token);

  // Commits the sentence under the cursor when parked on an unused leaf
  // marker; the engine calls this when the closing tag wins the argmax.
  void commit_pending();

  bool has_pending_leaf() const;
  // True when any sentence can still start from the root.
  bool has_unused_continuation() const;

  int completed_count() const { return static_cast<int>(completed_.size()); }
  std::vector<SentenceRef> completed_refs() const;
  std::vector<std::string> completed_texts() const;
  const std::vector<TokenId>& emitted() const { return emitted_; }
  const PrefixTree& tree() const { return *tree_; }

 private:
  bool subtree_has_unused(std::uint32_t node_index, bool exclude_pending) const;
  std::vector<TokenId> restart_tokens(bool exclude_pending) const;
  void commit(std::uint32_t ordinal);

  const PrefixTree* tree_;
  std::uint32_t cursor_;
  std::vector<TokenId> emitted_;
  std::vector<std::uint32_t> completed_;
  std::vector<bool> used_;
};

// All distinct sentence-ref sequences of at most max_sentences sentences a
// fresh walker can accept as a complete reference part. Exhaustive; test
// scale only.
std::set<std::vector<SentenceRef>> enumerate_accepted(const PrefixTree& tree,
                                                      int max_sentences);

}  // namespace citegen

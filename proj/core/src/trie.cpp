#include "citegen/trie.hpp"

#include <algorithm>
#include <sstream>

#include "citegen/errors.hpp"

namespace citegen {

PrefixTree PrefixTree::build(const std::vector<InventorySentence>& inventory,
                             const TokenizerContract& tokenizer) {
  if (inventory.empty())
    throw ConfigurationError("cannot build a prefix tree over an empty inventory");

  PrefixTree tree;
  tree.tokenizer_name_ = tokenizer.name();
  tree.nodes_.push_back(Node{});  // root

  std::map<std::vector<TokenId>, std::uint32_t> seen;  // dedup by tokenization
  for (const auto& entry : inventory) {
    TokenSeq seq = tokenizer.encode(entry.text);
    if (seq.ids.empty())
      throw ConfigurationError("inventory sentence encodes to zero tokens: '" +
                               entry.text + "'");
    if (seen.count(seq.ids)) continue;  // first duplicate wins

    std::uint32_t ordinal = static_cast<std::uint32_t>(tree.sentences_.size());
    seen.emplace(seq.ids, ordinal);
    tree.sentences_.push_back(
        {{entry.passage_id, entry.sentence_index}, entry.text, seq.ids});

    std::uint32_t cursor = tree.root();
    tree.nodes_[cursor].subtree_sentences.push_back(ordinal);
    for (TokenId token : seq.ids) {
      tree.alphabet_.insert(token);
      auto it = tree.nodes_[cursor].children.find(token);
      if (it == tree.nodes_[cursor].children.end()) {
        std::uint32_t child = static_cast<std::uint32_t>(tree.nodes_.size());
        Node node;
        node.token = token;
        tree.nodes_.push_back(std::move(node));
        tree.nodes_[cursor].children.emplace(token, child);
        cursor = child;
      } else {
        cursor = it->second;
      }
      tree.nodes_[cursor].subtree_sentences.push_back(ordinal);
    }
    tree.nodes_[cursor].leaf = ordinal;
  }
  return tree;
}

PrefixTree PrefixTree::build(const PassageSet& passages, const TokenizerContract& tokenizer) {
  return build(passages.sentence_inventory(), tokenizer);
}

std::string PrefixTree::dump() const {
  std::ostringstream out;
  for (const auto& sentence : sentences_) {
    out << sentence.ref.passage_id << '/' << sentence.ref.sentence_index << '\t';
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      if (i) out << ' ';
      out << sentence.tokens[i];
    }
    out << '\t' << sentence.text << '\n';
  }
  return out.str();
}

TrieWalker::TrieWalker(const PrefixTree& tree)
    : tree_(&tree), cursor_(tree.root()), used_(tree.leaf_count(), false) {}

bool TrieWalker::subtree_has_unused(std::uint32_t node_index, bool exclude_pending) const {
  const auto& node = tree_->node(node_index);
  std::optional<std::uint32_t> pending;
  if (exclude_pending && cursor_ != tree_->root()) {
    const auto& at = tree_->node(cursor_);
    if (at.leaf && !used_[*at.leaf]) pending = at.leaf;
  }
  for (std::uint32_t ordinal : node.subtree_sentences) {
    if (used_[ordinal]) continue;
    if (pending && ordinal == *pending) continue;
    return true;
  }
  return false;
}

std::vector<TokenId> TrieWalker::restart_tokens(bool exclude_pending) const {
  std::vector<TokenId> out;
  for (const auto& [token, child] : tree_->node(tree_->root()).children) {
    if (subtree_has_unused(child, exclude_pending)) out.push_back(token);
  }
  return out;
}

bool TrieWalker::has_pending_leaf() const {
  if (cursor_ == tree_->root()) return false;
  const auto& node = tree_->node(cursor_);
  return node.leaf && !used_[*node.leaf];
}

bool TrieWalker::has_unused_continuation() const {
  return subtree_has_unused(tree_->root(), /*exclude_pending=*/false);
}

std::vector<TokenId> TrieWalker::valid_next_tokens(TokenId closing_first_token) const {
  std::vector<TokenId> candidates;
  const auto& node = tree_->node(cursor_);

  if (cursor_ == tree_->root()) {
    if (completed_.empty()) {
      // Fresh reference: must start a sentence, closing not yet an option.
      return restart_tokens(false);
    }
    candidates = restart_tokens(false);
    candidates.push_back(closing_first_token);
  } else {
    for (const auto& [token, child] : node.children) {
      if (subtree_has_unused(child, /*exclude_pending=*/false))
        candidates.push_back(token);
    }
    if (has_pending_leaf()) {
      // Committing the sentence under the cursor opens the post-leaf moves.
      for (TokenId token : restart_tokens(/*exclude_pending=*/true))
        candidates.push_back(token);
      candidates.push_back(closing_first_token);
    }
  }

  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty() && cursor_ != tree_->root())
    throw InternalError("trie walker reached a dead end");
  return candidates;
}

void TrieWalker::commit(std::uint32_t ordinal) {
  completed_.push_back(ordinal);
  used_[ordinal] = true;
  cursor_ = tree_->root();
  emitted_.clear();
}

void TrieWalker::commit_pending() {
  if (!has_pending_leaf())
    throw ConstraintViolationError("no pending sentence to commit");
  commit(*tree_->node(cursor_).leaf);
}

void TrieWalker::advance(TokenId token) {
  const auto& node = tree_->node(cursor_);
  auto child_it = node.children.find(token);

  // Staying on the current path takes precedence over restarting from the
  // root when the same token could mean either.
  if (child_it != node.children.end() &&
      subtree_has_unused(child_it->second, /*exclude_pending=*/false)) {
    cursor_ = child_it->second;
    emitted_.push_back(token);
  } else if (has_pending_leaf()) {
    std::uint32_t pending = *tree_->node(cursor_).leaf;
    // Restart move: the shorter sentence is committed first.
    auto restarts = restart_tokens(/*exclude_pending=*/true);
    if (std::find(restarts.begin(), restarts.end(), token) == restarts.end())
      throw ConstraintViolationError("token " + std::to_string(token) +
                                     " is not a valid continuation");
    commit(pending);
    auto root_it = tree_->node(tree_->root()).children.find(token);
    cursor_ = root_it->second;
    emitted_.push_back(token);
  } else {
    throw ConstraintViolationError("token " + std::to_string(token) +
                                   " is not a valid continuation");
  }

  const auto& reached = tree_->node(cursor_);
  if (reached.leaf && reached.children.empty()) {
    if (used_[*reached.leaf])
      throw InternalError("walker completed an already-used sentence");
    commit(*reached.leaf);
  }
}

std::vector<SentenceRef> TrieWalker::completed_refs() const {
  std::vector<SentenceRef> refs;
  refs.reserve(completed_.size());
  for (std::uint32_t ordinal : completed_) refs.push_back(tree_->sentence(ordinal).ref);
  return refs;
}

std::vector<std::string> TrieWalker::completed_texts() const {
  std::vector<std::string> texts;
  texts.reserve(completed_.size());
  for (std::uint32_t ordinal : completed_) texts.push_back(tree_->sentence(ordinal).text);
  return texts;
}

namespace {

void enumerate_rec(const TrieWalker& walker, TokenId closing, int max_sentences,
                   std::set<std::vector<SentenceRef>>& out) {
  auto candidates = walker.valid_next_tokens(closing);
  for (TokenId token : candidates) {
    if (token == closing) {
      TrieWalker closed = walker;
      if (closed.has_pending_leaf()) closed.commit_pending();
      if (closed.completed_count() >= 1 && closed.completed_count() <= max_sentences)
        out.insert(closed.completed_refs());
      continue;
    }
    TrieWalker next = walker;
    next.advance(token);
    if (next.completed_count() > max_sentences) continue;
    enumerate_rec(next, closing, max_sentences, out);
  }
}

}  // namespace

std::set<std::vector<SentenceRef>> enumerate_accepted(const PrefixTree& tree,
                                                      int max_sentences) {
  // Any id outside the tree alphabet works as the closing stand-in.
  TokenId closing = tree.alphabet().empty() ? 0 : *tree.alphabet().rbegin() + 1;
  std::set<std::vector<SentenceRef>> out;
  TrieWalker walker(tree);
  enumerate_rec(walker, closing, max_sentences, out);
  return out;
}

}  // namespace citegen

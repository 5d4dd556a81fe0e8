// Shared fixtures and independent oracles. The oracles here re-derive
// expected behavior from first principles (raw token lists, straight-line
// filtering) and never touch the implementation structures they check.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "citegen/answer.hpp"
#include "citegen/backends.hpp"
#include "citegen/dataset.hpp"
#include "citegen/text.hpp"
#include "citegen/tokenizer.hpp"

namespace testutil {

using citegen::TokenId;

// --- corpus fixtures --------------------------------------------------------

inline citegen::PassageSet make_passages(
    const std::vector<std::pair<std::string, std::string>>& id_text) {
  std::vector<citegen::Passage> passages;
  for (const auto& [id, text] : id_text) {
    citegen::Passage passage;
    passage.id = id;
    passage.text = text;
    passages.push_back(std::move(passage));
  }
  return citegen::PassageSet::from_passages(std::move(passages));
}

// Two-passage corpus used by the metric fixtures.
inline citegen::PassageSet metric_docs() {
  return make_passages(
      {{"d1", "The cat sat on the mat. Dogs bark loudly at night. Birds can fly south."},
       {"d2", "Rain falls in spring. The sun is hot and bright. Fish swim in cold rivers."}});
}

// --- trie acceptance oracle --------------------------------------------------

// Greedy scanner over raw token sequences: extends the current buffer while
// any unused sentence still matches, otherwise commits the exactly-matched
// sentence and restarts on the incoming token. Mirrors the decoding rules
// from their written definition, not from the trie.
struct ScannerOracle {
  std::vector<std::vector<TokenId>> sentences;  // deduplicated, first wins

  explicit ScannerOracle(const std::vector<std::vector<TokenId>>& raw) {
    for (const auto& tokens : raw) {
      if (std::find(sentences.begin(), sentences.end(), tokens) == sentences.end())
        sentences.push_back(tokens);
    }
  }

  bool starts_any_unused(const std::vector<TokenId>& prefix,
                         const std::set<std::size_t>& used) const {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (used.count(i)) continue;
      if (sentences[i].size() < prefix.size()) continue;
      if (std::equal(prefix.begin(), prefix.end(), sentences[i].begin())) return true;
    }
    return false;
  }

  std::optional<std::size_t> exact_unused(const std::vector<TokenId>& buffer,
                                          const std::set<std::size_t>& used) const {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (used.count(i)) continue;
      if (sentences[i] == buffer) return i;
    }
    return std::nullopt;
  }

  struct State {
    std::vector<TokenId> buffer;
    std::set<std::size_t> used;
    std::vector<std::size_t> committed;
  };

  // One token step; false = the token string is rejected.
  bool step(State& state, TokenId token) const {
    std::vector<TokenId> extended = state.buffer;
    extended.push_back(token);
    if (starts_any_unused(extended, state.used)) {
      state.buffer = std::move(extended);
      return true;
    }
    auto match = exact_unused(state.buffer, state.used);
    if (!match) return false;
    state.used.insert(*match);
    state.committed.push_back(*match);
    state.buffer.clear();
    state.buffer.push_back(token);
    return starts_any_unused(state.buffer, state.used);
  }

  // Closing move; returns the accepted sequence or nullopt.
  std::optional<std::vector<std::size_t>> close(const State& state) const {
    if (state.buffer.empty())
      return state.committed.empty()
                 ? std::nullopt
                 : std::optional<std::vector<std::size_t>>(state.committed);
    auto match = exact_unused(state.buffer, state.used);
    if (!match) return std::nullopt;
    auto sequence = state.committed;
    sequence.push_back(*match);
    return sequence;
  }

  void enumerate(const State& state, int max_sentences,
                 std::set<std::vector<std::size_t>>& out) const {
    if (auto accepted = close(state)) {
      if (!accepted->empty() &&
          accepted->size() <= static_cast<std::size_t>(max_sentences))
        out.insert(*accepted);
    }
    std::set<TokenId> alphabet;
    for (const auto& tokens : sentences) alphabet.insert(tokens.begin(), tokens.end());
    for (TokenId token : alphabet) {
      State next = state;
      if (!step(next, token)) continue;
      std::size_t floor = next.committed.size() + (next.buffer.empty() ? 0 : 1);
      if (floor > static_cast<std::size_t>(max_sentences)) continue;
      enumerate(next, max_sentences, out);
    }
  }

  std::set<std::vector<std::size_t>> accepted_sequences(int max_sentences) const {
    std::set<std::vector<std::size_t>> out;
    enumerate(State{}, max_sentences, out);
    return out;
  }
};

// --- filtering oracle ---------------------------------------------------------

// Straight-line transcription of the tuple-level citation filter: walk every
// pair, flag the tuple on any citation sentence missing from the passages or
// any citation that fails entailment, remove flagged tuples.
struct FilterOracleResult {
  std::vector<std::string> kept_ids;
  std::map<std::string, std::string> removed;  // id -> reason
};

inline FilterOracleResult filter_oracle(const std::vector<citegen::TrainingSample>& samples,
                                        citegen::NliBackend& nli) {
  FilterOracleResult result;
  for (const auto& sample : samples) {
    int flag = 1;
    std::string reason;
    for (const auto& pair : sample.pairs) {
      for (const auto& citation : pair.reference_sentences) {
        for (const auto& span : citegen::split_sentences(citation)) {
          if (citegen::find_sentence_in_passages(span.text, sample.passages).empty()) {
            if (flag == 1) reason = "string-mismatch";
            flag = 0;
          }
        }
      }
      std::string premise;
      for (const auto& sentence : pair.reference_sentences) {
        if (!premise.empty()) premise.push_back(' ');
        premise += sentence;
      }
      if (!nli.entails(premise, pair.claim_text).entailed) {
        if (flag == 1) reason = "nli-fail";
        flag = 0;
      }
    }
    if (flag == 1)
      result.kept_ids.push_back(sample.id);
    else
      result.removed[sample.id] = reason;
  }
  return result;
}

// --- random tagged strings -----------------------------------------------------

struct TaggedStringGen {
  std::uint64_t state;

  explicit TaggedStringGen(std::uint64_t seed) : state(seed * 2654435761u + 1) {}

  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  std::string word() {
    static const std::vector<std::string> kWords = {
        "alpha", "bravo", "charlie", "delta",  "echo",  "foxtrot",
        "golf",  "hotel", "india",   "juliet", "kilo",  "lima"};
    return kWords[pick(kWords.size())];
  }

  std::string sentence() {
    std::size_t n = 2 + pick(5);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out.push_back(' ');
      out += word();
    }
    out.push_back('.');
    return out;
  }

  std::string connective() {
    switch (pick(4)) {
      case 0: return "";
      case 1: return "According to the citation:";
      case 2: return "We can know that:";
      default: return word() + " " + word() + ":";
    }
  }

  // Canonically spaced well-formed tagged string with 1..4 pairs.
  std::string well_formed() {
    std::size_t pairs = 1 + pick(4);
    std::string out;
    auto append = [&out](const std::string& piece) {
      if (piece.empty()) return;
      if (!out.empty()) out.push_back(' ');
      out += piece;
    };
    for (std::size_t p = 0; p < pairs; ++p) {
      append(connective());
      append("<reference>");
      std::size_t refs = 1 + pick(3);
      for (std::size_t r = 0; r < refs; ++r) append(sentence());
      append("</reference>");
      append(connective());
      append("<claim>");
      append(sentence());
      append("</claim>");
    }
    return out;
  }

  // Breaks one structural property of a well-formed string.
  std::string malformed() {
    std::string base = well_formed();
    switch (pick(6)) {
      case 0: {  // drop the final closing tag
        std::size_t at = base.rfind("</claim>");
        return base.substr(0, at);
      }
      case 1: {  // swap the first open/close reference tags
        std::size_t open = base.find("<reference>");
        std::string out = base;
        out.replace(open, std::string("<reference>").size(), "</reference>");
        return out;
      }
      case 2:  // claim block before any reference
        return "<claim> orphan claim. </claim> " + base;
      case 3: {  // duplicate an opening claim tag mid-stream
        std::size_t at = base.find("<claim>");
        return base.substr(0, at) + "<claim> " + base.substr(at);
      }
      case 4:  // trailing prose after the final closing tag
        return base + " trailing unattributed prose.";
      default: {  // nest a reference inside a reference body
        std::size_t at = base.find("<reference>") + std::string("<reference>").size();
        return base.substr(0, at) + " <reference> nested." + base.substr(at);
      }
    }
  }
};

}  // namespace testutil

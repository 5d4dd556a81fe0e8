#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace citegen {

// One segmented sentence inside a passage. `text` is the exact byte slice
// [char_begin, char_end) of the source string, untrimmed inside.
struct SentenceSpan {
  std::string passage_id;
  int index = 0;
  std::string text;
  std::size_t char_begin = 0;
  std::size_t char_end = 0;
};

// Location of one inventory sentence: (passage id, sentence index).
struct SentenceRef {
  std::string passage_id;
  int sentence_index = 0;

  friend bool operator==(const SentenceRef&, const SentenceRef&) = default;
  friend auto operator<=>(const SentenceRef&, const SentenceRef&) = default;
};

// Rule-based sentence splitter options. A boundary is placed after '.', '?'
// or '!' when it is followed by whitespace and then an ASCII uppercase
// letter, digit, or quote. Tokens ending in '.' that appear on the
// abbreviation stop-list never end a sentence.
struct SegmenterOptions {
  std::set<std::string> abbreviations = default_abbreviations();

  static std::set<std::string> default_abbreviations();
};

// Loads a plain-text stop-list, one abbreviation token per line.
std::set<std::string> load_abbreviations(const std::string& path);

// Deterministic rule-based segmentation. Spans are ordered, non-overlapping
// and cover all non-whitespace content; empty input yields no spans.
std::vector<SentenceSpan> split_sentences(std::string_view text,
                                          const SegmenterOptions& options = {});
std::vector<SentenceSpan> split_sentences(std::string_view text,
                                          std::string_view passage_id,
                                          const SegmenterOptions& options = {});

// Unicode canonical composition (NFC) followed by collapsing ASCII
// whitespace runs to single spaces and trimming the ends. Case and
// punctuation are preserved. Idempotent.
std::string normalize(std::string_view text);

// Number of maximal non-whitespace runs.
std::size_t word_count(std::string_view text);

// Lowercased words with non-alphanumeric bytes stripped; the vocabulary the
// mock entailment oracle compares. "The cat, sat!" -> {"the","cat","sat"}.
std::vector<std::string> content_words(std::string_view text);

}  // namespace citegen

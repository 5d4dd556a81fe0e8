#include "citegen/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <cctype>
#include <fstream>

#include "citegen/errors.hpp"

namespace citegen {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool starts_new_sentence(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '"' || c == '\'';
}

// The non-whitespace run ending at (and including) position `dot`.
std::string_view token_ending_at(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !is_space(static_cast<unsigned char>(text[begin - 1]))) --begin;
  return text.substr(begin, dot - begin + 1);
}

}  // namespace

std::set<std::string> SegmenterOptions::default_abbreviations() {
  return {"Dr.",  "Mr.",  "Mrs.", "Ms.",  "Prof.", "St.", "Jr.",
          "Sr.",  "vs.",  "etc.", "e.g.", "i.e.",  "cf.", "Fig.",
          "No.",  "Vol.", "Co.",  "Inc.", "Ltd.",  "approx."};
}

std::set<std::string> load_abbreviations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open abbreviation list: " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) out.insert(line);
  }
  return out;
}

std::vector<SentenceSpan> split_sentences(std::string_view text,
                                          const SegmenterOptions& options) {
  return split_sentences(text, "", options);
}

std::vector<SentenceSpan> split_sentences(std::string_view text,
                                          std::string_view passage_id,
                                          const SegmenterOptions& options) {
  std::vector<SentenceSpan> spans;
  const std::size_t n = text.size();
  std::size_t pos = 0;
  while (pos < n) {
    while (pos < n && is_space(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= n) break;
    std::size_t begin = pos;
    std::size_t end = n;  // exclusive, trimmed later
    for (std::size_t i = pos; i < n; ++i) {
      char c = text[i];
      if (c != '.' && c != '?' && c != '!') continue;
      // Look ahead: whitespace, then a sentence-initial character.
      std::size_t j = i + 1;
      if (j >= n) {
        end = i + 1;
        break;
      }
      if (!is_space(static_cast<unsigned char>(text[j]))) continue;
      while (j < n && is_space(static_cast<unsigned char>(text[j]))) ++j;
      if (j >= n) {
        end = i + 1;
        break;
      }
      if (!starts_new_sentence(static_cast<unsigned char>(text[j]))) continue;
      if (c == '.' &&
          options.abbreviations.count(std::string(token_ending_at(text, i)))) {
        continue;
      }
      end = i + 1;
      break;
    }
    // Trim trailing whitespace inside [begin, end).
    std::size_t last = end;
    while (last > begin && is_space(static_cast<unsigned char>(text[last - 1]))) --last;
    if (last > begin) {
      SentenceSpan span;
      span.passage_id = std::string(passage_id);
      span.index = static_cast<int>(spans.size());
      span.text = std::string(text.substr(begin, last - begin));
      span.char_begin = begin;
      span.char_end = last;
      spans.push_back(std::move(span));
    }
    pos = end;
  }
  return spans;
}

std::string normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw InternalError("ICU NFC instance unavailable");

  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString composed = nfc->normalize(source, status);
  if (U_FAILURE(status)) throw InternalError("ICU normalization failed");

  std::string utf8;
  composed.toUTF8String(utf8);

  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  for (unsigned char c : utf8) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> content_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(current);
      current.clear();
    }
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (c >= 0x80) {
      current.push_back(static_cast<char>(c));  // keep non-ASCII bytes as-is
    } else {
      flush();
    }
  }
  flush();
  return words;
}

}  // namespace citegen

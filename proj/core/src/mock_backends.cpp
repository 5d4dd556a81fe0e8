#include "citegen/mock_backends.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string_view>

#include "citegen/errors.hpp"
#include "citegen/text.hpp"

namespace citegen {

namespace {

std::uint64_t fnv1a(std::uint64_t seed, std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull ^ (seed * 0x9e3779b97f4a7c15ull);
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 31;
  return h;
}

// Uniform double in (0, 1), pure function of the hash.
double unit_real(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 1.0) / 9007199254740994.0;
}

FreeGeneration cut_at_stop(std::string text, const std::vector<std::string>& stops) {
  std::size_t best = std::string::npos;
  for (const auto& stop : stops) {
    if (stop.empty()) continue;
    std::size_t at = text.find(stop);
    if (at != std::string::npos && at < best) best = at;
  }
  if (best == std::string::npos) return {std::move(text), true};
  return {text.substr(0, best), false};
}

constexpr std::array<std::string_view, 24> kLexicon = {
    "the",    "answer",  "shows",  "that",    "records", "indicate",
    "people", "systems", "often",  "reduce",  "static",  "results",
    "support", "this",   "claim",  "because", "sources", "describe",
    "common", "methods", "used",   "for",     "clothes", "drying"};

}  // namespace

std::vector<ScoredCandidate> UniformMockBackend::score_candidates(
    const std::string& context, const std::vector<TokenId>& candidates) {
  (void)context;
  if (candidates.empty()) throw UsageError("score_candidates with no candidates");
  std::vector<ScoredCandidate> scores;
  scores.reserve(candidates.size());
  double lp = -std::log(static_cast<double>(candidates.size()));
  for (TokenId id : candidates) scores.push_back({id, lp});
  return scores;
}

FreeGeneration UniformMockBackend::generate_free(
    const std::string& context, const std::vector<std::string>& stop_strings,
    int max_tokens) {
  (void)context;
  if (max_tokens < 1) throw UsageError("generate_free requires max_tokens >= 1");
  return cut_at_stop(free_reply_, stop_strings);
}

void ScriptedMockBackend::push_preference(std::vector<TokenId> ranked_best_first) {
  std::lock_guard<std::mutex> lock(mutex_);
  preferences_.push_back(std::move(ranked_best_first));
}

void ScriptedMockBackend::push_reply(std::string text) {
  std::lock_guard<std::mutex> lock(mutex_);
  replies_.push_back(std::move(text));
}

std::vector<ScoredCandidate> ScriptedMockBackend::score_candidates(
    const std::string& context, const std::vector<TokenId>& candidates) {
  if (candidates.empty()) throw UsageError("score_candidates with no candidates");
  std::lock_guard<std::mutex> lock(mutex_);
  score_contexts_.push_back(context);
  if (preferences_.empty())
    throw InternalError("scripted backend ran out of preference lists");
  std::vector<TokenId> ranked = std::move(preferences_.front());
  preferences_.pop_front();

  std::vector<ScoredCandidate> scores;
  scores.reserve(candidates.size());
  for (TokenId id : candidates) {
    auto it = std::find(ranked.begin(), ranked.end(), id);
    double lp = (it == ranked.end())
                    ? -20.0
                    : -0.1 * (static_cast<double>(it - ranked.begin()) + 1.0);
    scores.push_back({id, lp});
  }
  return renormalize(std::move(scores));
}

FreeGeneration ScriptedMockBackend::generate_free(
    const std::string& context, const std::vector<std::string>& stop_strings,
    int max_tokens) {
  if (max_tokens < 1) throw UsageError("generate_free requires max_tokens >= 1");
  std::lock_guard<std::mutex> lock(mutex_);
  free_contexts_.push_back(context);
  if (replies_.empty()) throw InternalError("scripted backend ran out of replies");
  std::string reply = std::move(replies_.front());
  replies_.pop_front();
  return cut_at_stop(std::move(reply), stop_strings);
}

SeededMockBackend::SeededMockBackend(std::uint64_t seed) : seed_(seed) {}

SeededMockBackend::SeededMockBackend(std::uint64_t seed,
                                     std::vector<std::string> corpus_sentences,
                                     double fabricate_probability)
    : seed_(seed),
      corpus_(std::move(corpus_sentences)),
      fabricate_probability_(fabricate_probability) {}

std::vector<ScoredCandidate> SeededMockBackend::score_candidates(
    const std::string& context, const std::vector<TokenId>& candidates) {
  if (candidates.empty()) throw UsageError("score_candidates with no candidates");
  std::uint64_t base = fnv1a(seed_, context);
  std::vector<ScoredCandidate> scores;
  scores.reserve(candidates.size());
  for (TokenId id : candidates) {
    double u = unit_real(mix(base, static_cast<std::uint64_t>(id) + 1));
    scores.push_back({id, std::log(u)});
  }
  return renormalize(std::move(scores));
}

FreeGeneration SeededMockBackend::generate_free(
    const std::string& context, const std::vector<std::string>& stop_strings,
    int max_tokens) {
  if (max_tokens < 1) throw UsageError("generate_free requires max_tokens >= 1");
  std::uint64_t base = fnv1a(seed_, context);

  bool reference_span = false;
  for (const auto& stop : stop_strings) {
    if (stop == std::string(kReferenceCloseTag)) reference_span = true;
  }

  std::string text;
  if (reference_span && !corpus_.empty()) {
    if (unit_real(mix(base, 7)) < fabricate_probability_) {
      text = "Unsourced text that matches no passage sentence.";
    } else {
      text = corpus_[mix(base, 11) % corpus_.size()];
      // Occasionally quote two sentences.
      if (unit_real(mix(base, 13)) < 0.35 && corpus_.size() > 1) {
        std::size_t second = mix(base, 17) % corpus_.size();
        text += " " + corpus_[second];
      }
    }
  } else {
    int words = 3 + static_cast<int>(mix(base, 19) % 6);
    words = std::min(words, std::max(1, max_tokens - 1));
    for (int i = 0; i < words; ++i) {
      if (i) text.push_back(' ');
      text += kLexicon[mix(base, 23 + static_cast<std::uint64_t>(i)) % kLexicon.size()];
    }
    text.push_back('.');
  }

  if (!stop_strings.empty()) text += " " + stop_strings.front();
  return cut_at_stop(std::move(text), stop_strings);
}

EntailmentVerdict ContainmentNliBackend::entails(const std::string& premise,
                                                 const std::string& hypothesis) {
  EntailmentVerdict verdict;
  verdict.threshold_used = 1.0;
  auto premise_words = content_words(premise);
  if (premise_words.empty()) {
    verdict.score = 0.0;
    verdict.entailed = false;
    return verdict;
  }
  std::set<std::string> vocabulary(premise_words.begin(), premise_words.end());
  auto hypothesis_words = content_words(hypothesis);
  if (hypothesis_words.empty()) {
    verdict.score = 1.0;
    verdict.entailed = true;
    return verdict;
  }
  std::size_t hits = 0;
  for (const auto& word : hypothesis_words) hits += vocabulary.count(word);
  verdict.score = static_cast<double>(hits) / static_cast<double>(hypothesis_words.size());
  verdict.entailed = verdict.score >= verdict.threshold_used;
  return verdict;
}

void ScriptedSegmenterBackend::script(const std::string& answer,
                                      std::vector<ClauseCitation> pairs) {
  scripts_[answer] = std::move(pairs);
}

void ScriptedSegmenterBackend::fail_answer(const std::string& answer) {
  failures_[answer] = true;
}

std::vector<ClauseCitation> ScriptedSegmenterBackend::segment_answer(
    const std::string& question, const PassageSet& passages, const std::string& answer) {
  (void)question;
  (void)passages;
  if (answer.empty()) throw UsageError("segment_answer requires a non-empty answer");
  if (failures_.count(answer))
    throw SegmentationFormatError("segmenter reply did not parse");
  auto it = scripts_.find(answer);
  if (it == scripts_.end())
    throw InternalError("no segmentation script for answer: " + answer);
  return it->second;
}

std::vector<ClauseCitation> HeuristicSegmenterBackend::segment_answer(
    const std::string& question, const PassageSet& passages, const std::string& answer) {
  (void)question;
  if (answer.empty()) throw UsageError("segment_answer requires a non-empty answer");
  std::vector<ClauseCitation> out;
  for (const auto& span : split_sentences(answer)) {
    std::string clause = normalize(span.text);
    auto clause_words = content_words(clause);
    std::set<std::string> wanted(clause_words.begin(), clause_words.end());

    // Greedy cover: add the sentence with the most still-uncovered clause
    // words, up to three sentences, in passage order.
    std::vector<const InventorySentence*> picked;
    for (int round = 0; round < 3 && !wanted.empty(); ++round) {
      const InventorySentence* best = nullptr;
      std::size_t best_overlap = 0;
      for (const auto& entry : passages.sentence_inventory()) {
        if (std::find(picked.begin(), picked.end(), &entry) != picked.end()) continue;
        std::set<std::string> entry_words;
        for (const auto& word : content_words(entry.text)) entry_words.insert(word);
        std::size_t overlap = 0;
        for (const auto& word : entry_words) overlap += wanted.count(word);
        if (overlap > best_overlap) {
          best_overlap = overlap;
          best = &entry;
        }
      }
      if (!best) break;
      picked.push_back(best);
      for (const auto& word : content_words(best->text)) wanted.erase(word);
    }

    ClauseCitation pair;
    pair.clause = std::move(clause);
    for (const auto* entry : picked) {
      if (!pair.citation.empty()) pair.citation.push_back(' ');
      pair.citation += entry->text;
    }
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace citegen

#include "citegen/answer.hpp"

#include <algorithm>
#include <array>

#include "citegen/errors.hpp"
#include "citegen/tokenizer.hpp"

namespace citegen {

PassageSet PassageSet::from_passages(std::vector<Passage> passages,
                                     const SegmenterOptions& options) {
  PassageSet set;
  set.passages_ = std::move(passages);
  for (const auto& passage : set.passages_) {
    auto spans = split_sentences(passage.text, passage.id, options);
    for (const auto& span : spans) {
      InventorySentence entry;
      entry.passage_id = passage.id;
      entry.sentence_index = span.index;
      entry.text = normalize(span.text);
      set.by_text_[entry.text].push_back({entry.passage_id, entry.sentence_index});
      set.inventory_.push_back(std::move(entry));
    }
  }
  return set;
}

std::vector<SentenceRef> PassageSet::find_sentence(std::string_view sentence) const {
  auto it = by_text_.find(normalize(sentence));
  if (it == by_text_.end()) return {};
  return it->second;
}

const InventorySentence& PassageSet::sentence_at(const SentenceRef& ref) const {
  for (const auto& entry : inventory_) {
    if (entry.passage_id == ref.passage_id && entry.sentence_index == ref.sentence_index)
      return entry;
  }
  throw UsageError("sentence ref not in inventory: " + ref.passage_id + "/" +
                   std::to_string(ref.sentence_index));
}

std::vector<std::string> PassageSet::inventory_texts() const {
  std::vector<std::string> texts;
  texts.reserve(inventory_.size());
  for (const auto& entry : inventory_) texts.push_back(entry.text);
  return texts;
}

std::vector<SentenceRef> find_sentence_in_passages(std::string_view sentence,
                                                   const PassageSet& passages) {
  return passages.find_sentence(sentence);
}

std::string_view to_string(GenMode mode) {
  switch (mode) {
    case GenMode::unified: return "unified";
    case GenMode::interleave: return "interleave";
    case GenMode::prompt: return "prompt";
  }
  return "unified";
}

std::string_view to_string(TracePhase phase) {
  switch (phase) {
    case TracePhase::reference: return "reference";
    case TracePhase::claim: return "claim";
    case TracePhase::connective: return "connective";
    case TracePhase::tag: return "tag";
  }
  return "tag";
}

std::string_view to_string(ForcedEvent event) {
  switch (event) {
    case ForcedEvent::forced_close_reference: return "forced-close-reference";
    case ForcedEvent::suppressed_end: return "suppressed-end";
    case ForcedEvent::forced_end: return "forced-end";
  }
  return "forced-end";
}

GenMode gen_mode_from_string(std::string_view s) {
  if (s == "unified") return GenMode::unified;
  if (s == "interleave") return GenMode::interleave;
  if (s == "prompt") return GenMode::prompt;
  throw ValidationError("unknown generation mode: " + std::string(s));
}

namespace {

enum class TagKind { ref_open, ref_close, claim_open, claim_close };

struct TagHit {
  TagKind kind;
  std::size_t begin = 0;
  std::size_t end = 0;
};

constexpr std::array<std::pair<TagKind, std::string_view>, 4> kTags = {{
    {TagKind::ref_open, kReferenceOpenTag},
    {TagKind::ref_close, kReferenceCloseTag},
    {TagKind::claim_open, kClaimOpenTag},
    {TagKind::claim_close, kClaimCloseTag},
}};

// All tag occurrences in textual order. None of the four literals occurs
// inside another, so a leftmost scan is unambiguous.
std::vector<TagHit> scan_tags(std::string_view text) {
  std::vector<TagHit> hits;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = std::string_view::npos;
    TagHit hit;
    for (const auto& [kind, literal] : kTags) {
      std::size_t at = text.find(literal, pos);
      if (at != std::string_view::npos && at < next) {
        next = at;
        hit = {kind, at, at + literal.size()};
      }
    }
    if (next == std::string_view::npos) break;
    hits.push_back(hit);
    pos = hit.end;
  }
  return hits;
}

bool whitespace_only(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Strips any of the four tag literals that survive in untagged text so that
// baseline sentences never carry tag tokens into the claims.
std::string strip_tag_literals(std::string_view s) {
  std::string out(s);
  for (const auto& [kind, literal] : kTags) {
    (void)kind;
    std::size_t at;
    while ((at = out.find(literal)) != std::string::npos) out.erase(at, literal.size());
  }
  return out;
}

void emit_untagged_sentences(std::string_view segment, AttributedAnswer& answer,
                             std::vector<std::string>& connectives) {
  std::string cleaned = strip_tag_literals(segment);
  for (const auto& span : split_sentences(cleaned)) {
    RefClaimPair pair;
    pair.claim_text = normalize(span.text);
    if (pair.claim_text.empty()) continue;
    answer.pairs.push_back(std::move(pair));
    connectives.push_back("");
    connectives.push_back("");
  }
}

bool ends_sentence(std::string_view s) {
  if (s.empty()) return false;
  char c = s.back();
  return c == '.' || c == '?' || c == '!';
}

// Splits the filler before a tag unit: complete sentences become untagged
// pairs, a trailing unterminated fragment ("We can know that:") is the
// unit's connective.
std::string consume_filler(std::string_view filler, AttributedAnswer& answer,
                           std::vector<std::string>& connectives) {
  std::string cleaned = strip_tag_literals(filler);
  auto spans = split_sentences(cleaned);
  std::string connective;
  if (!spans.empty() && !ends_sentence(spans.back().text)) {
    connective = normalize(spans.back().text);
    spans.pop_back();
  }
  for (const auto& span : spans) {
    RefClaimPair pair;
    pair.claim_text = normalize(span.text);
    if (pair.claim_text.empty()) continue;
    answer.pairs.push_back(std::move(pair));
    connectives.push_back("");
    connectives.push_back("");
  }
  return connective;
}

AttributedAnswer parse_strict(std::string_view text, const std::vector<TagHit>& hits) {
  AttributedAnswer answer;
  answer.raw_text = std::string(text);
  std::vector<std::string> connectives;

  // Expected cycle: ref_open, ref_close, claim_open, claim_close.
  constexpr std::array<TagKind, 4> cycle = {TagKind::ref_open, TagKind::ref_close,
                                            TagKind::claim_open, TagKind::claim_close};
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i].kind != cycle[i % 4])
      throw MalformedOutputError("tag out of order", hits[i].begin);
  }
  if (hits.size() % 4 != 0)
    throw MalformedOutputError("unclosed pair at end of output", text.size());

  std::size_t cursor = 0;  // end of the previous tag / start of current filler
  for (std::size_t i = 0; i < hits.size(); i += 4) {
    const TagHit& ref_open = hits[i];
    const TagHit& ref_close = hits[i + 1];
    const TagHit& claim_open = hits[i + 2];
    const TagHit& claim_close = hits[i + 3];

    RefClaimPair pair;
    std::string ref_connective =
        normalize(text.substr(cursor, ref_open.begin - cursor));
    std::string_view ref_body =
        text.substr(ref_open.end, ref_close.begin - ref_open.end);
    for (const auto& span : split_sentences(ref_body))
      pair.reference_sentences.push_back(normalize(span.text));

    std::string claim_connective =
        normalize(text.substr(ref_close.end, claim_open.begin - ref_close.end));
    pair.claim_text =
        normalize(text.substr(claim_open.end, claim_close.begin - claim_open.end));
    if (pair.claim_text.empty())
      throw MalformedOutputError("empty claim body", claim_open.end);

    answer.pairs.push_back(std::move(pair));
    connectives.push_back(std::move(ref_connective));
    connectives.push_back(std::move(claim_connective));
    cursor = claim_close.end;
  }

  std::string_view tail = text.substr(cursor);
  if (!whitespace_only(tail))
    throw MalformedOutputError("content after final closing tag", cursor);
  if (answer.pairs.empty() && !whitespace_only(text))
    throw MalformedOutputError("no tagged pairs in model output", 0);

  answer.connectives = std::move(connectives);
  return answer;
}

AttributedAnswer parse_lenient(std::string_view text, const std::vector<TagHit>& hits) {
  AttributedAnswer answer;
  answer.raw_text = std::string(text);
  std::vector<std::string> connectives;

  std::size_t cursor = 0;
  std::size_t i = 0;
  while (i < hits.size()) {
    // A well-formed unit is ref_open..ref_close [claim_open..claim_close],
    // or a bare claim_open..claim_close. Anything else is treated as text.
    if (hits[i].kind == TagKind::ref_open && i + 1 < hits.size() &&
        hits[i + 1].kind == TagKind::ref_close) {
      bool has_claim = i + 3 < hits.size() && hits[i + 2].kind == TagKind::claim_open &&
                       hits[i + 3].kind == TagKind::claim_close;
      std::string ref_conn = consume_filler(text.substr(cursor, hits[i].begin - cursor),
                                            answer, connectives);
      if (has_claim) {
        RefClaimPair pair;
        std::string_view ref_body =
            text.substr(hits[i].end, hits[i + 1].begin - hits[i].end);
        for (const auto& span : split_sentences(ref_body))
          pair.reference_sentences.push_back(normalize(span.text));
        pair.claim_text = normalize(
            text.substr(hits[i + 2].end, hits[i + 3].begin - hits[i + 2].end));
        std::string claim_conn =
            normalize(text.substr(hits[i + 1].end, hits[i + 2].begin - hits[i + 1].end));
        if (!pair.claim_text.empty()) {
          answer.pairs.push_back(std::move(pair));
          connectives.push_back(std::move(ref_conn));
          connectives.push_back(std::move(claim_conn));
        }
        cursor = hits[i + 3].end;
        i += 4;
      } else {
        // Dangling reference block: no claim to attach, drop it.
        cursor = hits[i + 1].end;
        i += 2;
      }
      continue;
    }
    if (hits[i].kind == TagKind::claim_open && i + 1 < hits.size() &&
        hits[i + 1].kind == TagKind::claim_close) {
      std::string claim_conn = consume_filler(
          text.substr(cursor, hits[i].begin - cursor), answer, connectives);
      RefClaimPair pair;
      pair.claim_text =
          normalize(text.substr(hits[i].end, hits[i + 1].begin - hits[i].end));
      if (!pair.claim_text.empty()) {
        answer.pairs.push_back(std::move(pair));
        connectives.push_back("");
        connectives.push_back(std::move(claim_conn));
      }
      cursor = hits[i + 1].end;
      i += 2;
      continue;
    }
    ++i;  // stray tag: leave it to strip_tag_literals
  }
  emit_untagged_sentences(text.substr(cursor), answer, connectives);
  answer.connectives = std::move(connectives);
  return answer;
}

}  // namespace

AttributedAnswer parse_attributed(std::string_view text, bool strict) {
  auto hits = scan_tags(text);
  return strict ? parse_strict(text, hits) : parse_lenient(text, hits);
}

std::string render_attributed(const AttributedAnswer& answer) {
  if (answer.pairs.empty()) return "";
  const bool stored = answer.has_stored_connectives();
  std::string out;
  auto append = [&out](std::string_view piece) {
    if (piece.empty()) return;
    if (!out.empty()) out.push_back(' ');
    out += piece;
  };
  for (std::size_t i = 0; i < answer.pairs.size(); ++i) {
    const RefClaimPair& pair = answer.pairs[i];
    if (pair.claim_text.empty())
      throw UsageError("cannot render a pair with an empty claim");
    std::string_view ref_conn =
        stored ? std::string_view(answer.connectives[2 * i]) : kDefaultReferenceConnective;
    std::string_view claim_conn =
        stored ? std::string_view(answer.connectives[2 * i + 1]) : kDefaultClaimConnective;
    append(ref_conn);
    append(kReferenceOpenTag);
    for (const auto& sentence : pair.reference_sentences) append(sentence);
    append(kReferenceCloseTag);
    append(claim_conn);
    append(kClaimOpenTag);
    append(pair.claim_text);
    append(kClaimCloseTag);
  }
  return out;
}

std::string concat_claims(const AttributedAnswer& answer) {
  std::string out;
  for (const auto& pair : answer.pairs) {
    if (pair.claim_text.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += pair.claim_text;
  }
  return out;
}

}  // namespace citegen

#include "citegen/genpipe.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include "citegen/errors.hpp"
#include "citegen/text.hpp"

namespace citegen {

void GenConfig::validate() const {
  if (min_pairs < 1) throw ValidationError("min_pairs must be >= 1");
  if (min_pairs > max_pairs)
    throw ValidationError("min_pairs (" + std::to_string(min_pairs) +
                          ") exceeds max_pairs (" + std::to_string(max_pairs) + ")");
  if (max_ref_sentences_per_pair < 1)
    throw ValidationError("max_ref_sentences_per_pair must be >= 1");
  if (max_claim_tokens < 1) throw ValidationError("max_claim_tokens must be >= 1");
}

std::string build_prompt(const Question& question, const PassageSet& passages) {
  std::ostringstream out;
  out << "Answer the question using only the numbered reference passages. "
         "Before each answer sentence, quote the exact passage sentences it "
         "relies on between <reference> and </reference>, then give the "
         "answer sentence between <claim> and </claim>.\n";
  out << "# Question: " << question.text << "\n# References:\n";
  int number = 1;
  for (const auto& passage : passages.passages()) {
    out << '[' << number++ << "] ";
    if (passage.title && !passage.title->empty()) out << '(' << *passage.title << ") ";
    out << passage.text << '\n';
  }
  out << "# Output:";
  return out.str();
}

namespace {

void append_piece(std::string& history, std::string_view piece) {
  if (piece.empty()) return;
  if (!history.empty()) history.push_back(' ');
  history += piece;
}

TokenId first_token(const TokenizerContract& tokenizer, std::string_view marker) {
  TokenSeq seq = tokenizer.encode(marker);
  if (seq.ids.empty())
    throw ConfigurationError("marker encodes to zero tokens: " + std::string(marker));
  return seq.ids.front();
}

// Scores {next pair opener, end marker} and reports whether the backend
// prefers to stop after the current pair.
bool prefers_end(GenerationBackend& backend, const std::string& context,
                 const TokenizerContract& tokenizer) {
  TokenId open_id = first_token(tokenizer, kReferenceOpenTag);
  TokenId end_id = first_token(tokenizer, kAnswerEndMarker);
  std::vector<TokenId> candidates = {open_id, end_id};
  std::sort(candidates.begin(), candidates.end());
  auto scored = backend.score_candidates(context, candidates);
  return pick_argmax(scored) == end_id;
}

std::string scoring_context(const SessionContext& session) {
  if (session.history.empty()) return session.prompt;
  return session.prompt + "\n" + session.history;
}

}  // namespace

ReferencePart generate_reference_part(SessionContext& session, const PrefixTree* tree,
                                      GenerationBackend& backend, const GenConfig& config,
                                      const TokenizerContract* tokenizer,
                                      GenerationTrace& trace, int pair_index) {
  ReferencePart part;
  int tokens = 0;

  if (!config.constrained) {
    auto free = backend.generate_free(scoring_context(session),
                                      {std::string(kReferenceCloseTag)},
                                      config.max_claim_tokens);
    std::string body = normalize(free.text);
    for (const auto& span : split_sentences(body))
      part.sentences.push_back(normalize(span.text));
    tokens = static_cast<int>(word_count(body));
    trace.steps.push_back({TracePhase::reference, tokens});
    return part;
  }

  if (tree == nullptr || tree->leaf_count() == 0)
    throw ConfigurationError("constrained decoding requires a non-empty prefix tree");
  if (tokenizer == nullptr)
    throw ConfigurationError("constrained decoding requires a tokenizer");

  TokenId closing = first_token(*tokenizer, kReferenceCloseTag);
  if (tree->contains_token(closing))
    throw ConfigurationError("closing tag token collides with the sentence alphabet");

  TrieWalker walker(*tree);
  std::string committed_text;
  while (true) {
    auto candidates = walker.valid_next_tokens(closing);
    if (candidates.empty())
      throw InternalError("constrained walker produced no candidates");
    // Skip the backend when closing is the only legal move.
    if (candidates.size() == 1 && candidates.front() == closing) {
      part.forced_close = true;
      trace.forced_events.emplace_back(pair_index, ForcedEvent::forced_close_reference);
      break;
    }

    std::string context = scoring_context(session);
    if (!committed_text.empty()) context += " " + committed_text;
    if (!walker.emitted().empty()) {
      TokenSeq partial{walker.emitted(), tokenizer->name()};
      context += " " + tokenizer->decode(partial);
    }

    auto scored = backend.score_candidates(context, candidates);
    TokenId chosen = pick_argmax(scored);
    ++tokens;

    if (chosen == closing) {
      if (walker.has_pending_leaf()) walker.commit_pending();
      break;
    }

    int before = walker.completed_count();
    walker.advance(chosen);
    if (walker.completed_count() > before) {
      committed_text.clear();
      for (const auto& text : walker.completed_texts())
        append_piece(committed_text, text);
      if (walker.completed_count() >= config.max_ref_sentences_per_pair) {
        part.forced_close = true;
        trace.forced_events.emplace_back(pair_index,
                                         ForcedEvent::forced_close_reference);
        break;
      }
      if (!walker.has_unused_continuation()) {
        part.forced_close = true;
        trace.forced_events.emplace_back(pair_index,
                                         ForcedEvent::forced_close_reference);
        break;
      }
    }
  }

  if (walker.has_pending_leaf()) walker.commit_pending();
  part.sentences = walker.completed_texts();
  part.provenance = walker.completed_refs();
  trace.steps.push_back({TracePhase::reference, tokens});
  return part;
}

std::string generate_claim_part(SessionContext& session, GenerationBackend& backend,
                                const GenConfig& config, GenerationTrace& trace,
                                int pair_index) {
  std::string context = config.mode == GenMode::interleave ? session.history
                                                           : scoring_context(session);
  auto free = backend.generate_free(context, {std::string(kClaimCloseTag)},
                                    config.max_claim_tokens);
  std::string claim = normalize(free.text);
  if (free.truncated) trace.truncated_pairs.push_back(pair_index);
  if (claim.empty())
    throw ProtocolError("claim backend returned an empty claim for pair " +
                        std::to_string(pair_index));
  trace.steps.push_back({TracePhase::claim, static_cast<int>(word_count(claim))});
  return claim;
}

namespace {

void emit_connective(SessionContext& session, GenerationTrace& trace,
                     std::string_view text) {
  if (text.empty()) return;
  append_piece(session.history, text);
  trace.steps.push_back({TracePhase::connective, static_cast<int>(word_count(text))});
}

void emit_tag(SessionContext& session, GenerationTrace& trace, std::string_view tag) {
  append_piece(session.history, tag);
  trace.steps.push_back({TracePhase::tag, 1});
}

GenerationOutcome run_pair_loop(const Question& question, const PassageSet& passages,
                                GenerationBackend& refer_backend,
                                GenerationBackend& claim_backend,
                                const GenConfig& config,
                                const TokenizerContract& tokenizer,
                                const PrefixTree* tree, bool model_connectives) {
  GenerationOutcome outcome;
  outcome.trace.mode = config.mode;

  std::unique_ptr<PrefixTree> owned_tree;
  if (config.constrained && tree == nullptr) {
    owned_tree = std::make_unique<PrefixTree>(PrefixTree::build(passages, tokenizer));
    tree = owned_tree.get();
  }

  SessionContext session;
  session.prompt = build_prompt(question, passages);

  std::vector<std::string> connectives;
  for (int pair_index = 0;; ++pair_index) {
    std::string ref_conn(kDefaultReferenceConnective);
    if (model_connectives) {
      auto free = refer_backend.generate_free(scoring_context(session),
                                              {std::string(kReferenceOpenTag)},
                                              config.max_claim_tokens);
      ref_conn = normalize(free.text);
    }
    emit_connective(session, outcome.trace, ref_conn);
    emit_tag(session, outcome.trace, kReferenceOpenTag);

    ReferencePart ref =
        generate_reference_part(session, tree, refer_backend, config,
                                &tokenizer, outcome.trace, pair_index);
    for (const auto& sentence : ref.sentences) append_piece(session.history, sentence);
    emit_tag(session, outcome.trace, kReferenceCloseTag);

    std::string claim_conn(kDefaultClaimConnective);
    if (model_connectives) {
      auto free = refer_backend.generate_free(scoring_context(session),
                                              {std::string(kClaimOpenTag)},
                                              config.max_claim_tokens);
      claim_conn = normalize(free.text);
    }
    emit_connective(session, outcome.trace, claim_conn);
    emit_tag(session, outcome.trace, kClaimOpenTag);

    std::string claim = generate_claim_part(session, claim_backend, config,
                                            outcome.trace, pair_index);
    append_piece(session.history, claim);
    emit_tag(session, outcome.trace, kClaimCloseTag);

    RefClaimPair pair;
    pair.reference_sentences = ref.sentences;
    pair.claim_text = claim;
    pair.provenance = ref.provenance;
    outcome.answer.pairs.push_back(std::move(pair));
    connectives.push_back(ref_conn);
    connectives.push_back(claim_conn);

    int pair_count = pair_index + 1;
    if (pair_count >= config.max_pairs) {
      outcome.trace.forced_events.emplace_back(pair_index, ForcedEvent::forced_end);
      break;
    }
    if (prefers_end(refer_backend, scoring_context(session), tokenizer)) {
      if (pair_count >= config.min_pairs) break;
      outcome.trace.forced_events.emplace_back(pair_index, ForcedEvent::suppressed_end);
    }
  }

  outcome.answer.raw_text = session.history;
  outcome.answer.connectives = std::move(connectives);

  // The emitted stream must parse back into the same pair structure.
  AttributedAnswer reparsed = parse_attributed(outcome.answer.raw_text, /*strict=*/true);
  if (reparsed.pairs.size() != outcome.answer.pairs.size())
    throw InternalError("generated answer does not round-trip through the parser");
  return outcome;
}

}  // namespace

GenerationOutcome generate_interleaved(const Question& question, const PassageSet& passages,
                                       GenerationBackend& refer_backend,
                                       GenerationBackend& claim_backend,
                                       const GenConfig& config,
                                       const TokenizerContract& tokenizer,
                                       const PrefixTree* tree) {
  config.validate();
  if (config.mode != GenMode::interleave)
    throw ConfigurationError("generate_interleaved requires mode=interleave");
  return run_pair_loop(question, passages, refer_backend, claim_backend, config,
                       tokenizer, tree, /*model_connectives=*/false);
}

GenerationOutcome generate_unified(const Question& question, const PassageSet& passages,
                                   GenerationBackend& backend, const GenConfig& config,
                                   const TokenizerContract* tokenizer,
                                   const PrefixTree* tree) {
  config.validate();
  if (config.mode == GenMode::interleave)
    throw ConfigurationError("generate_unified requires mode=unified or mode=prompt");

  if (config.mode == GenMode::prompt) {
    GenerationOutcome outcome;
    outcome.trace.mode = GenMode::prompt;
    SessionContext session;
    session.prompt = build_prompt(question, passages);
    auto free = backend.generate_free(session.prompt, {std::string(kAnswerEndMarker)},
                                      config.max_claim_tokens * config.max_pairs);
    outcome.answer = parse_attributed(free.text, /*strict=*/false);
    if (free.truncated) outcome.trace.truncated_pairs.push_back(0);
    return outcome;
  }

  if (tokenizer == nullptr)
    throw ConfigurationError("unified generation requires a tokenizer");
  return run_pair_loop(question, passages, backend, backend, config, *tokenizer, tree,
                       /*model_connectives=*/true);
}

}  // namespace citegen

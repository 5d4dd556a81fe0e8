#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citegen/answer.hpp"
#include "citegen/backends.hpp"

namespace citegen {

// One evaluation example in the ALCE-style shape: docs always, short-answer
// groups for ASQA-style correctness, gold claims for ELI5-style.
struct EvalExample {
  std::string id;
  std::string question;
  PassageSet docs;
  std::optional<std::vector<std::vector<std::string>>> short_answer_groups;
  std::optional<std::vector<std::string>> gold_claims;
};

// Exact ratio as a (numerator, denominator) pair; den == 0 marks the metric
// undefined for the example (excluded from macro averages).
struct MetricCount {
  std::size_t num = 0;
  std::size_t den = 0;

  bool defined() const { return den > 0; }
  double ratio() const { return defined() ? static_cast<double>(num) / den : 0.0; }
};

struct ExampleMetrics {
  std::string id;
  MetricCount cas;
  MetricCount crs;
  MetricCount cr;
  MetricCount ar;
  MetricCount em_recall;
  MetricCount claim_recall;
  std::size_t citation_words = 0;
  std::size_t claim_words = 0;
  std::optional<double> mauve;  // populated only from an external scorer
};

struct MacroValue {
  double mean = 0.0;
  std::size_t defined_examples = 0;
};

struct MetricsReport {
  std::vector<ExampleMetrics> per_example;
  MacroValue cas, crs, cr, ar, em_recall, claim_recall;
  MacroValue citation_words, claim_words;
  std::optional<MacroValue> mauve;
};

// One answer sentence with the pair it came from (nullopt for pairs parsed
// out of untagged baseline text never happens here: the pair index is always
// known; unattributed means the pair has no reference sentences).
struct AnswerSentence {
  std::string text;
  std::size_t pair_index = 0;
};

std::vector<AnswerSentence> answer_sentences(const AttributedAnswer& answer);

// Fraction of answer sentences entailed by their pair's references joined
// into one premise; sentences of citation-less pairs count against.
MetricCount compute_cas(const AttributedAnswer& answer, NliBackend& nli);

// Fraction of reference sentences that are not redundant. A sentence is
// redundant when the claim stays entailed after removing it (leave-one-out);
// a pair's only sentence is never redundant since the empty premise entails
// nothing.
MetricCount compute_crs(const AttributedAnswer& answer, NliBackend& nli);

// Fraction of reference sentences found verbatim (after normalization) in
// the docs.
MetricCount compute_cr(const AttributedAnswer& answer, const PassageSet& docs);

// Fraction of answer sentences whose pair cites at least one sentence.
MetricCount compute_ar(const AttributedAnswer& answer);

// Fraction of short-answer groups with any alias contained in the answer
// (case-folded substring over normalized text).
MetricCount compute_em_recall(const std::string& answer_text,
                              const std::vector<std::vector<std::string>>& groups);

// Fraction of gold claims entailed by the full answer text.
MetricCount compute_claim_recall(const std::string& answer_text,
                                 const std::vector<std::string>& gold_claims,
                                 NliBackend& nli);

struct AnswerLengths {
  std::size_t citation_words = 0;
  std::size_t claim_words = 0;
};
AnswerLengths compute_lengths(const AttributedAnswer& answer);

// Rewrites ALCE-style bracket citations ([1], [2]...) in citation-less
// pairs: the cited passages' sentences become the pair's references and the
// markers are stripped from the claim. 1-based indices into docs; unknown
// indices are just stripped. Applied to baseline parses before metrics.
void attach_bracket_citations(AttributedAnswer& answer, const PassageSet& docs);

struct EvalOptions {
  bool map_alce_brackets = true;
  std::optional<std::map<std::string, double>> mauve_scores;
  int concurrency = 4;
};

struct EvalAnswer {
  std::string id;
  AttributedAnswer answer;
};

// Runs every metric over id-aligned examples and answers; ids must match
// one-to-one or the run aborts listing the orphans. Per-example values plus
// macro averages over the examples where each metric is defined.
MetricsReport evaluate_run(const std::vector<EvalExample>& examples,
                           const std::vector<EvalAnswer>& answers, NliBackend& nli,
                           const EvalOptions& options = {});

// --- file formats ------------------------------------------------------------

EvalExample eval_example_from_json(const std::string& line,
                                   const std::string& fallback_id,
                                   const SegmenterOptions& options = {});
std::string example_metrics_to_json(const ExampleMetrics& metrics);
std::string report_summary_to_json(const MetricsReport& report);
// Plain-text table: correctness, citation quality, verifiability columns.
std::string report_table(const MetricsReport& report);

}  // namespace citegen

#include "citegen/eval.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

#include "citegen/errors.hpp"
#include "citegen/text.hpp"
#include "internal/parallel.hpp"

namespace citegen {

using nlohmann::json;

namespace {

std::string join_with_space(const std::vector<std::string>& parts,
                            std::size_t skip_index = static_cast<std::size_t>(-1)) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i == skip_index) continue;
    if (!out.empty()) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

std::string fold_case(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool entails_nonempty(NliBackend& nli, const std::string& premise,
                      const std::string& hypothesis) {
  if (premise.empty()) return false;  // empty premise supports nothing
  return nli.entails(premise, hypothesis).entailed;
}

}  // namespace

std::vector<AnswerSentence> answer_sentences(const AttributedAnswer& answer) {
  std::vector<AnswerSentence> sentences;
  for (std::size_t i = 0; i < answer.pairs.size(); ++i) {
    for (const auto& span : split_sentences(answer.pairs[i].claim_text)) {
      sentences.push_back({normalize(span.text), i});
    }
  }
  return sentences;
}

MetricCount compute_cas(const AttributedAnswer& answer, NliBackend& nli) {
  MetricCount count;
  for (const auto& sentence : answer_sentences(answer)) {
    ++count.den;
    std::string premise =
        join_with_space(answer.pairs[sentence.pair_index].reference_sentences);
    if (entails_nonempty(nli, premise, sentence.text)) ++count.num;
  }
  return count;
}

MetricCount compute_crs(const AttributedAnswer& answer, NliBackend& nli) {
  MetricCount count;
  for (const auto& pair : answer.pairs) {
    const auto& refs = pair.reference_sentences;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      ++count.den;
      std::string without = join_with_space(refs, i);
      bool redundant = entails_nonempty(nli, without, pair.claim_text);
      if (!redundant) ++count.num;
    }
  }
  return count;
}

MetricCount compute_cr(const AttributedAnswer& answer, const PassageSet& docs) {
  MetricCount count;
  for (const auto& pair : answer.pairs) {
    for (const auto& sentence : pair.reference_sentences) {
      ++count.den;
      if (!docs.find_sentence(sentence).empty()) ++count.num;
    }
  }
  return count;
}

MetricCount compute_ar(const AttributedAnswer& answer) {
  MetricCount count;
  for (const auto& sentence : answer_sentences(answer)) {
    ++count.den;
    if (!answer.pairs[sentence.pair_index].reference_sentences.empty()) ++count.num;
  }
  return count;
}

MetricCount compute_em_recall(const std::string& answer_text,
                              const std::vector<std::vector<std::string>>& groups) {
  MetricCount count;
  std::string haystack = fold_case(normalize(answer_text));
  for (const auto& aliases : groups) {
    ++count.den;
    for (const auto& alias : aliases) {
      std::string needle = fold_case(normalize(alias));
      if (!needle.empty() && haystack.find(needle) != std::string::npos) {
        ++count.num;
        break;
      }
    }
  }
  return count;
}

MetricCount compute_claim_recall(const std::string& answer_text,
                                 const std::vector<std::string>& gold_claims,
                                 NliBackend& nli) {
  MetricCount count;
  for (const auto& claim : gold_claims) {
    ++count.den;
    if (entails_nonempty(nli, answer_text, claim)) ++count.num;
  }
  return count;
}

AnswerLengths compute_lengths(const AttributedAnswer& answer) {
  AnswerLengths lengths;
  std::string citations;
  for (const auto& pair : answer.pairs) {
    for (const auto& sentence : pair.reference_sentences) {
      if (!citations.empty()) citations.push_back(' ');
      citations += sentence;
    }
  }
  lengths.citation_words = word_count(citations);
  lengths.claim_words = word_count(concat_claims(answer));
  return lengths;
}

void attach_bracket_citations(AttributedAnswer& answer, const PassageSet& docs) {
  for (auto& pair : answer.pairs) {
    if (!pair.reference_sentences.empty()) continue;
    std::set<std::size_t> cited;  // 1-based passage numbers
    std::string stripped;
    const std::string& text = pair.claim_text;
    std::size_t pos = 0;
    while (pos < text.size()) {
      if (text[pos] == '[') {
        std::size_t end = text.find(']', pos);
        if (end != std::string::npos && end > pos + 1) {
          std::string inside = text.substr(pos + 1, end - pos - 1);
          bool digits = !inside.empty() &&
                        std::all_of(inside.begin(), inside.end(),
                                    [](unsigned char c) { return std::isdigit(c); });
          if (digits) {
            cited.insert(static_cast<std::size_t>(std::stoul(inside)));
            pos = end + 1;
            continue;
          }
        }
      }
      stripped.push_back(text[pos]);
      ++pos;
    }
    if (cited.empty()) continue;
    pair.claim_text = normalize(stripped);
    for (std::size_t number : cited) {
      if (number == 0 || number > docs.passages().size()) continue;
      const std::string& passage_id = docs.passages()[number - 1].id;
      for (const auto& entry : docs.sentence_inventory()) {
        if (entry.passage_id == passage_id)
          pair.reference_sentences.push_back(entry.text);
      }
    }
  }
}

namespace {

void accumulate(MacroValue& macro, const MetricCount& count, double& sum) {
  if (!count.defined()) return;
  ++macro.defined_examples;
  sum += count.ratio();
}

}  // namespace

MetricsReport evaluate_run(const std::vector<EvalExample>& examples,
                           const std::vector<EvalAnswer>& answers, NliBackend& nli,
                           const EvalOptions& options) {
  std::map<std::string, const EvalAnswer*> by_id;
  for (const auto& answer : answers) {
    if (!by_id.emplace(answer.id, &answer).second)
      throw UsageError("duplicate answer id: " + answer.id);
  }
  std::vector<std::string> missing;
  for (const auto& example : examples) {
    if (!by_id.count(example.id)) missing.push_back(example.id);
  }
  std::set<std::string> example_ids;
  for (const auto& example : examples) example_ids.insert(example.id);
  std::vector<std::string> orphans;
  for (const auto& answer : answers) {
    if (!example_ids.count(answer.id)) orphans.push_back(answer.id);
  }
  if (!missing.empty() || !orphans.empty()) {
    std::ostringstream msg;
    msg << "answers do not align with examples;";
    if (!missing.empty()) {
      msg << " missing answers for:";
      for (const auto& id : missing) msg << ' ' << id;
      msg << ';';
    }
    if (!orphans.empty()) {
      msg << " answers without examples:";
      for (const auto& id : orphans) msg << ' ' << id;
    }
    throw UsageError(msg.str());
  }

  // Per-example metrics run in parallel; aggregation stays in input order.
  std::vector<ExampleMetrics> computed(examples.size());
  internal::parallel_for(examples.size(), options.concurrency, [&](std::size_t k) {
    const EvalExample& example = examples[k];
    AttributedAnswer answer = by_id.at(example.id)->answer;
    if (options.map_alce_brackets) attach_bracket_citations(answer, example.docs);

    ExampleMetrics metrics;
    metrics.id = example.id;
    metrics.cas = compute_cas(answer, nli);
    metrics.crs = compute_crs(answer, nli);
    metrics.cr = compute_cr(answer, example.docs);
    metrics.ar = compute_ar(answer);
    std::string answer_text = concat_claims(answer);
    if (example.short_answer_groups && !example.short_answer_groups->empty())
      metrics.em_recall = compute_em_recall(answer_text, *example.short_answer_groups);
    if (example.gold_claims && !example.gold_claims->empty())
      metrics.claim_recall = compute_claim_recall(answer_text, *example.gold_claims, nli);
    auto lengths = compute_lengths(answer);
    metrics.citation_words = lengths.citation_words;
    metrics.claim_words = lengths.claim_words;
    if (options.mauve_scores) {
      auto it = options.mauve_scores->find(example.id);
      if (it != options.mauve_scores->end()) metrics.mauve = it->second;
    }
    computed[k] = std::move(metrics);
  });

  MetricsReport report;
  double cas_sum = 0, crs_sum = 0, cr_sum = 0, ar_sum = 0;
  double em_sum = 0, claim_sum = 0;
  double citation_len_sum = 0, claim_len_sum = 0;
  double mauve_sum = 0;
  std::size_t mauve_n = 0;

  for (auto& metrics : computed) {
    accumulate(report.cas, metrics.cas, cas_sum);
    accumulate(report.crs, metrics.crs, crs_sum);
    accumulate(report.cr, metrics.cr, cr_sum);
    accumulate(report.ar, metrics.ar, ar_sum);
    accumulate(report.em_recall, metrics.em_recall, em_sum);
    accumulate(report.claim_recall, metrics.claim_recall, claim_sum);
    citation_len_sum += static_cast<double>(metrics.citation_words);
    claim_len_sum += static_cast<double>(metrics.claim_words);
    ++report.citation_words.defined_examples;
    ++report.claim_words.defined_examples;
    if (metrics.mauve) {
      mauve_sum += *metrics.mauve;
      ++mauve_n;
    }
    report.per_example.push_back(std::move(metrics));
  }

  auto finish = [](MacroValue& macro, double sum) {
    if (macro.defined_examples > 0)
      macro.mean = sum / static_cast<double>(macro.defined_examples);
  };
  finish(report.cas, cas_sum);
  finish(report.crs, crs_sum);
  finish(report.cr, cr_sum);
  finish(report.ar, ar_sum);
  finish(report.em_recall, em_sum);
  finish(report.claim_recall, claim_sum);
  finish(report.citation_words, citation_len_sum);
  finish(report.claim_words, claim_len_sum);
  if (mauve_n > 0) report.mauve = MacroValue{mauve_sum / mauve_n, mauve_n};
  return report;
}

EvalExample eval_example_from_json(const std::string& line,
                                   const std::string& fallback_id,
                                   const SegmenterOptions& options) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid eval example: ") + e.what());
  }
  EvalExample example;
  try {
    example.id = j.contains("id") ? j.at("id").get<std::string>() : fallback_id;
    example.question = j.value("question", std::string());
    std::vector<Passage> passages;
    int number = 1;
    if (j.contains("docs")) {
      for (const auto& doc : j.at("docs")) {
        Passage passage;
        passage.id = std::to_string(number++);
        if (doc.contains("title") && doc.at("title").is_string())
          passage.title = doc.at("title").get<std::string>();
        passage.text = doc.at("text").get<std::string>();
        passages.push_back(std::move(passage));
      }
    }
    example.docs = PassageSet::from_passages(std::move(passages), options);
    if (j.contains("qa_pairs") && j.at("qa_pairs").is_array() &&
        !j.at("qa_pairs").empty()) {
      std::vector<std::vector<std::string>> groups;
      for (const auto& qa : j.at("qa_pairs")) {
        groups.push_back(qa.at("short_answers").get<std::vector<std::string>>());
      }
      example.short_answer_groups = std::move(groups);
    }
    if (j.contains("claims") && j.at("claims").is_array() && !j.at("claims").empty()) {
      example.gold_claims = j.at("claims").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("eval example missing field: ") + e.what());
  }
  return example;
}

namespace {

json metric_to_json(const MetricCount& count) {
  if (!count.defined()) return nullptr;
  json j;
  j["ratio"] = count.ratio();
  j["num"] = count.num;
  j["den"] = count.den;
  return j;
}

json macro_to_json(const MacroValue& macro) {
  json j;
  j["mean"] = macro.mean;
  j["defined_examples"] = macro.defined_examples;
  return j;
}

}  // namespace

std::string example_metrics_to_json(const ExampleMetrics& metrics) {
  json j;
  j["id"] = metrics.id;
  j["cas"] = metric_to_json(metrics.cas);
  j["crs"] = metric_to_json(metrics.crs);
  j["cr"] = metric_to_json(metrics.cr);
  j["ar"] = metric_to_json(metrics.ar);
  j["em_rec"] = metric_to_json(metrics.em_recall);
  j["claim_rec"] = metric_to_json(metrics.claim_recall);
  j["citation_words"] = metrics.citation_words;
  j["claim_words"] = metrics.claim_words;
  j["mauve"] = metrics.mauve ? json(*metrics.mauve) : json(nullptr);
  return j.dump();
}

std::string report_summary_to_json(const MetricsReport& report) {
  json j;
  j["examples"] = report.per_example.size();
  j["cas"] = macro_to_json(report.cas);
  j["crs"] = macro_to_json(report.crs);
  j["cr"] = macro_to_json(report.cr);
  j["ar"] = macro_to_json(report.ar);
  j["em_rec"] = macro_to_json(report.em_recall);
  j["claim_rec"] = macro_to_json(report.claim_recall);
  j["citation_words"] = macro_to_json(report.citation_words);
  j["claim_words"] = macro_to_json(report.claim_words);
  j["mauve"] = report.mauve ? macro_to_json(*report.mauve) : json(nullptr);
  return j.dump();
}

std::string report_table(const MetricsReport& report) {
  std::ostringstream out;
  auto pct = [](const MacroValue& macro) {
    std::ostringstream cell;
    if (macro.defined_examples == 0) {
      cell << "-";
    } else {
      cell.setf(std::ios::fixed);
      cell.precision(1);
      cell << macro.mean * 100.0;
    }
    return cell.str();
  };
  auto raw = [](const MacroValue& macro) {
    std::ostringstream cell;
    cell.setf(std::ios::fixed);
    cell.precision(1);
    cell << macro.mean;
    return cell.str();
  };
  out << "Examples  MAUVE  EM-Rec  Claim-Rec  CAS   CRS   CR    AR    CitLen  ClaimLen\n";
  out << report.per_example.size() << "\t  ";
  out << (report.mauve ? raw(*report.mauve) : std::string("-")) << "\t " << pct(report.em_recall)
      << "\t " << pct(report.claim_recall) << "\t    " << pct(report.cas) << "  "
      << pct(report.crs) << "  " << pct(report.cr) << "  " << pct(report.ar) << "  "
      << raw(report.citation_words) << "    " << raw(report.claim_words) << "\n";
  out << "(defined examples per metric: cas=" << report.cas.defined_examples
      << " crs=" << report.crs.defined_examples << " cr=" << report.cr.defined_examples
      << " ar=" << report.ar.defined_examples
      << " em_rec=" << report.em_recall.defined_examples
      << " claim_rec=" << report.claim_recall.defined_examples << ")\n";
  return out.str();
}

}  // namespace citegen

#include "citegen/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "citegen/errors.hpp"
#include "citegen/text.hpp"
#include "citegen/tokenizer.hpp"
#include "internal/parallel.hpp"

namespace citegen {

using nlohmann::json;

TrainingSample build_training_sample(const RawSample& raw, SegmenterBackend& segmenter) {
  auto clause_pairs = segmenter.segment_answer(raw.question, raw.passages, raw.answer);

  TrainingSample sample;
  sample.id = raw.id;
  sample.question = raw.question;
  sample.passages = raw.passages;
  for (const auto& [clause, citation] : clause_pairs) {
    RefClaimPair pair;
    pair.claim_text = normalize(clause);
    for (const auto& span : split_sentences(citation))
      pair.reference_sentences.push_back(normalize(span.text));
    if (pair.claim_text.empty())
      throw SegmentationFormatError("segmenter produced an empty clause");
    sample.pairs.push_back(std::move(pair));
  }
  if (sample.pairs.empty())
    throw SegmentationFormatError("segmenter produced no clauses");

  AttributedAnswer assembled;
  assembled.pairs = sample.pairs;
  sample.answer_tagged = render_attributed(assembled);  // stock connectives
  return sample;
}

BuildResult build_training_samples(const std::vector<RawSample>& raws,
                                   SegmenterBackend& segmenter, int concurrency) {
  struct Slot {
    std::optional<TrainingSample> sample;
    std::optional<DropLogEntry> dropped;
  };
  std::vector<Slot> slots(raws.size());
  internal::parallel_for(raws.size(), concurrency, [&](std::size_t i) {
    try {
      slots[i].sample = build_training_sample(raws[i], segmenter);
    } catch (const SegmentationFormatError& e) {
      slots[i].dropped = DropLogEntry{raws[i].id, e.what()};
    }
  });
  BuildResult result;
  for (auto& slot : slots) {
    if (slot.sample) result.samples.push_back(std::move(*slot.sample));
    if (slot.dropped) result.dropped.push_back(std::move(*slot.dropped));
  }
  return result;
}

namespace {

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& sentence : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += sentence;
  }
  return out;
}

// Failure reason for one sample under the tuple-level filter, or nullopt
// when every pair checks out. Checks run in pair order, string matching
// before entailment, mirroring the filtering algorithm's flag updates.
std::optional<std::string> sample_failure(const TrainingSample& sample, NliBackend& nli) {
  for (const auto& pair : sample.pairs) {
    for (const auto& stored : pair.reference_sentences) {
      // A stored citation may span several sentences; check each.
      for (const auto& span : split_sentences(stored)) {
        if (sample.passages.find_sentence(span.text).empty()) return "string-mismatch";
      }
    }
    std::string premise = join_sentences(pair.reference_sentences);
    if (!nli.entails(premise, pair.claim_text).entailed) return "nli-fail";
  }
  return std::nullopt;
}

}  // namespace

std::pair<std::vector<TrainingSample>, FilterReport> filter_citations(
    const std::vector<TrainingSample>& samples, NliBackend& nli, int concurrency) {
  // Verdicts computed in parallel, report aggregated in input order.
  std::vector<std::optional<std::string>> failures(samples.size());
  internal::parallel_for(samples.size(), concurrency, [&](std::size_t i) {
    failures[i] = sample_failure(samples[i], nli);
  });

  std::vector<TrainingSample> kept;
  FilterReport report;
  report.input_count = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& failure = failures[i];
    if (!failure) {
      kept.push_back(samples[i]);
      ++report.kept_count;
    } else if (*failure == "string-mismatch") {
      ++report.removed_string_mismatch;
      report.removal_log.push_back({samples[i].id, *failure});
    } else {
      ++report.removed_nli_fail;
      report.removal_log.push_back({samples[i].id, *failure});
    }
  }
  return {std::move(kept), std::move(report)};
}

std::vector<ClaimTrainingRecord> split_for_claim_model(
    const std::vector<TrainingSample>& samples, bool full_history) {
  std::vector<ClaimTrainingRecord> records;
  for (const auto& sample : samples) {
    AttributedAnswer answer = parse_attributed(sample.answer_tagged, /*strict=*/true);
    const bool stored = answer.has_stored_connectives();
    for (std::size_t i = 0; i < answer.pairs.size(); ++i) {
      std::string ref_conn = stored ? answer.connectives[2 * i]
                                    : std::string(kDefaultReferenceConnective);
      std::string claim_conn = stored ? answer.connectives[2 * i + 1]
                                      : std::string(kDefaultClaimConnective);
      ClaimTrainingRecord record;
      std::string input;
      if (full_history && i > 0) {
        AttributedAnswer prefix;
        prefix.pairs.assign(answer.pairs.begin(), answer.pairs.begin() + i);
        prefix.connectives.assign(answer.connectives.begin(),
                                  stored ? answer.connectives.begin() + 2 * i
                                         : answer.connectives.begin());
        input = render_attributed(prefix);
      }
      auto append = [&input](std::string_view piece) {
        if (piece.empty()) return;
        if (!input.empty()) input.push_back(' ');
        input += piece;
      };
      append(ref_conn);
      append(kReferenceOpenTag);
      append(join_sentences(answer.pairs[i].reference_sentences));
      append(kReferenceCloseTag);
      record.input_text = input;

      std::string output;
      auto append_out = [&output](std::string_view piece) {
        if (piece.empty()) return;
        if (!output.empty()) output.push_back(' ');
        output += piece;
      };
      append_out(claim_conn);
      append_out(kClaimOpenTag);
      append_out(answer.pairs[i].claim_text);
      append_out(kClaimCloseTag);
      record.output_text = output;
      records.push_back(std::move(record));
    }
  }
  return records;
}

DatasetStats dataset_stats(const std::vector<TrainingSample>& samples) {
  DatasetStats stats;
  stats.sample_count = samples.size();
  if (samples.empty()) return stats;
  double answer_total = 0.0;
  double citation_total = 0.0;
  double passage_total = 0.0;
  for (const auto& sample : samples) {
    AttributedAnswer answer;
    answer.pairs = sample.pairs;
    answer_total += static_cast<double>(word_count(concat_claims(answer)));
    std::string citations;
    for (const auto& pair : sample.pairs) {
      for (const auto& sentence : pair.reference_sentences) {
        if (!citations.empty()) citations.push_back(' ');
        citations += sentence;
      }
    }
    citation_total += static_cast<double>(word_count(citations));
    const auto& passages = sample.passages.passages();
    if (!passages.empty()) {
      double words = 0.0;
      for (const auto& passage : passages)
        words += static_cast<double>(word_count(passage.text));
      passage_total += words / static_cast<double>(passages.size());
    }
  }
  double n = static_cast<double>(samples.size());
  stats.avg_answer_words = answer_total / n;
  stats.avg_citation_words = citation_total / n;
  stats.avg_passage_words = passage_total / n;
  return stats;
}

namespace {

PassageSet passages_from_references(const std::vector<std::string>& references,
                                    const SegmenterOptions& options) {
  std::vector<Passage> passages;
  for (std::size_t i = 0; i < references.size(); ++i) {
    Passage passage;
    passage.id = std::to_string(i + 1);  // 1-based, matching [k] display order
    passage.text = references[i];
    passages.push_back(std::move(passage));
  }
  return PassageSet::from_passages(std::move(passages), options);
}

}  // namespace

RawSample raw_sample_from_json(const std::string& line, const std::string& fallback_id,
                               const SegmenterOptions& options) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid raw sample: ") + e.what());
  }
  RawSample raw;
  try {
    raw.id = j.value("id", fallback_id);
    raw.question = j.at("question").get<std::string>();
    raw.answer = j.at("answer").get<std::string>();
    raw.passages = passages_from_references(
        j.at("references").get<std::vector<std::string>>(), options);
  } catch (const json::exception& e) {
    throw UsageError(std::string("raw sample missing field: ") + e.what());
  }
  if (raw.question.empty() || raw.answer.empty() ||
      raw.passages.passages().empty()) {
    throw ValidationError("raw sample " + raw.id +
                          " needs non-empty question, references and answer");
  }
  return raw;
}

std::string training_sample_to_json(const TrainingSample& sample) {
  json j;
  j["id"] = sample.id;
  j["question"] = sample.question;
  std::vector<std::string> references;
  for (const auto& passage : sample.passages.passages())
    references.push_back(passage.text);
  j["references"] = std::move(references);
  j["answer_tagged"] = sample.answer_tagged;
  return j.dump();
}

TrainingSample training_sample_from_json(const std::string& line,
                                         const std::string& fallback_id,
                                         const SegmenterOptions& options) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid training sample: ") + e.what());
  }
  TrainingSample sample;
  try {
    sample.id = j.value("id", fallback_id);
    sample.question = j.at("question").get<std::string>();
    sample.passages = passages_from_references(
        j.at("references").get<std::vector<std::string>>(), options);
    sample.answer_tagged = j.at("answer_tagged").get<std::string>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("training sample missing field: ") + e.what());
  }
  sample.pairs = parse_attributed(sample.answer_tagged, /*strict=*/true).pairs;
  return sample;
}

std::string claim_record_to_json(const ClaimTrainingRecord& record) {
  json j;
  j["input_text"] = record.input_text;
  j["output_text"] = record.output_text;
  return j.dump();
}

std::string drop_entry_to_json(const DropLogEntry& entry) {
  json j;
  j["id"] = entry.id;
  j["reason"] = entry.reason;
  return j.dump();
}

std::string filter_report_to_json(const FilterReport& report) {
  json j;
  j["input_count"] = report.input_count;
  j["kept_count"] = report.kept_count;
  j["removed_string_mismatch"] = report.removed_string_mismatch;
  j["removed_nli_fail"] = report.removed_nli_fail;
  return j.dump();
}

std::string dataset_stats_to_json(const DatasetStats& stats) {
  json j;
  j["samples"] = stats.sample_count;
  j["avg_answer_words"] = stats.avg_answer_words;
  j["avg_citation_words"] = stats.avg_citation_words;
  j["avg_passage_words"] = stats.avg_passage_words;
  return j.dump();
}

namespace {

struct Checkpoint {
  std::size_t consumed = 0;
  std::size_t emitted = 0;
  std::size_t dropped = 0;
  std::size_t kept = 0;
  std::size_t removed_string_mismatch = 0;
  std::size_t removed_nli_fail = 0;
};

std::string checkpoint_path(const std::string& output_path) {
  return output_path + ".ckpt";
}

Checkpoint load_checkpoint(const std::string& output_path) {
  std::ifstream in(checkpoint_path(output_path));
  if (!in) return {};
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    return {};
  }
  Checkpoint ckpt;
  ckpt.consumed = j.value("consumed", 0u);
  ckpt.emitted = j.value("emitted", 0u);
  ckpt.dropped = j.value("dropped", 0u);
  ckpt.kept = j.value("kept", 0u);
  ckpt.removed_string_mismatch = j.value("removed_string_mismatch", 0u);
  ckpt.removed_nli_fail = j.value("removed_nli_fail", 0u);
  return ckpt;
}

void store_checkpoint(const std::string& output_path, const Checkpoint& ckpt) {
  json j;
  j["consumed"] = ckpt.consumed;
  j["emitted"] = ckpt.emitted;
  j["dropped"] = ckpt.dropped;
  j["kept"] = ckpt.kept;
  j["removed_string_mismatch"] = ckpt.removed_string_mismatch;
  j["removed_nli_fail"] = ckpt.removed_nli_fail;
  std::ofstream out(checkpoint_path(output_path), std::ios::trunc);
  out << j.dump() << '\n';
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

StageProgress run_build_stage(const std::string& input_path,
                              const std::string& output_path,
                              const std::string& drop_log_path,
                              SegmenterBackend& segmenter, bool resume,
                              const SegmenterOptions& options) {
  auto lines = read_lines(input_path);
  Checkpoint ckpt = resume ? load_checkpoint(output_path) : Checkpoint{};
  auto open_mode = (resume && ckpt.consumed > 0) ? std::ios::app : std::ios::trunc;
  std::ofstream out(output_path, open_mode);
  std::ofstream drops(drop_log_path, open_mode);
  if (!out || !drops)
    throw UsageError("cannot open output files: " + output_path + ", " + drop_log_path);

  for (std::size_t i = ckpt.consumed; i < lines.size(); ++i) {
    RawSample raw = raw_sample_from_json(lines[i], std::to_string(i), options);
    try {
      TrainingSample sample = build_training_sample(raw, segmenter);
      out << training_sample_to_json(sample) << '\n';
      out.flush();
      ++ckpt.emitted;
    } catch (const SegmentationFormatError& e) {
      drops << drop_entry_to_json({raw.id, e.what()}) << '\n';
      drops.flush();
      ++ckpt.dropped;
    }
    ++ckpt.consumed;
    store_checkpoint(output_path, ckpt);
  }
  return {ckpt.consumed, ckpt.emitted};
}

StageProgress run_filter_stage(const std::string& input_path,
                               const std::string& output_path,
                               const std::string& removed_log_path,
                               const std::string& report_path, NliBackend& nli,
                               bool resume, const SegmenterOptions& options) {
  auto lines = read_lines(input_path);
  Checkpoint ckpt = resume ? load_checkpoint(output_path) : Checkpoint{};
  auto open_mode = (resume && ckpt.consumed > 0) ? std::ios::app : std::ios::trunc;
  std::ofstream out(output_path, open_mode);
  std::ofstream removed(removed_log_path, open_mode);
  if (!out || !removed)
    throw UsageError("cannot open output files: " + output_path + ", " +
                     removed_log_path);

  for (std::size_t i = ckpt.consumed; i < lines.size(); ++i) {
    TrainingSample sample =
        training_sample_from_json(lines[i], std::to_string(i), options);
    auto failure = sample_failure(sample, nli);
    if (!failure) {
      out << lines[i] << '\n';
      out.flush();
      ++ckpt.kept;
      ++ckpt.emitted;
    } else {
      removed << drop_entry_to_json({sample.id, *failure}) << '\n';
      removed.flush();
      if (*failure == "string-mismatch")
        ++ckpt.removed_string_mismatch;
      else
        ++ckpt.removed_nli_fail;
    }
    ++ckpt.consumed;
    store_checkpoint(output_path, ckpt);
  }

  FilterReport report;
  report.input_count = ckpt.consumed;
  report.kept_count = ckpt.kept;
  report.removed_string_mismatch = ckpt.removed_string_mismatch;
  report.removed_nli_fail = ckpt.removed_nli_fail;
  std::ofstream report_out(report_path, std::ios::trunc);
  if (!report_out) throw UsageError("cannot open report file: " + report_path);
  report_out << filter_report_to_json(report) << '\n';
  return {ckpt.consumed, ckpt.emitted};
}

}  // namespace citegen

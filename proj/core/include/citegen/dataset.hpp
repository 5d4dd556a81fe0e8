#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "citegen/answer.hpp"
#include "citegen/backends.hpp"

namespace citegen {

// One raw (question, passages, long-form answer) triple, the unit the
// two-stage construction pipeline consumes.
struct RawSample {
  std::string id;
  std::string question;
  PassageSet passages;
  std::string answer;
};

// A constructed training sample: the answer rewritten as interleaved
// reference/claim pairs in tagged form.
struct TrainingSample {
  std::string id;
  std::string question;
  PassageSet passages;
  std::string answer_tagged;
  std::vector<RefClaimPair> pairs;
};

struct DropLogEntry {
  std::string id;
  std::string reason;
};

struct BuildResult {
  std::vector<TrainingSample> samples;
  std::vector<DropLogEntry> dropped;
};

// Outcome of citation filtering. Counts always satisfy
// input_count == kept_count + removed_string_mismatch + removed_nli_fail.
struct FilterReport {
  std::size_t input_count = 0;
  std::size_t kept_count = 0;
  std::size_t removed_string_mismatch = 0;
  std::size_t removed_nli_fail = 0;
  std::vector<DropLogEntry> removal_log;
};

// One line of the claim-model training file.
struct ClaimTrainingRecord {
  std::string input_text;   // ends with </reference>
  std::string output_text;  // ends with </claim>
};

struct DatasetStats {
  std::size_t sample_count = 0;
  double avg_answer_words = 0.0;
  double avg_citation_words = 0.0;
  double avg_passage_words = 0.0;
};

// Stage 1: segment each raw answer into (clause, citation) pairs via the
// segmenter backend and assemble the tagged training answer with the stock
// connectives. Samples whose segmenter reply does not parse are dropped and
// logged; backend unavailability aborts the stage (resume via checkpoints in
// the CLI driver). Samples are independent: the stage fans out over
// `concurrency` workers and aggregates in input order.
BuildResult build_training_samples(const std::vector<RawSample>& raws,
                                   SegmenterBackend& segmenter, int concurrency = 4);
TrainingSample build_training_sample(const RawSample& raw, SegmenterBackend& segmenter);

// Stage 2, tuple-level citation filtering: a sample is removed when any of
// its pairs has a citation sentence not found in the passages
// (string-mismatch) or a citation that does not entail its clause
// (nli-fail). The first failing check names the removal reason.
std::pair<std::vector<TrainingSample>, FilterReport> filter_citations(
    const std::vector<TrainingSample>& samples, NliBackend& nli, int concurrency = 4);

// One claim-model record per pair. The default input is the pair's own
// connective + reference block (the shipped training shape); with
// full_history the input carries every earlier pair as well.
std::vector<ClaimTrainingRecord> split_for_claim_model(
    const std::vector<TrainingSample>& samples, bool full_history = false);

// Four-column dataset statistics: answer length is the word count of the
// concatenated claims, citation length of the concatenated reference
// sentences, passage length the per-sample mean passage word count.
DatasetStats dataset_stats(const std::vector<TrainingSample>& samples);

// --- line-delimited file formats -------------------------------------------

RawSample raw_sample_from_json(const std::string& line, const std::string& fallback_id,
                               const SegmenterOptions& options = {});
std::string training_sample_to_json(const TrainingSample& sample);
TrainingSample training_sample_from_json(const std::string& line,
                                         const std::string& fallback_id,
                                         const SegmenterOptions& options = {});
std::string claim_record_to_json(const ClaimTrainingRecord& record);
std::string drop_entry_to_json(const DropLogEntry& entry);
std::string filter_report_to_json(const FilterReport& report);
std::string dataset_stats_to_json(const DatasetStats& stats);

// --- checkpointed streaming drivers (used by the CLI) -----------------------

struct StageProgress {
  std::size_t consumed = 0;  // input lines already processed
  std::size_t emitted = 0;   // output lines already written
};

// Runs stage 1 over a line-delimited raw file, appending output lines and a
// drop log as it goes. A sidecar <output>.ckpt records how many input lines
// are done, so an aborted run resumes without repeating segmenter calls.
StageProgress run_build_stage(const std::string& input_path,
                              const std::string& output_path,
                              const std::string& drop_log_path,
                              SegmenterBackend& segmenter, bool resume,
                              const SegmenterOptions& options = {});

// Runs stage 2 the same way; emits kept lines, a removal log, and a report.
StageProgress run_filter_stage(const std::string& input_path,
                               const std::string& output_path,
                               const std::string& removed_log_path,
                               const std::string& report_path, NliBackend& nli,
                               bool resume, const SegmenterOptions& options = {});

}  // namespace citegen

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "citegen/answer.hpp"

namespace citegen {

// Canonical one-answer-per-line record. Field names (`id`, `raw_text`,
// `pairs`, `reference_sentences`, `claim_text`, `provenance`, `trace`) are
// part of the file contract.
struct AnswerRecord {
  std::string id;
  AttributedAnswer answer;
  std::optional<GenerationTrace> trace;

  // Extra run-manifest fields carried by `generate` output lines.
  std::optional<std::string> question;
  std::optional<std::string> mode;
  std::optional<std::string> config_digest;
};

std::string to_json_line(const AnswerRecord& record);
AnswerRecord answer_record_from_json(const std::string& line);

std::vector<AnswerRecord> read_answer_records(std::istream& in);
std::vector<AnswerRecord> read_answer_records_file(const std::string& path);
void write_answer_records(std::ostream& out, const std::vector<AnswerRecord>& records);

// FNV-1a 64-bit content digest, hex-encoded. Not cryptographic; used only to
// fingerprint configs and inputs inside run manifests.
std::string content_digest(std::string_view bytes);

}  // namespace citegen

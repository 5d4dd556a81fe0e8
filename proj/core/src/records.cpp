#include "citegen/records.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "citegen/errors.hpp"

namespace citegen {

using nlohmann::json;

namespace {

json pair_to_json(const RefClaimPair& pair) {
  json j;
  j["reference_sentences"] = pair.reference_sentences;
  j["claim_text"] = pair.claim_text;
  if (pair.provenance) {
    json prov = json::array();
    for (const auto& ref : *pair.provenance) {
      prov.push_back({{"passage_id", ref.passage_id},
                      {"sentence_index", ref.sentence_index}});
    }
    j["provenance"] = std::move(prov);
  } else {
    j["provenance"] = nullptr;
  }
  return j;
}

RefClaimPair pair_from_json(const json& j) {
  RefClaimPair pair;
  pair.reference_sentences = j.at("reference_sentences").get<std::vector<std::string>>();
  pair.claim_text = j.at("claim_text").get<std::string>();
  if (j.contains("provenance") && !j.at("provenance").is_null()) {
    std::vector<SentenceRef> refs;
    for (const auto& item : j.at("provenance")) {
      refs.push_back({item.at("passage_id").get<std::string>(),
                      item.at("sentence_index").get<int>()});
    }
    pair.provenance = std::move(refs);
  }
  return pair;
}

json trace_to_json(const GenerationTrace& trace) {
  json j;
  j["mode"] = std::string(to_string(trace.mode));
  json steps = json::array();
  for (const auto& step : trace.steps)
    steps.push_back({std::string(to_string(step.phase)), step.token_count});
  j["steps"] = std::move(steps);
  json events = json::array();
  for (const auto& [pair_index, event] : trace.forced_events)
    events.push_back({pair_index, std::string(to_string(event))});
  j["forced_events"] = std::move(events);
  j["truncated_pairs"] = trace.truncated_pairs;
  return j;
}

GenerationTrace trace_from_json(const json& j) {
  GenerationTrace trace;
  trace.mode = gen_mode_from_string(j.at("mode").get<std::string>());
  for (const auto& step : j.at("steps")) {
    std::string phase = step.at(0).get<std::string>();
    TracePhase p = TracePhase::tag;
    if (phase == "reference") p = TracePhase::reference;
    else if (phase == "claim") p = TracePhase::claim;
    else if (phase == "connective") p = TracePhase::connective;
    trace.steps.push_back({p, step.at(1).get<int>()});
  }
  for (const auto& event : j.at("forced_events")) {
    std::string name = event.at(1).get<std::string>();
    ForcedEvent e = ForcedEvent::forced_end;
    if (name == "forced-close-reference") e = ForcedEvent::forced_close_reference;
    else if (name == "suppressed-end") e = ForcedEvent::suppressed_end;
    trace.forced_events.emplace_back(event.at(0).get<int>(), e);
  }
  if (j.contains("truncated_pairs"))
    trace.truncated_pairs = j.at("truncated_pairs").get<std::vector<int>>();
  return trace;
}

}  // namespace

std::string to_json_line(const AnswerRecord& record) {
  json j;
  j["id"] = record.id;
  j["raw_text"] = record.answer.raw_text;
  json pairs = json::array();
  for (const auto& pair : record.answer.pairs) pairs.push_back(pair_to_json(pair));
  j["pairs"] = std::move(pairs);
  if (record.trace) j["trace"] = trace_to_json(*record.trace);
  if (record.question) j["question"] = *record.question;
  if (record.mode) j["mode"] = *record.mode;
  if (record.config_digest) j["config_digest"] = *record.config_digest;
  return j.dump();
}

AnswerRecord answer_record_from_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid answer record: ") + e.what());
  }
  AnswerRecord record;
  try {
    record.id = j.at("id").get<std::string>();
    record.answer.raw_text = j.value("raw_text", std::string());
    if (j.contains("pairs")) {
      for (const auto& item : j.at("pairs"))
        record.answer.pairs.push_back(pair_from_json(item));
    }
    if (j.contains("trace") && !j.at("trace").is_null())
      record.trace = trace_from_json(j.at("trace"));
    if (j.contains("question")) record.question = j.at("question").get<std::string>();
    if (j.contains("mode")) record.mode = j.at("mode").get<std::string>();
    if (j.contains("config_digest"))
      record.config_digest = j.at("config_digest").get<std::string>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("answer record missing field: ") + e.what());
  }
  return record;
}

std::vector<AnswerRecord> read_answer_records(std::istream& in) {
  std::vector<AnswerRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(answer_record_from_json(line));
  }
  return records;
}

std::vector<AnswerRecord> read_answer_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open answers file: " + path);
  return read_answer_records(in);
}

void write_answer_records(std::ostream& out, const std::vector<AnswerRecord>& records) {
  for (const auto& record : records) out << to_json_line(record) << '\n';
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace citegen

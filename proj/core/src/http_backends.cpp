#include "citegen/http_backends.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "citegen/errors.hpp"

namespace citegen {

using nlohmann::json;

namespace {

struct ParsedUrl {
  std::string host_port;  // scheme://host:port form httplib accepts
  std::string base_path;  // path prefix, no trailing slash
};

ParsedUrl parse_url(const std::string& url) {
  if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0)
    throw ConfigurationError("endpoint url must be http(s): " + url);
  std::size_t scheme_end = url.find("//") + 2;
  std::size_t path_at = url.find('/', scheme_end);
  if (path_at == std::string::npos) return {url, ""};
  std::string path = url.substr(path_at);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, path_at), path};
}

class JsonClient {
 public:
  explicit JsonClient(BackendEndpoint endpoint)
      : endpoint_(std::move(endpoint)), url_(parse_url(endpoint_.url)) {}

  json post(const std::string& route, const json& body) {
    std::string payload = body.dump();
    std::string last_error;
    int attempts = std::max(1, endpoint_.max_retries + 1);
    for (int attempt = 0; attempt < attempts; ++attempt) {
      if (attempt > 0) {
        auto delay = endpoint_.backoff * (1 << (attempt - 1));
        std::this_thread::sleep_for(delay);
      }
      httplib::Client client(url_.host_port);
      client.set_connection_timeout(endpoint_.timeout);
      client.set_read_timeout(endpoint_.timeout);
      httplib::Headers headers;
      for (const auto& [key, value] : endpoint_.headers) headers.emplace(key, value);
      auto res = client.Post((url_.base_path + route).c_str(), headers, payload,
                             "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500) {
        last_error = "server status " + std::to_string(res->status);
        continue;  // retryable
      }
      if (res->status != 200)
        throw ProtocolError("endpoint " + endpoint_.url + route + " replied " +
                            std::to_string(res->status) + ": " + res->body);
      try {
        return json::parse(res->body);
      } catch (const json::exception& e) {
        throw ProtocolError(std::string("endpoint reply is not JSON: ") + e.what());
      }
    }
    throw BackendUnavailableError("endpoint " + endpoint_.url + route +
                                  " unavailable after " + std::to_string(attempts) +
                                  " attempts: " + last_error);
  }

 private:
  BackendEndpoint endpoint_;
  ParsedUrl url_;
};

}  // namespace

struct HttpGenerationBackend::Impl {
  JsonClient client;
  std::string tokenizer_name;
  double temperature;
};

HttpGenerationBackend::HttpGenerationBackend(BackendEndpoint endpoint,
                                             std::string tokenizer_name,
                                             double temperature)
    : impl_(new Impl{JsonClient(std::move(endpoint)), std::move(tokenizer_name),
                     temperature}) {}

HttpGenerationBackend::~HttpGenerationBackend() = default;

std::vector<ScoredCandidate> HttpGenerationBackend::score_candidates(
    const std::string& context, const std::vector<TokenId>& candidates) {
  if (candidates.empty()) throw UsageError("score_candidates with no candidates");
  json body;
  body["tokenizer_name"] = impl_->tokenizer_name;
  body["context_text"] = context;
  body["candidate_ids"] = candidates;
  json reply = impl_->client.post("/v1/score", body);

  if (!reply.contains("scores") || !reply["scores"].is_array())
    throw ProtocolError("score reply lacks 'scores' array");
  std::map<TokenId, double> by_id;
  for (const auto& item : reply["scores"]) {
    by_id[item.at("id").get<TokenId>()] = item.at("logprob").get<double>();
  }
  if (by_id.size() != reply["scores"].size())
    throw ProtocolError("score reply contains duplicate candidate ids");

  std::vector<ScoredCandidate> scores;
  scores.reserve(candidates.size());
  for (TokenId id : candidates) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw ProtocolError("score reply missing candidate " + std::to_string(id));
    scores.push_back({id, it->second});
    by_id.erase(it);
  }
  if (!by_id.empty())
    throw ProtocolError("score reply contains ids outside the candidate set");
  return renormalize(std::move(scores));
}

FreeGeneration HttpGenerationBackend::generate_free(
    const std::string& context, const std::vector<std::string>& stop_strings,
    int max_tokens) {
  if (max_tokens < 1) throw UsageError("generate_free requires max_tokens >= 1");
  json body;
  body["context_text"] = context;
  body["stop_strings"] = stop_strings;
  body["max_tokens"] = max_tokens;
  body["temperature"] = impl_->temperature;
  json reply = impl_->client.post("/v1/generate", body);
  if (!reply.contains("text") || !reply["text"].is_string())
    throw ProtocolError("generate reply lacks 'text'");

  FreeGeneration out;
  out.text = reply["text"].get<std::string>();
  out.truncated = reply.value("truncated", false);
  // Trust but verify: cut at the first stop string if the server left it in.
  for (const auto& stop : stop_strings) {
    if (stop.empty()) continue;
    std::size_t at = out.text.find(stop);
    if (at != std::string::npos) {
      out.text = out.text.substr(0, at);
      out.truncated = false;
    }
  }
  return out;
}

struct HttpNliBackend::Impl {
  JsonClient client;
  double threshold;
};

HttpNliBackend::HttpNliBackend(BackendEndpoint endpoint, double threshold)
    : impl_(new Impl{JsonClient(std::move(endpoint)), threshold}) {}

HttpNliBackend::~HttpNliBackend() = default;

EntailmentVerdict HttpNliBackend::entails(const std::string& premise,
                                          const std::string& hypothesis) {
  EntailmentVerdict verdict;
  verdict.threshold_used = impl_->threshold;
  if (premise.empty()) {
    verdict.score = 0.0;
    verdict.entailed = false;
    return verdict;
  }
  json body;
  body["premise"] = premise;
  body["hypothesis"] = hypothesis;
  json reply = impl_->client.post("/v1/entail", body);
  if (!reply.contains("score") || !reply["score"].is_number())
    throw ProtocolError("entail reply lacks numeric 'score'");
  verdict.score = reply["score"].get<double>();
  verdict.entailed = verdict.score >= verdict.threshold_used;
  return verdict;
}

struct HttpSegmenterBackend::Impl {
  JsonClient client;
  std::string template_name;
};

HttpSegmenterBackend::HttpSegmenterBackend(BackendEndpoint endpoint,
                                           std::string prompt_template_name)
    : impl_(new Impl{JsonClient(std::move(endpoint)), std::move(prompt_template_name)}) {}

HttpSegmenterBackend::~HttpSegmenterBackend() = default;

std::vector<ClauseCitation> HttpSegmenterBackend::segment_answer(
    const std::string& question, const PassageSet& passages, const std::string& answer) {
  if (answer.empty()) throw UsageError("segment_answer requires a non-empty answer");
  json body;
  body["prompt_template_name"] = impl_->template_name;
  body["question"] = question;
  json docs = json::array();
  for (const auto& passage : passages.passages()) docs.push_back(passage.text);
  body["passages"] = std::move(docs);
  body["answer"] = answer;

  json reply = impl_->client.post("/v1/segment", body);
  if (!reply.contains("pairs") || !reply["pairs"].is_array() || reply["pairs"].empty())
    throw SegmentationFormatError("segment reply lacks a non-empty 'pairs' array");
  std::vector<ClauseCitation> out;
  for (const auto& item : reply["pairs"]) {
    if (!item.contains("clause") || !item.contains("citation"))
      throw SegmentationFormatError("segment reply pair lacks clause/citation");
    out.push_back({item.at("clause").get<std::string>(),
                   item.at("citation").get<std::string>()});
  }
  return out;
}

}  // namespace citegen

#include "citegen/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "citegen/errors.hpp"
#include "citegen/records.hpp"

namespace citegen {

using nlohmann::json;

namespace {

const std::vector<std::string> kEndpointRoles = {"refer", "claim", "unified", "nli",
                                                 "segmenter"};

void reject_unknown_keys(const json& object, const std::vector<std::string>& known,
                         const std::string& where) {
  std::vector<std::string> unknown;
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      unknown.push_back(it.key());
  }
  if (!unknown.empty()) {
    std::ostringstream msg;
    msg << "unknown config key" << (unknown.size() > 1 ? "s" : "") << " in " << where
        << ":";
    for (const auto& key : unknown) msg << " '" << key << "'";
    throw ConfigurationError(msg.str());
  }
}

BackendEndpoint endpoint_from_json(const json& j, const std::string& role) {
  reject_unknown_keys(
      j, {"url", "model_name", "timeout_ms", "max_retries", "headers", "backoff_ms"},
      "endpoints." + role);
  BackendEndpoint endpoint;
  endpoint.url = j.value("url", std::string());
  endpoint.model_name = j.value("model_name", std::string());
  endpoint.timeout = std::chrono::milliseconds(j.value("timeout_ms", 30000));
  endpoint.max_retries = j.value("max_retries", 3);
  endpoint.backoff = std::chrono::milliseconds(j.value("backoff_ms", 200));
  if (j.contains("headers")) {
    for (auto it = j.at("headers").begin(); it != j.at("headers").end(); ++it)
      endpoint.headers[it.key()] = it.value().get<std::string>();
  }
  if (endpoint.url.empty())
    throw ValidationError("endpoints." + role + ".url must be non-empty");
  bool ok = endpoint.url.rfind("http://", 0) == 0 ||
            endpoint.url.rfind("https://", 0) == 0 || endpoint.is_mock();
  if (!ok)
    throw ValidationError("endpoints." + role + ".url must be http(s):// or mock://: " +
                          endpoint.url);
  return endpoint;
}

void apply_generation_json(const json& j, GenConfig& generation, bool& seed_explicit) {
  reject_unknown_keys(j,
                      {"mode", "constrained", "min_pairs", "max_pairs",
                       "max_ref_sentences_per_pair", "max_claim_tokens", "tie_break",
                       "seed"},
                      "generation");
  if (j.contains("mode"))
    generation.mode = gen_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("constrained")) generation.constrained = j.at("constrained").get<bool>();
  if (j.contains("min_pairs")) generation.min_pairs = j.at("min_pairs").get<int>();
  if (j.contains("max_pairs")) generation.max_pairs = j.at("max_pairs").get<int>();
  if (j.contains("max_ref_sentences_per_pair"))
    generation.max_ref_sentences_per_pair = j.at("max_ref_sentences_per_pair").get<int>();
  if (j.contains("max_claim_tokens"))
    generation.max_claim_tokens = j.at("max_claim_tokens").get<int>();
  if (j.contains("tie_break")) {
    std::string tie = j.at("tie_break").get<std::string>();
    if (tie != "lowest-token-id")
      throw ValidationError("unsupported tie_break: " + tie);
  }
  if (j.contains("seed")) {
    generation.seed = j.at("seed").get<std::uint64_t>();
    seed_explicit = true;
  }
}

void apply_env_credentials(AppConfig& config) {
  auto inject = [](BackendEndpoint& endpoint, const char* value) {
    endpoint.headers["Authorization"] = std::string("Bearer ") + value;
  };
  if (const char* key = std::getenv("CITEGEN_API_KEY")) {
    for (auto& [role, endpoint] : config.endpoints) inject(endpoint, key);
  }
  for (const auto& role : kEndpointRoles) {
    std::string var = "CITEGEN_" + role + "_API_KEY";
    std::transform(var.begin(), var.end(), var.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (const char* key = std::getenv(var.c_str())) {
      auto it = config.endpoints.find(role);
      if (it != config.endpoints.end()) inject(it->second, key);
    }
  }
}

}  // namespace

const BackendEndpoint& AppConfig::endpoint(const std::string& role) const {
  auto it = endpoints.find(role);
  if (it == endpoints.end())
    throw ConfigurationError("no endpoint configured for role '" + role + "'");
  return it->second;
}

AppConfig default_config() {
  AppConfig config;
  for (const auto& role : kEndpointRoles) {
    BackendEndpoint endpoint;
    endpoint.url = "mock://seeded";
    config.endpoints[role] = endpoint;
  }
  return config;
}

AppConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  AppConfig config = default_config();

  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open config file: " + path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigurationError("config file " + path + " is not valid JSON: " + e.what());
    }
    reject_unknown_keys(j,
                        {"endpoints", "generation", "tokenizer", "abbreviations_path",
                         "concurrency", "output_dir", "nli_threshold",
                         "segmenter_prompt_template"},
                        "config");
    if (j.contains("endpoints")) {
      reject_unknown_keys(j.at("endpoints"), kEndpointRoles, "endpoints");
      for (const auto& role : kEndpointRoles) {
        if (j.at("endpoints").contains(role))
          config.endpoints[role] = endpoint_from_json(j.at("endpoints").at(role), role);
      }
    }
    if (j.contains("generation"))
      apply_generation_json(j.at("generation"), config.generation, config.seed_explicit);
    if (j.contains("tokenizer")) config.tokenizer = j.at("tokenizer").get<std::string>();
    if (j.contains("abbreviations_path") && !j.at("abbreviations_path").is_null())
      config.abbreviations_path = j.at("abbreviations_path").get<std::string>();
    if (j.contains("concurrency")) config.concurrency = j.at("concurrency").get<int>();
    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("nli_threshold"))
      config.nli_threshold = j.at("nli_threshold").get<double>();
    if (j.contains("segmenter_prompt_template"))
      config.segmenter_prompt_template =
          j.at("segmenter_prompt_template").get<std::string>();
  }

  apply_env_credentials(config);

  if (overrides.mode) config.generation.mode = gen_mode_from_string(*overrides.mode);
  if (overrides.constrained) config.generation.constrained = *overrides.constrained;
  if (overrides.min_pairs) config.generation.min_pairs = *overrides.min_pairs;
  if (overrides.max_pairs) config.generation.max_pairs = *overrides.max_pairs;
  if (overrides.max_ref_sentences_per_pair)
    config.generation.max_ref_sentences_per_pair = *overrides.max_ref_sentences_per_pair;
  if (overrides.max_claim_tokens)
    config.generation.max_claim_tokens = *overrides.max_claim_tokens;
  if (overrides.seed) {
    config.generation.seed = *overrides.seed;
    config.seed_explicit = true;
  }
  if (overrides.concurrency) config.concurrency = *overrides.concurrency;
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;

  config.generation.validate();
  if (config.concurrency < 1) throw ValidationError("concurrency must be >= 1");
  if (config.abbreviations_path &&
      !std::filesystem::exists(*config.abbreviations_path)) {
    throw ConfigurationError("abbreviations_path does not exist: " +
                             *config.abbreviations_path);
  }
  if (config.nli_threshold < 0.0 || config.nli_threshold > 1.0)
    throw ValidationError("nli_threshold must be in [0, 1]");
  return config;
}

std::string AppConfig::canonical_json() const {
  json j;
  for (const auto& [role, endpoint] : endpoints) {
    json e;
    e["url"] = endpoint.url;
    e["model_name"] = endpoint.model_name;
    e["timeout_ms"] = endpoint.timeout.count();
    e["max_retries"] = endpoint.max_retries;
    e["backoff_ms"] = endpoint.backoff.count();
    // headers are credentials; only their names enter the digest
    std::vector<std::string> header_names;
    for (const auto& [name, value] : endpoint.headers) header_names.push_back(name);
    e["header_names"] = header_names;
    j["endpoints"][role] = std::move(e);
  }
  j["generation"] = {{"mode", std::string(to_string(generation.mode))},
                     {"constrained", generation.constrained},
                     {"min_pairs", generation.min_pairs},
                     {"max_pairs", generation.max_pairs},
                     {"max_ref_sentences_per_pair", generation.max_ref_sentences_per_pair},
                     {"max_claim_tokens", generation.max_claim_tokens},
                     {"tie_break", "lowest-token-id"},
                     {"seed", generation.seed}};
  j["tokenizer"] = tokenizer;
  j["abbreviations_path"] =
      abbreviations_path ? json(*abbreviations_path) : json(nullptr);
  j["concurrency"] = concurrency;
  j["output_dir"] = output_dir;
  j["nli_threshold"] = nli_threshold;
  j["segmenter_prompt_template"] = segmenter_prompt_template;
  return j.dump();
}

std::string AppConfig::digest() const { return content_digest(canonical_json()); }

}  // namespace citegen

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citegen/backends.hpp"
#include "citegen/genpipe.hpp"

namespace citegen {

// Effective application configuration. Precedence: command-line flags over
// environment over config file over defaults. Environment variables carry
// credentials only (CITEGEN_API_KEY, CITEGEN_<ROLE>_API_KEY); everything
// else lives in the JSON config file.
struct AppConfig {
  std::map<std::string, BackendEndpoint> endpoints;  // refer, claim, unified, nli, segmenter
  GenConfig generation;
  bool seed_explicit = false;  // seed came from file or flag, not the default
  std::string tokenizer = "whitespace";
  std::optional<std::string> abbreviations_path;
  int concurrency = 4;
  std::string output_dir = "out";
  double nli_threshold = 0.5;
  std::string segmenter_prompt_template = "segmenter-default";

  const BackendEndpoint& endpoint(const std::string& role) const;
  bool has_endpoint(const std::string& role) const { return endpoints.count(role) > 0; }

  // Canonical JSON (sorted keys) of the effective config; digests feed run
  // manifests.
  std::string canonical_json() const;
  std::string digest() const;
};

// Flag-level overrides the CLI collected; only set fields apply.
struct ConfigOverrides {
  std::optional<std::string> mode;
  std::optional<bool> constrained;
  std::optional<int> min_pairs;
  std::optional<int> max_pairs;
  std::optional<int> max_ref_sentences_per_pair;
  std::optional<int> max_claim_tokens;
  std::optional<std::uint64_t> seed;
  std::optional<int> concurrency;
  std::optional<std::string> output_dir;
};

// Loads and validates the config file, then applies environment credentials
// and flag overrides. Unknown keys anywhere in the file are an error
// (listed); invalid ranges raise ValidationError; a missing file raises
// ConfigurationError naming the path.
AppConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

// Built-in defaults with mock endpoints; what `load_config` starts from.
AppConfig default_config();

}  // namespace citegen

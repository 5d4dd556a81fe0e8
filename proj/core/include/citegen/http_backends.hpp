#pragma once

#include <memory>
#include <string>

#include "citegen/backends.hpp"

namespace citegen {

// HTTP clients for externally served models. Wire formats (JSON bodies):
//   POST /v1/score    {tokenizer_name, context_text, candidate_ids}
//                     -> {scores: [{id, logprob}]}
//   POST /v1/generate {context_text, stop_strings, max_tokens, temperature}
//                     -> {text, truncated?}
//   POST /v1/entail   {premise, hypothesis} -> {score}
//   POST /v1/segment  {prompt_template_name, question, passages, answer}
//                     -> {pairs: [{clause, citation}]}
// Every client retries with exponential backoff up to endpoint.max_retries
// before raising BackendUnavailableError.

class HttpGenerationBackend final : public GenerationBackend {
 public:
  HttpGenerationBackend(BackendEndpoint endpoint, std::string tokenizer_name,
                        double temperature = 0.0);
  ~HttpGenerationBackend() override;

  std::vector<ScoredCandidate> score_candidates(
      const std::string& context, const std::vector<TokenId>& candidates) override;
  FreeGeneration generate_free(const std::string& context,
                               const std::vector<std::string>& stop_strings,
                               int max_tokens) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class HttpNliBackend final : public NliBackend {
 public:
  HttpNliBackend(BackendEndpoint endpoint, double threshold = 0.5);
  ~HttpNliBackend() override;

  EntailmentVerdict entails(const std::string& premise,
                            const std::string& hypothesis) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class HttpSegmenterBackend final : public SegmenterBackend {
 public:
  HttpSegmenterBackend(BackendEndpoint endpoint,
                       std::string prompt_template_name = "segmenter-default");
  ~HttpSegmenterBackend() override;

  std::vector<ClauseCitation> segment_answer(const std::string& question,
                                             const PassageSet& passages,
                                             const std::string& answer) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace citegen

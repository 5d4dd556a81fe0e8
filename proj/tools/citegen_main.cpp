// citegen command-line tool: dataset construction, filtering, claim-model
// splitting, statistics, attributed generation, evaluation, and trie
// inspection. One subcommand per pipeline stage so expensive stages can
// checkpoint and restart independently.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "citegen/config.hpp"
#include "citegen/dataset.hpp"
#include "citegen/errors.hpp"
#include "citegen/eval.hpp"
#include "citegen/genpipe.hpp"
#include "citegen/http_backends.hpp"
#include "citegen/mock_backends.hpp"
#include "citegen/records.hpp"
#include "citegen/trie.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace citegen;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitBackendUnavailable = 4;
constexpr int kExitMalformedOutput = 5;

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

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<EvalExample> read_eval_examples(const std::string& path,
                                            const SegmenterOptions& options) {
  std::vector<EvalExample> examples;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i)
    examples.push_back(eval_example_from_json(lines[i], std::to_string(i), options));
  return examples;
}

std::unique_ptr<GenerationBackend> make_generation_backend(
    const AppConfig& config, const std::string& role,
    const std::vector<std::string>& corpus_sentences) {
  const BackendEndpoint& endpoint = config.endpoint(role);
  if (endpoint.is_mock())
    return std::make_unique<SeededMockBackend>(config.generation.seed, corpus_sentences);
  return std::make_unique<HttpGenerationBackend>(endpoint, config.tokenizer);
}

std::unique_ptr<NliBackend> make_nli_backend(const AppConfig& config) {
  const BackendEndpoint& endpoint = config.endpoint("nli");
  if (endpoint.is_mock()) return std::make_unique<ContainmentNliBackend>();
  return std::make_unique<HttpNliBackend>(endpoint, config.nli_threshold);
}

std::unique_ptr<SegmenterBackend> make_segmenter_backend(const AppConfig& config) {
  const BackendEndpoint& endpoint = config.endpoint("segmenter");
  if (endpoint.is_mock()) return std::make_unique<HeuristicSegmenterBackend>();
  return std::make_unique<HttpSegmenterBackend>(endpoint,
                                                config.segmenter_prompt_template);
}

SegmenterOptions segmenter_options(const AppConfig& config) {
  SegmenterOptions options;
  if (config.abbreviations_path)
    options.abbreviations = load_abbreviations(*config.abbreviations_path);
  return options;
}

struct CommonFlags {
  std::string config_path;
  ConfigOverrides overrides;
};

void add_config_flag(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
}

void add_generation_flags(CLI::App* cmd, CommonFlags& flags) {
  auto& o = flags.overrides;
  cmd->add_option_function<std::string>(
         "--mode", [&o](const std::string& v) { o.mode = v; },
         "unified | interleave | prompt")
      ->check(CLI::IsMember({"unified", "interleave", "prompt"}));
  cmd->add_flag_function(
      "--constrained,!--unconstrained",
      [&o](std::int64_t count) { o.constrained = count > 0; },
      "Constrain reference decoding to the prefix tree");
  cmd->add_option_function<int>(
      "--min-pairs", [&o](int v) { o.min_pairs = v; }, "Minimum reference/claim pairs");
  cmd->add_option_function<int>(
      "--max-pairs", [&o](int v) { o.max_pairs = v; }, "Maximum reference/claim pairs");
  cmd->add_option_function<int>(
      "--max-ref-sentences", [&o](int v) { o.max_ref_sentences_per_pair = v; },
      "Maximum sentences per reference part");
  cmd->add_option_function<int>(
      "--max-claim-tokens", [&o](int v) { o.max_claim_tokens = v; },
      "Token cap for each free-generated span");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t v) { o.seed = v; }, "Mock-backend seed");
  cmd->add_option_function<int>(
      "--concurrency", [&o](int v) { o.concurrency = v; }, "Worker threads");
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int run_generate(const CommonFlags& flags, const std::string& input_path,
                 std::string out_dir) {
  AppConfig config = load_config(flags.config_path, flags.overrides);
  if (out_dir.empty()) out_dir = config.output_dir;
  const GenConfig& gen = config.generation;

  std::vector<std::string> roles =
      gen.mode == GenMode::interleave ? std::vector<std::string>{"refer", "claim"}
                                      : std::vector<std::string>{"unified"};
  bool any_mock = false;
  for (const auto& role : roles) any_mock = any_mock || config.endpoint(role).is_mock();
  if (any_mock && !config.seed_explicit)
    throw UsageError("--seed (or generation.seed in the config) is required when "
                     "generating with mock backends");
  if (config.tokenizer != "whitespace")
    throw ConfigurationError("unknown tokenizer: " + config.tokenizer);

  SegmenterOptions seg_options = segmenter_options(config);
  auto examples = read_eval_examples(input_path, seg_options);

  fs::create_directories(out_dir);
  std::string answers_path = (fs::path(out_dir) / "answers.jsonl").string();
  std::ofstream answers_out(answers_path, std::ios::trunc);
  if (!answers_out) throw UsageError("cannot open output file: " + answers_path);

  std::string digest = config.digest();
  for (const auto& example : examples) {
    // Rebuild per example: the corpus (and so the vocabulary and tree)
    // belongs to the example's passages.
    std::vector<Passage> passages_copy = example.docs.passages();
    PassageSet passages = PassageSet::from_passages(passages_copy, seg_options);
    WordTokenizer tokenizer = WordTokenizer::build(passages.inventory_texts());

    Question question{example.id, example.question};
    GenerationOutcome outcome;
    if (gen.mode == GenMode::interleave) {
      auto refer = make_generation_backend(config, "refer", passages.inventory_texts());
      auto claim = make_generation_backend(config, "claim", passages.inventory_texts());
      outcome = generate_interleaved(question, passages, *refer, *claim, gen, tokenizer);
    } else {
      auto backend =
          make_generation_backend(config, "unified", passages.inventory_texts());
      outcome = generate_unified(question, passages, *backend, gen, &tokenizer);
    }

    AnswerRecord record;
    record.id = example.id;
    record.answer = std::move(outcome.answer);
    record.trace = std::move(outcome.trace);
    record.question = example.question;
    record.mode = std::string(to_string(gen.mode));
    record.config_digest = digest;
    answers_out << to_json_line(record) << '\n';
  }
  answers_out.flush();

  json manifest;
  manifest["config"] = json::parse(config.canonical_json());
  manifest["config_digest"] = digest;
  manifest["seed"] = gen.seed;
  manifest["input_path"] = input_path;
  manifest["input_digest"] = content_digest(read_file(input_path));
  manifest["examples"] = examples.size();
  manifest["answers_file"] = "answers.jsonl";
  std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  std::ofstream manifest_out(manifest_path, std::ios::trunc);
  manifest_out << manifest.dump(2) << '\n';

  std::cout << "generated " << examples.size() << " answers -> " << answers_path << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int run_evaluate(const CommonFlags& flags, const std::string& input_path,
                 const std::string& answers_path, const std::string& output_prefix,
                 const std::string& mauve_file, bool strict_parse,
                 bool no_bracket_mapping) {
  AppConfig config = load_config(flags.config_path, flags.overrides);
  auto examples = read_eval_examples(input_path, segmenter_options(config));
  auto records = read_answer_records_file(answers_path);

  std::vector<EvalAnswer> answers;
  for (auto& record : records) {
    EvalAnswer answer;
    answer.id = record.id;
    if (!record.answer.pairs.empty()) {
      answer.answer = std::move(record.answer);
    } else {
      answer.answer = parse_attributed(record.answer.raw_text, strict_parse);
    }
    answers.push_back(std::move(answer));
  }

  EvalOptions options;
  options.map_alce_brackets = !no_bracket_mapping;
  options.concurrency = config.concurrency;
  if (!mauve_file.empty()) {
    try {
      json j = json::parse(read_file(mauve_file));
      std::map<std::string, double> scores;
      for (auto it = j.begin(); it != j.end(); ++it) scores[it.key()] = it.value();
      options.mauve_scores = std::move(scores);
    } catch (const json::exception& e) {
      throw UsageError("mauve file " + mauve_file + " is not an id->score map: " +
                       e.what());
    }
  }

  auto nli = make_nli_backend(config);
  MetricsReport report = evaluate_run(examples, answers, *nli, options);

  if (!output_prefix.empty()) {
    fs::path prefix(output_prefix);
    if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
    std::ofstream summary(output_prefix + ".json", std::ios::trunc);
    summary << report_summary_to_json(report) << '\n';
    std::ofstream per_example(output_prefix + ".examples.jsonl", std::ios::trunc);
    for (const auto& metrics : report.per_example)
      per_example << example_metrics_to_json(metrics) << '\n';
    std::ofstream table(output_prefix + ".txt", std::ios::trunc);
    table << report_table(report);
  }
  std::cout << report_table(report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// dataset stages
// ---------------------------------------------------------------------------

int run_build_dataset(const CommonFlags& flags, const std::string& input_path,
                      const std::string& output_path, std::string drop_log_path,
                      bool resume) {
  AppConfig config = load_config(flags.config_path, flags.overrides);
  if (drop_log_path.empty()) drop_log_path = output_path + ".dropped.jsonl";
  auto segmenter = make_segmenter_backend(config);
  StageProgress progress = run_build_stage(input_path, output_path, drop_log_path,
                                           *segmenter, resume,
                                           segmenter_options(config));
  std::cout << "build-dataset: consumed " << progress.consumed << " raw samples, wrote "
            << progress.emitted << " training samples -> " << output_path << '\n';
  return kExitOk;
}

int run_filter(const CommonFlags& flags, const std::string& input_path,
               const std::string& output_path, std::string removed_path,
               std::string report_path, bool resume) {
  AppConfig config = load_config(flags.config_path, flags.overrides);
  if (removed_path.empty()) removed_path = output_path + ".removed.jsonl";
  if (report_path.empty()) report_path = output_path + ".report.json";
  auto nli = make_nli_backend(config);
  StageProgress progress = run_filter_stage(input_path, output_path, removed_path,
                                            report_path, *nli, resume,
                                            segmenter_options(config));
  std::cout << "filter: kept " << progress.emitted << " of " << progress.consumed
            << " samples -> " << output_path << " (report " << report_path << ")\n";
  return kExitOk;
}

int run_claim_split(const std::string& input_path, const std::string& output_path,
                    bool full_history) {
  auto lines = read_lines(input_path);
  std::vector<TrainingSample> samples;
  for (std::size_t i = 0; i < lines.size(); ++i)
    samples.push_back(training_sample_from_json(lines[i], std::to_string(i)));
  auto records = split_for_claim_model(samples, full_history);
  std::ofstream out(output_path, std::ios::trunc);
  if (!out) throw UsageError("cannot open output file: " + output_path);
  for (const auto& record : records) out << claim_record_to_json(record) << '\n';
  std::cout << "claim-split: wrote " << records.size() << " records -> " << output_path
            << '\n';
  return kExitOk;
}

int run_stats(const std::string& input_path, const std::string& output_path) {
  auto lines = read_lines(input_path);
  std::vector<TrainingSample> samples;
  for (std::size_t i = 0; i < lines.size(); ++i)
    samples.push_back(training_sample_from_json(lines[i], std::to_string(i)));
  DatasetStats stats = dataset_stats(samples);
  std::string payload = dataset_stats_to_json(stats);
  if (!output_path.empty()) {
    std::ofstream out(output_path, std::ios::trunc);
    if (!out) throw UsageError("cannot open output file: " + output_path);
    out << payload << '\n';
  }
  std::cout << payload << '\n';
  return kExitOk;
}

int run_trie_dump(const CommonFlags& flags, const std::string& input_path,
                  std::size_t index, const std::string& output_path) {
  AppConfig config = load_config(flags.config_path, flags.overrides);
  auto examples = read_eval_examples(input_path, segmenter_options(config));
  if (index >= examples.size())
    throw UsageError("--index " + std::to_string(index) + " out of range; file has " +
                     std::to_string(examples.size()) + " records");
  std::vector<Passage> passages_copy = examples[index].docs.passages();
  PassageSet passages =
      PassageSet::from_passages(passages_copy, segmenter_options(config));
  WordTokenizer tokenizer = WordTokenizer::build(passages.inventory_texts());
  PrefixTree tree = PrefixTree::build(passages, tokenizer);
  if (!output_path.empty()) {
    std::ofstream out(output_path, std::ios::trunc);
    if (!out) throw UsageError("cannot open output file: " + output_path);
    out << tree.dump();
  } else {
    std::cout << tree.dump();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attributed text generation with verbatim sentence-level citations"};
  app.require_subcommand(1);

  CommonFlags flags;

  // generate
  auto* generate = app.add_subcommand(
      "generate", "Generate attributed answers for a line-delimited question file");
  std::string gen_input, gen_out_dir;
  generate->add_option("--input", gen_input, "Questions with docs (JSONL)")->required();
  generate->add_option("--out-dir", gen_out_dir, "Output directory");
  add_config_flag(generate, flags);
  add_generation_flags(generate, flags);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score answers against examples");
  std::string eval_input, eval_answers, eval_prefix, eval_mauve;
  bool eval_strict = false, eval_no_brackets = false;
  evaluate->add_option("--input", eval_input, "Eval examples (JSONL)")->required();
  evaluate->add_option("--answers", eval_answers, "Answer records (JSONL)")->required();
  evaluate->add_option("--output-prefix", eval_prefix,
                       "Writes <prefix>.json, <prefix>.examples.jsonl, <prefix>.txt");
  evaluate->add_option("--mauve-file", eval_mauve,
                       "JSON map of example id to externally computed fluency score");
  evaluate->add_flag("--strict", eval_strict, "Strict-parse raw answers");
  evaluate->add_flag("--no-bracket-mapping", eval_no_brackets,
                     "Do not map [k] citations in baseline answers");
  add_config_flag(evaluate, flags);
  evaluate->add_option_function<int>(
      "--concurrency", [&flags](int v) { flags.overrides.concurrency = v; },
      "Worker threads");

  // build-dataset
  auto* build = app.add_subcommand("build-dataset",
                                   "Stage 1: segment raw answers into tagged samples");
  std::string build_input, build_output, build_drops;
  bool build_resume = false;
  build->add_option("--input", build_input, "Raw samples (JSONL)")->required();
  build->add_option("--output", build_output, "Training samples (JSONL)")->required();
  build->add_option("--drop-log", build_drops, "Dropped-sample log (JSONL)");
  build->add_flag("--resume", build_resume, "Continue from the checkpoint");
  add_config_flag(build, flags);

  // filter
  auto* filter = app.add_subcommand("filter", "Stage 2: citation filtering");
  std::string filter_input, filter_output, filter_removed, filter_report;
  bool filter_resume = false;
  filter->add_option("--input", filter_input, "Training samples (JSONL)")->required();
  filter->add_option("--output", filter_output, "Kept samples (JSONL)")->required();
  filter->add_option("--removed", filter_removed, "Removal log (JSONL)");
  filter->add_option("--report", filter_report, "Filter report (JSON)");
  filter->add_flag("--resume", filter_resume, "Continue from the checkpoint");
  add_config_flag(filter, flags);

  // claim-split
  auto* claim_split =
      app.add_subcommand("claim-split", "Split kept samples into claim-model records");
  std::string split_input, split_output;
  bool split_full_history = false;
  claim_split->add_option("--input", split_input, "Kept samples (JSONL)")->required();
  claim_split->add_option("--output", split_output, "Claim records (JSONL)")->required();
  claim_split->add_flag("--full-history", split_full_history,
                        "Condition each claim on all earlier pairs");

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  std::string stats_input, stats_output;
  stats->add_option("--input", stats_input, "Training samples (JSONL)")->required();
  stats->add_option("--output", stats_output, "Stats record (JSON)");

  // trie dump
  auto* trie = app.add_subcommand("trie", "Prefix-tree utilities");
  trie->require_subcommand(1);
  auto* trie_dump = trie->add_subcommand("dump", "Print the tree for one example");
  std::string trie_input, trie_output;
  std::size_t trie_index = 0;
  trie_dump->add_option("--input", trie_input, "Examples with docs (JSONL)")->required();
  trie_dump->add_option("--index", trie_index, "Record index (default 0)");
  trie_dump->add_option("--output", trie_output, "Write to file instead of stdout");
  add_config_flag(trie_dump, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return run_generate(flags, gen_input, gen_out_dir);
    if (evaluate->parsed())
      return run_evaluate(flags, eval_input, eval_answers, eval_prefix, eval_mauve,
                          eval_strict, eval_no_brackets);
    if (build->parsed())
      return run_build_dataset(flags, build_input, build_output, build_drops,
                               build_resume);
    if (filter->parsed())
      return run_filter(flags, filter_input, filter_output, filter_removed,
                        filter_report, filter_resume);
    if (claim_split->parsed())
      return run_claim_split(split_input, split_output, split_full_history);
    if (stats->parsed()) return run_stats(stats_input, stats_output);
    if (trie->parsed() && trie_dump->parsed())
      return run_trie_dump(flags, trie_input, trie_index, trie_output);
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MalformedOutputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMalformedOutput;
  } catch (const BackendUnavailableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBackendUnavailable;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigurationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

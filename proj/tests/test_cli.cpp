// End-to-end checks of the installed command surface, run against the real
// binary (path injected by CMake as CITEGEN_CLI_PATH).

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef CITEGEN_CLI_PATH
#define CITEGEN_CLI_PATH "citegen"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliDir {
  fs::path path;
  CliDir() {
    path = fs::temp_directory_path() /
           ("citegen_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~CliDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
  std::string command = std::string(CITEGEN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_questions(const std::string& path, int n) {
  std::ofstream out(path);
  for (int i = 0; i < n; ++i) {
    json j;
    j["id"] = "q" + std::to_string(i);
    j["question"] = "What happens outside number " + std::to_string(i) + "?";
    j["qa_pairs"] = json::array({{{"question", "sub"}, {"short_answers", {"cat"}}}});
    j["docs"] = json::array(
        {{{"title", "One"},
          {"text", "The cat sat on the mat. Dogs bark loudly at night. Birds can fly."}},
         {{"title", "Two"},
          {"text", "Rain falls in spring. The sun is hot and bright. Fish swim here."}}});
    out << j.dump() << '\n';
  }
}

void write_raw_samples(const std::string& path, int n) {
  std::ofstream out(path);
  for (int i = 0; i < n; ++i) {
    json j;
    j["id"] = "r" + std::to_string(i);
    j["question"] = "Why do cats sit?";
    j["references"] = {"The cat sat on the mat. Dogs bark loudly at night.",
                       "Rain falls in spring. The sun is hot and bright."};
    j["answer"] = "The cat sat on the mat because rain falls in spring.";
    out << j.dump() << '\n';
  }
}

}  // namespace

TEST_CASE("cli: generate with mock backends requires an explicit seed") {
  CliDir dir;
  write_questions(dir.file("questions.jsonl"), 1);
  int code = run_cli("generate --input " + dir.file("questions.jsonl") + " --out-dir " +
                     dir.file("out"));
  CHECK(code == 2);  // usage error
  code = run_cli("generate --input " + dir.file("questions.jsonl") + " --out-dir " +
                 dir.file("out") + " --seed 11");
  CHECK(code == 0);
  CHECK(fs::exists(dir.file("out") + "/answers.jsonl"));
  CHECK(fs::exists(dir.file("out") + "/manifest.json"));
}

TEST_CASE("cli: generate is byte-identical for a fixed seed") {
  CliDir dir;
  write_questions(dir.file("questions.jsonl"), 3);
  std::string base = "generate --input " + dir.file("questions.jsonl");
  REQUIRE(run_cli(base + " --seed 42 --out-dir " + dir.file("run1")) == 0);
  REQUIRE(run_cli(base + " --seed 42 --out-dir " + dir.file("run2")) == 0);
  CHECK(slurp(dir.file("run1") + "/answers.jsonl") ==
        slurp(dir.file("run2") + "/answers.jsonl"));
  REQUIRE(run_cli(base + " --seed 43 --out-dir " + dir.file("run3")) == 0);
  CHECK(slurp(dir.file("run1") + "/answers.jsonl") !=
        slurp(dir.file("run3") + "/answers.jsonl"));
}

TEST_CASE("cli: generate then evaluate round trip") {
  CliDir dir;
  write_questions(dir.file("questions.jsonl"), 2);
  REQUIRE(run_cli("generate --input " + dir.file("questions.jsonl") + " --seed 7 " +
                  "--out-dir " + dir.file("out")) == 0);
  int code = run_cli("evaluate --input " + dir.file("questions.jsonl") + " --answers " +
                     dir.file("out") + "/answers.jsonl --output-prefix " +
                     dir.file("report"));
  CHECK(code == 0);
  CHECK(fs::exists(dir.file("report") + ".json"));
  CHECK(fs::exists(dir.file("report") + ".examples.jsonl"));
  CHECK(fs::exists(dir.file("report") + ".txt"));

  std::ifstream in(dir.file("report") + ".json");
  json summary;
  in >> summary;
  // Constrained decoding: consistency and attribution are exact.
  CHECK(summary.at("cr").at("mean").get<double>() == 1.0);
  CHECK(summary.at("ar").at("mean").get<double>() == 1.0);
}

TEST_CASE("cli: dataset pipeline build -> filter -> claim-split -> stats") {
  CliDir dir;
  write_raw_samples(dir.file("raw.jsonl"), 4);
  REQUIRE(run_cli("build-dataset --input " + dir.file("raw.jsonl") + " --output " +
                  dir.file("train.jsonl")) == 0);
  CHECK(fs::exists(dir.file("train.jsonl")));

  REQUIRE(run_cli("filter --input " + dir.file("train.jsonl") + " --output " +
                  dir.file("kept.jsonl") + " --report " + dir.file("report.json")) == 0);
  std::ifstream report_in(dir.file("report.json"));
  json report;
  report_in >> report;
  CHECK(report.at("input_count").get<int>() ==
        report.at("kept_count").get<int>() +
            report.at("removed_string_mismatch").get<int>() +
            report.at("removed_nli_fail").get<int>());

  REQUIRE(run_cli("claim-split --input " + dir.file("kept.jsonl") + " --output " +
                  dir.file("claims.jsonl")) == 0);
  std::string first_line;
  std::ifstream claims(dir.file("claims.jsonl"));
  if (std::getline(claims, first_line)) {
    json record = json::parse(first_line);
    std::string input = record.at("input_text").get<std::string>();
    std::string output = record.at("output_text").get<std::string>();
    CHECK(input.rfind("</reference>") == input.size() - 12);
    CHECK(output.rfind("</claim>") == output.size() - 8);
  }

  REQUIRE(run_cli("stats --input " + dir.file("kept.jsonl") + " --output " +
                  dir.file("stats.json")) == 0);
  std::ifstream stats_in(dir.file("stats.json"));
  json stats;
  stats_in >> stats;
  CHECK(stats.contains("samples"));
  CHECK(stats.contains("avg_answer_words"));
  CHECK(stats.contains("avg_citation_words"));
  CHECK(stats.contains("avg_passage_words"));
}

TEST_CASE("cli: trie dump prints ref, token ids, and text per line") {
  CliDir dir;
  write_questions(dir.file("questions.jsonl"), 1);
  REQUIRE(run_cli("trie dump --input " + dir.file("questions.jsonl") + " --output " +
                  dir.file("dump.tsv")) == 0);
  std::ifstream in(dir.file("dump.tsv"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    auto first_tab = line.find('\t');
    auto second_tab = line.find('\t', first_tab + 1);
    REQUIRE(first_tab != std::string::npos);
    REQUIRE(second_tab != std::string::npos);
    CHECK(line.find('/') < first_tab);
  }
  CHECK(lines == 6);  // six inventory sentences in the fixture docs
}

TEST_CASE("cli: constrained/unconstrained flags land in the run manifest") {
  CliDir dir;
  write_questions(dir.file("questions.jsonl"), 1);
  REQUIRE(run_cli("generate --input " + dir.file("questions.jsonl") +
                  " --seed 3 --unconstrained --out-dir " + dir.file("ud")) == 0);
  REQUIRE(run_cli("generate --input " + dir.file("questions.jsonl") +
                  " --seed 3 --constrained --out-dir " + dir.file("cd")) == 0);
  CHECK(slurp(dir.file("ud") + "/manifest.json").find("\"constrained\": false") !=
        std::string::npos);
  CHECK(slurp(dir.file("cd") + "/manifest.json").find("\"constrained\": true") !=
        std::string::npos);
}

TEST_CASE("cli: exit codes distinguish failure classes") {
  CliDir dir;
  // validation error (min > max)
  write_questions(dir.file("questions.jsonl"), 1);
  CHECK(run_cli("generate --input " + dir.file("questions.jsonl") +
                " --seed 1 --min-pairs 5 --max-pairs 2") == 3);
  // usage error: missing input file
  CHECK(run_cli("stats --input " + dir.file("absent.jsonl")) == 2);
  // malformed training data
  {
    std::ofstream bad(dir.file("bad.jsonl"));
    bad << R"({"question":"q","references":["The cat sat."],"answer_tagged":"<reference> unclosed"})"
        << '\n';
  }
  CHECK(run_cli("stats --input " + dir.file("bad.jsonl")) == 5);
  // unknown flag
  CHECK(run_cli("generate --nonsense") == 2);
}

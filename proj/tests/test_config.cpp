#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "citegen/config.hpp"
#include "citegen/errors.hpp"

using namespace citegen;
namespace fs = std::filesystem;

namespace {

struct TempConfig {
  fs::path path;
  explicit TempConfig(const std::string& body) {
    path = fs::temp_directory_path() /
           ("citegen_cfg_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) +
            ".json");
    std::ofstream out(path);
    out << body;
  }
  ~TempConfig() { std::error_code ec; fs::remove(path, ec); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("defaults: mock endpoints everywhere, interleave 2..5") {
  AppConfig config = load_config("");
  CHECK(config.endpoint("refer").is_mock());
  CHECK(config.endpoint("nli").is_mock());
  CHECK(config.generation.mode == GenMode::interleave);
  CHECK(config.generation.min_pairs == 2);
  CHECK(config.generation.max_pairs == 5);
  CHECK(!config.seed_explicit);
}

TEST_CASE("file values load; flags take precedence over the file") {
  TempConfig file(R"({
    "generation": {"min_pairs": 2, "max_pairs": 5, "seed": 17},
    "concurrency": 2,
    "endpoints": {"nli": {"url": "http://localhost:9999", "max_retries": 1}}
  })");
  AppConfig from_file = load_config(file.str());
  CHECK(from_file.generation.min_pairs == 2);
  CHECK(from_file.generation.seed == 17);
  CHECK(from_file.seed_explicit);
  CHECK(from_file.concurrency == 2);
  CHECK(!from_file.endpoint("nli").is_mock());

  ConfigOverrides overrides;
  overrides.min_pairs = 3;
  AppConfig overridden = load_config(file.str(), overrides);
  CHECK(overridden.generation.min_pairs == 3);
  CHECK(overridden.generation.max_pairs == 5);
}

TEST_CASE("invalid ranges are validation errors") {
  TempConfig file(R"({"generation": {"min_pairs": 5, "max_pairs": 2}})");
  CHECK_THROWS_AS(load_config(file.str()), ValidationError);

  ConfigOverrides overrides;
  overrides.min_pairs = 9;
  CHECK_THROWS_AS(load_config("", overrides), ValidationError);
}

TEST_CASE("missing file names the path; unknown keys are listed") {
  try {
    load_config("/definitely/not/here.json");
    FAIL("expected ConfigurationError");
  } catch (const ConfigurationError& e) {
    CHECK(std::string(e.what()).find("/definitely/not/here.json") != std::string::npos);
  }

  TempConfig file(R"({"generation": {"min_pairz": 2}, "outputs": "x"})");
  try {
    load_config(file.str());
    FAIL("expected ConfigurationError");
  } catch (const ConfigurationError& e) {
    std::string what = e.what();
    bool mentions = what.find("min_pairz") != std::string::npos ||
                    what.find("outputs") != std::string::npos;
    CHECK(mentions);
  }
}

TEST_CASE("bad endpoint urls and missing abbreviation files rejected") {
  TempConfig file(R"({"endpoints": {"nli": {"url": "ftp://nope"}}})");
  CHECK_THROWS_AS(load_config(file.str()), ValidationError);
  TempConfig file2(R"({"abbreviations_path": "/no/such/list.txt"})");
  CHECK_THROWS_AS(load_config(file2.str()), ConfigurationError);
}

TEST_CASE("environment variables inject credentials only") {
  TempConfig file(R"({"endpoints": {"nli": {"url": "http://localhost:1234"}}})");
  setenv("CITEGEN_API_KEY", "global-key", 1);
  setenv("CITEGEN_NLI_API_KEY", "nli-key", 1);
  AppConfig config = load_config(file.str());
  unsetenv("CITEGEN_API_KEY");
  unsetenv("CITEGEN_NLI_API_KEY");
  // Role-specific key wins for nli; others get the global key.
  CHECK(config.endpoint("nli").headers.at("Authorization") == "Bearer nli-key");
  CHECK(config.endpoint("refer").headers.at("Authorization") == "Bearer global-key");
}

TEST_CASE("digest is stable and key-order independent, sensitive to values") {
  TempConfig a(R"({"generation": {"min_pairs": 2, "max_pairs": 5}})");
  TempConfig b(R"({"generation": {"max_pairs": 5, "min_pairs": 2}})");
  TempConfig c(R"({"generation": {"min_pairs": 3, "max_pairs": 5}})");
  CHECK(load_config(a.str()).digest() == load_config(b.str()).digest());
  CHECK(load_config(a.str()).digest() != load_config(c.str()).digest());
  // Credential values never enter the digest.
  setenv("CITEGEN_API_KEY", "secret-one", 1);
  std::string with_key = load_config(a.str()).digest();
  setenv("CITEGEN_API_KEY", "secret-two", 1);
  std::string other_key = load_config(a.str()).digest();
  unsetenv("CITEGEN_API_KEY");
  CHECK(with_key == other_key);
}

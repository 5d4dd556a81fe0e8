#include <doctest.h>

#include "citegen/answer.hpp"
#include "citegen/errors.hpp"
#include "citegen/records.hpp"
#include "citegen/text.hpp"
#include "test_util.hpp"

using namespace citegen;

namespace {

// The dryer-sheet training example, reference part of three sentences.
const std::string kDryerAnswer =
    "According to the citation: <reference> The most common way people know how to "
    "prevent dryer static on clothes is with dryer sheets. Dryer sheets are sheets "
    "that are coated in a fabric softener full of positively charged electrons. These "
    "bond to the negatively charged ones and keep static from happening. </reference> "
    "We can know that: <claim> Dryer sheets are coated in a fabric softener full of "
    "positively charged electrons, which bond to the negatively charged ones in your "
    "clothes and keep static from happening. </claim>";

}  // namespace

TEST_CASE("parse_attributed: full training-style answer") {
  AttributedAnswer answer = parse_attributed(kDryerAnswer, /*strict=*/true);
  REQUIRE(answer.pairs.size() == 1);
  const RefClaimPair& pair = answer.pairs[0];
  REQUIRE(pair.reference_sentences.size() == 3);
  CHECK(pair.reference_sentences[0] ==
        "The most common way people know how to prevent dryer static on clothes is "
        "with dryer sheets.");
  CHECK(pair.reference_sentences[2] ==
        "These bond to the negatively charged ones and keep static from happening.");
  CHECK(pair.claim_text ==
        "Dryer sheets are coated in a fabric softener full of positively charged "
        "electrons, which bond to the negatively charged ones in your clothes and "
        "keep static from happening.");
  REQUIRE(answer.connectives.size() == 2);
  CHECK(answer.connectives[0] == "According to the citation:");
  CHECK(answer.connectives[1] == "We can know that:");
}

TEST_CASE("parse_attributed: minimal pair without connectives") {
  AttributedAnswer answer =
      parse_attributed("<reference> A. </reference><claim> B. </claim>", true);
  REQUIRE(answer.pairs.size() == 1);
  CHECK(answer.pairs[0].reference_sentences == std::vector<std::string>{"A."});
  CHECK(answer.pairs[0].claim_text == "B.");
  CHECK(answer.connectives == std::vector<std::string>{"", ""});
}

TEST_CASE("parse_attributed: strict mode rejects missing close") {
  CHECK_THROWS_AS(parse_attributed("<reference> A. <claim> B. </claim>", true),
                  MalformedOutputError);
  try {
    parse_attributed("<reference> A. <claim> B. </claim>", true);
  } catch (const MalformedOutputError& e) {
    CHECK(e.offset() == 15);  // byte offset of the out-of-order <claim>
    CHECK(std::string(e.what()).find("byte 15") != std::string::npos);
  }
}

TEST_CASE("parse_attributed: strict mode rejects trailing prose and stray tags") {
  CHECK_THROWS_AS(
      parse_attributed(
          "<reference> A. </reference> <claim> B. </claim> And then some.", true),
      MalformedOutputError);
  CHECK_THROWS_AS(parse_attributed("</claim>", true), MalformedOutputError);
  CHECK_THROWS_AS(parse_attributed("untagged only.", true), MalformedOutputError);
  CHECK_NOTHROW(
      parse_attributed("<reference> A. </reference> <claim> B. </claim>   ", true));
}

TEST_CASE("parse_attributed: non-strict turns untagged sentences into bare pairs") {
  AttributedAnswer answer = parse_attributed("The sky is blue. Water is wet.", false);
  REQUIRE(answer.pairs.size() == 2);
  CHECK(answer.pairs[0].reference_sentences.empty());
  CHECK(answer.pairs[0].claim_text == "The sky is blue.");
  CHECK(answer.pairs[1].claim_text == "Water is wet.");
}

TEST_CASE("parse_attributed: non-strict keeps tagged pairs and surrounding prose") {
  AttributedAnswer answer = parse_attributed(
      "Intro sentence. According to the citation: <reference> A. </reference> "
      "We can know that: <claim> B. </claim> Trailing sentence.",
      false);
  REQUIRE(answer.pairs.size() == 3);
  CHECK(answer.pairs[0].reference_sentences.empty());
  CHECK(answer.pairs[0].claim_text == "Intro sentence.");
  CHECK(answer.pairs[1].reference_sentences == std::vector<std::string>{"A."});
  CHECK(answer.pairs[1].claim_text == "B.");
  CHECK(answer.pairs[2].claim_text == "Trailing sentence.");
  // Non-strict parse of a well-formed string matches the strict parse.
  AttributedAnswer lenient = parse_attributed(kDryerAnswer, false);
  AttributedAnswer strict = parse_attributed(kDryerAnswer, true);
  REQUIRE(lenient.pairs.size() == strict.pairs.size());
  CHECK(lenient.pairs[0].claim_text == strict.pairs[0].claim_text);
  CHECK(lenient.connectives == strict.connectives);
}

TEST_CASE("render_attributed: default connectives") {
  AttributedAnswer answer;
  answer.pairs.push_back({{"A."}, "B.", std::nullopt});
  CHECK(render_attributed(answer) ==
        "According to the citation: <reference> A. </reference> We can know that: "
        "<claim> B. </claim>");
}

TEST_CASE("render_attributed: empty answer and empty-claim misuse") {
  AttributedAnswer answer;
  CHECK(render_attributed(answer) == "");
  answer.pairs.push_back({{"A."}, "", std::nullopt});
  CHECK_THROWS_AS(render_attributed(answer), UsageError);
}

TEST_CASE("round-trip: render(parse(t)) == normalize(t) for canonical strings") {
  CHECK(render_attributed(parse_attributed(kDryerAnswer, true)) ==
        normalize(kDryerAnswer));
  testutil::TaggedStringGen gen(42);
  for (int i = 0; i < 200; ++i) {
    std::string text = gen.well_formed();
    AttributedAnswer answer = parse_attributed(text, true);
    CHECK(render_attributed(answer) == normalize(text));
  }
}

TEST_CASE("round-trip: pair order follows text order") {
  testutil::TaggedStringGen gen(99);
  for (int i = 0; i < 50; ++i) {
    std::string text = gen.well_formed();
    AttributedAnswer answer = parse_attributed(text, true);
    std::size_t cursor = 0;
    for (const auto& pair : answer.pairs) {
      std::size_t at = text.find(pair.claim_text, cursor);
      REQUIRE(at != std::string::npos);
      CHECK(at >= cursor);
      cursor = at;
    }
  }
}

TEST_CASE("concat_claims joins claims in order, no tags") {
  AttributedAnswer answer;
  answer.pairs.push_back({{"R one."}, "X.", std::nullopt});
  answer.pairs.push_back({{"R two."}, "Y.", std::nullopt});
  CHECK(concat_claims(answer) == "X. Y.");

  AttributedAnswer single;
  single.pairs.push_back({{}, "Only claim here.", std::nullopt});
  CHECK(concat_claims(single) == "Only claim here.");
  CHECK(concat_claims(AttributedAnswer{}) == "");

  testutil::TaggedStringGen gen(3);
  for (int i = 0; i < 50; ++i) {
    std::string joined = concat_claims(parse_attributed(gen.well_formed(), true));
    CHECK(joined.find("<claim>") == std::string::npos);
    CHECK(joined.find("<reference>") == std::string::npos);
    CHECK(joined.find("</") == std::string::npos);
  }
}

TEST_CASE("answer records: canonical line round-trip") {
  AnswerRecord record;
  record.id = "ex-1";
  record.answer = parse_attributed(kDryerAnswer, true);
  record.answer.pairs[0].provenance = std::vector<SentenceRef>{{"4", 0}, {"4", 1}, {"4", 2}};
  GenerationTrace trace;
  trace.mode = GenMode::interleave;
  trace.steps.push_back({TracePhase::reference, 12});
  trace.steps.push_back({TracePhase::claim, 8});
  trace.forced_events.emplace_back(0, ForcedEvent::suppressed_end);
  record.trace = trace;

  std::string line = to_json_line(record);
  AnswerRecord loaded = answer_record_from_json(line);
  CHECK(loaded.id == "ex-1");
  REQUIRE(loaded.answer.pairs.size() == 1);
  CHECK(loaded.answer.pairs[0].claim_text == record.answer.pairs[0].claim_text);
  REQUIRE(loaded.answer.pairs[0].provenance.has_value());
  CHECK(loaded.answer.pairs[0].provenance->size() == 3);
  CHECK((*loaded.answer.pairs[0].provenance)[0].passage_id == "4");
  REQUIRE(loaded.trace.has_value());
  CHECK(loaded.trace->mode == GenMode::interleave);
  REQUIRE(loaded.trace->steps.size() == 2);
  CHECK(loaded.trace->steps[0].phase == TracePhase::reference);
  REQUIRE(loaded.trace->forced_events.size() == 1);
  CHECK(loaded.trace->forced_events[0].second == ForcedEvent::suppressed_end);

  CHECK_THROWS_AS(answer_record_from_json("not json"), UsageError);
  CHECK_THROWS_AS(answer_record_from_json("{\"raw_text\": \"x\"}"), UsageError);
}

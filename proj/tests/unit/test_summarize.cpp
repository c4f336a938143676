// Copyright 2026 The aoscnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <json.hpp>

#include "aos/error.hpp"
#include "aos/summarize.hpp"

using namespace aos;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an aos::Error");
  return ErrorKind::Usage;
}

const AspectSchema kTwo({"battery", "screen"});
const AspectSchema kFive({"battery", "run_speed", "speaker", "screen", "camera"});

ClassifiedSentence cs(std::string id, int ordinal, std::string text, std::vector<bool> aspects,
                      std::optional<Polarity> polarity) {
  ClassifiedSentence c;
  c.ref = {std::move(id), ordinal, std::move(text)};
  c.aspect_probabilities.reserve(aspects.size());
  for (bool a : aspects) c.aspect_probabilities.push_back(a ? 0.8 : 0.2);
  c.aspects = std::move(aspects);
  if (polarity) c.sentiment = SentimentPrediction{*polarity, *polarity == Polarity::Positive ? 0.75 : 0.125};
  return c;
}

/// Aspect i fires iff the sentence contains the aspect
/// name; sentiment is positive iff it contains "good".
struct KeywordModel final : AspectSentimentModel {
  AspectSchema aspects;
  const AspectSchema& schema() const override { return aspects; }
  TaskPrediction predict_task(std::size_t slot, const Sentence& s) const override {
    const std::string word = slot < aspects.size() ? aspects.name(slot) : "good";
    const bool hit = std::find(s.tokens.begin(), s.tokens.end(), word) != s.tokens.end();
    return {hit ? 0.9 : 0.1, hit};
  }
};

}  // namespace

TEST_CASE("aggregate counts polarities per aspect") {
  std::vector<ClassifiedSentence> in{cs("r1", 0, "battery dies", {true, false}, Polarity::Negative),
                                     cs("r2", 0, "battery weak", {true, false}, Polarity::Negative),
                                     cs("r1", 1, "nice screen", {false, true}, Polarity::Positive),
                                     cs("r3", 0, "meh", {false, false}, std::nullopt)};
  auto r = aggregate(in, kTwo);
  REQUIRE(r.summaries.size() == 2);
  CHECK(r.summaries[0].name == "battery");
  CHECK(r.summaries[0].positive_count == 0);
  CHECK(r.summaries[0].negative_count == 2);
  CHECK(r.summaries[1].positive_count == 1);
  CHECK(r.summaries[1].negative_count == 0);
  CHECK(r.processed == 4);
  CHECK(r.mapped == 3);
  CHECK(r.summaries[0].entries[0].review_id == "r1");
  CHECK(r.summaries[0].entries[1].review_id == "r2");
  CHECK(r.summaries[1].entries[0].probability == 0.75);
}

TEST_CASE("a multi-aspect sentence counts once per aspect") {
  std::vector<ClassifiedSentence> in{cs("r", 0, "battery and screen rock", {true, true}, Polarity::Positive)};
  auto r = aggregate(in, kTwo);
  CHECK(r.summaries[0].positive_count == 1);
  CHECK(r.summaries[1].positive_count == 1);
  CHECK(r.mapped == 1);
  CHECK(r.processed == 1);
}

TEST_CASE("entries are ordered by review and ordinal") {
  std::vector<ClassifiedSentence> in{cs("b", 2, "x", {true, false}, Polarity::Positive),
                                     cs("a", 5, "y", {true, false}, Polarity::Negative),
                                     cs("b", 0, "z", {true, false}, Polarity::Negative)};
  auto e = aggregate(in, kTwo).summaries[0].entries;
  CHECK(e[0].text == "y");
  CHECK(e[1].text == "z");
  CHECK(e[2].text == "x");
}

TEST_CASE("empty input gives zero counts") {
  auto r = aggregate(std::span<const ClassifiedSentence>{}, kFive);
  CHECK(r.summaries.size() == 5);
  for (const auto& s : r.summaries) {
    CHECK(s.positive_count == 0);
    CHECK(s.negative_count == 0);
    CHECK(s.entries.empty());
  }
  CHECK(r.processed == 0);
  CHECK(r.mapped == 0);
}

TEST_CASE("aggregate rejects gating violations and wrong widths") {
  std::vector<ClassifiedSentence> orphan{cs("r", 0, "x", {false, false}, Polarity::Positive)};
  CHECK(kind_of([&] { aggregate(orphan, kTwo); }) == ErrorKind::Validation);
  std::vector<ClassifiedSentence> silent{cs("r", 0, "x", {true, false}, std::nullopt)};
  CHECK(kind_of([&] { aggregate(silent, kTwo); }) == ErrorKind::Validation);
  std::vector<ClassifiedSentence> wide{cs("r", 0, "x", {true, false, false}, Polarity::Positive)};
  CHECK(kind_of([&] { aggregate(wide, kTwo); }) == ErrorKind::Validation);
}

TEST_CASE("the JSON document round-trips and is stable") {
  std::vector<ClassifiedSentence> in{cs("r1", 0, "battery \"dies\" <fast>", {true, false, false, false, true},
                                        Polarity::Negative),
                                     cs("r1", 1, "camera good", {false, false, false, false, true}, Polarity::Positive),
                                     cs("r2", 0, "nothing", {false, false, false, false, false}, std::nullopt)};
  auto r = aggregate(in, kFive);
  const std::string doc = emit_json(r);
  CHECK(emit_json(r) == doc);
  CHECK(parse_report_json(doc) == r);

  auto j = nlohmann::json::parse(doc);
  REQUIRE(j["aspects"].size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(j["aspects"][i]["name"] == kFive.name(i));
  CHECK(j["totals"]["processed"] == 3);
  CHECK(j["totals"]["mapped"] == 2);
  CHECK(j["aspects"][4]["positive"] == 1);
  CHECK(j["aspects"][4]["negative"] == 1);

  CHECK(kind_of([] { parse_report_json("{nope"); }) == ErrorKind::Parse);
  auto tampered = j;
  tampered["aspects"][0]["positive"] = 7;
  CHECK(kind_of([&] { parse_report_json(tampered.dump()); }) == ErrorKind::Validation);
}

TEST_CASE("html escapes markup and shows the counts") {
  CHECK(html_escape("a<b>&\"c\"'") == "a&lt;b&gt;&amp;&quot;c&quot;&#39;");
  CHECK(html_escape("plain") == "plain");

  std::vector<ClassifiedSentence> in{cs("r1", 0, "battery <b>great</b>", {true, false}, Polarity::Positive),
                                     cs("r1", 1, "battery bad", {true, false}, Polarity::Negative),
                                     cs("r2", 0, "battery & poor", {true, false}, Polarity::Negative)};
  const std::string page = emit_html(aggregate(in, kTwo));
  CHECK(page.find("<!DOCTYPE html>") != std::string::npos);
  CHECK(page.find("battery") != std::string::npos);
  CHECK(page.find(">1<") != std::string::npos);
  CHECK(page.find(">2<") != std::string::npos);
  CHECK(page.find("href=\"#aspect-0-pos\"") != std::string::npos);
  CHECK(page.find("id=\"aspect-0-neg\"") != std::string::npos);
  CHECK(page.find("<b>great</b>") == std::string::npos);
  CHECK(page.find("&lt;b&gt;great&lt;/b&gt;") != std::string::npos);
  CHECK(page.find("battery &amp; poor") != std::string::npos);
  CHECK(emit_html(aggregate(in, kTwo)) == page);
}

TEST_CASE("an empty report is still a complete page") {
  const std::string page = emit_html(aggregate(std::span<const ClassifiedSentence>{}, kTwo));
  CHECK(page.find("<!DOCTYPE html>") != std::string::npos);
  CHECK(page.find("</html>") != std::string::npos);
  CHECK(page.find("screen") != std::string::npos);
}

TEST_CASE("summarize_reviews runs the whole pipeline") {
  KeywordModel m;
  m.aspects = kTwo;
  auto vocab = Vocabulary::from_tokens({"battery", "screen", "good", "bad"});
  std::vector<Review> reviews{{"r1", "The battery is good. The screen is bad!"}, {"r2", "Nothing here. ..."}, {"r3", ""}};
  auto r = summarize_reviews(m, vocab, reviews, 3);
  CHECK(r.summaries[0].positive_count == 1);
  CHECK(r.summaries[1].negative_count == 1);
  CHECK(r.mapped == 2);
  // "..." is a sentence of punctuation tokens; the empty review adds nothing.
  CHECK(r.processed == 4);
  CHECK(summarize_reviews(m, vocab, reviews, 1) == r);
}

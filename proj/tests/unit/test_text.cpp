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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "aos/error.hpp"
#include "aos/text.hpp"

using namespace aos;
namespace fs = std::filesystem;

namespace {

const fs::path kData = AOS_TEST_DATA_DIR;

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an aos::Error");
  return ErrorKind::Usage;
}

using Strings = std::vector<std::string>;

}  // namespace

TEST_CASE("segment_review splits terminal clauses") {
  CHECK(segment_review("Great phone. Battery dies fast!") == Strings{"Great phone.", "Battery dies fast!"});
  CHECK(segment_review("").empty());
  CHECK(segment_review("   \n ").empty());
  CHECK(segment_review("I paid $5.99 for it.") == Strings{"I paid $5.99 for it."});
}

TEST_CASE("segment_review matches the hand-annotated fixture") {
  std::istringstream in(read_all(kData / "segmentation50.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    auto rec = nlohmann::json::parse(line);
    INFO(rec["review_id"].get<std::string>());
    CHECK(segment_review(rec["text"].get<std::string>()) == rec["sentences"].get<Strings>());
    ++n;
  }
  CHECK(n == 50);
}

TEST_CASE("segment_review never returns blank pieces and preserves text") {
  for (std::string text : {"a. b. c.", "!!! ??? ...", "x.  y", "end."}) {
    auto parts = segment_review(text);
    std::string joined;
    for (const auto& p : parts) {
      CHECK_FALSE(p.empty());
      CHECK(p.front() != ' ');
      CHECK(p.back() != ' ');
      joined += p;
    }
    std::string squeezed;
    for (char c : text)
      if (c != ' ') squeezed += c;
    CHECK(joined == squeezed);
  }
}

TEST_CASE("tokenize lowercases and isolates punctuation") {
  CHECK(tokenize("Battery dies fast!") == Strings{"battery", "dies", "fast", "!"});
  CHECK(tokenize("runs smoothly, fast") == Strings{"runs", "smoothly", ",", "fast"});
  CHECK(tokenize("don't") == Strings{"don't"});
  CHECK(tokenize("'quoted'") == Strings{"'", "quoted", "'"});
  CHECK(tokenize("rock 'n' roll") == Strings{"rock", "'", "n", "'", "roll"});
  CHECK(tokenize("$5.99") == Strings{"$", "5", ".", "99"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("caf\xc3\xa9") == Strings{"caf\xc3\xa9"});
}

TEST_CASE("build_vocabulary agrees with a frequency oracle") {
  std::vector<Strings> sentences = {{"a", "b"}, {"a"}};
  auto v1 = build_vocabulary(sentences, 1);
  CHECK(v1.size() == 4);
  CHECK(v1.token(kPadId) == "<pad>");
  CHECK(v1.token(kUnkId) == "<unk>");
  CHECK(v1.id_of("a") == 2);
  CHECK(v1.id_of("b") == 3);
  auto v2 = build_vocabulary(sentences, 2);
  CHECK(v2.size() == 3);
  CHECK_FALSE(v2.contains("b"));
  CHECK(v2.id_of("b") == kUnkId);
  CHECK(kind_of([&] { build_vocabulary(sentences, 0); }) == ErrorKind::Usage);

  // Brute-force count over a larger input.
  std::vector<Strings> big = {{"x", "y", "z", "y"}, {"z", "z", "w"}, {"y"}, {"q"}};
  std::map<std::string, int> freq;
  for (const auto& s : big)
    for (const auto& t : s) ++freq[t];
  auto v = build_vocabulary(big, 1);
  REQUIRE(v.size() == freq.size() + 2);
  for (TokenId id = 3; id < static_cast<TokenId>(v.size()); ++id) {
    const auto& prev = v.token(id - 1);
    const auto& cur = v.token(id);
    CHECK((freq[prev] > freq[cur] || (freq[prev] == freq[cur] && prev < cur)));
  }
}

TEST_CASE("vocabulary reserves pad and unk and round-trips tokens") {
  Vocabulary empty;
  CHECK(empty.size() == 2);
  CHECK(empty.corpus_tokens().empty());
  auto v = Vocabulary::from_tokens({"battery", "screen"});
  CHECK(v.id_of("screen") == 3);
  CHECK(v.id_of("<pad>") == kUnkId);
  CHECK(kind_of([&] { v.token(4); }) == ErrorKind::Index);
  CHECK(kind_of([&] { Vocabulary::from_tokens({"a", "a"}); }) == ErrorKind::Validation);
  CHECK(v.content_hash() == Vocabulary::from_tokens({"battery", "screen"}).content_hash());
  CHECK(v.content_hash() != Vocabulary::from_tokens({"screen", "battery"}).content_hash());
}

TEST_CASE("encode pads both sides and maps unknown words to unk") {
  auto v = Vocabulary::from_tokens({"a", "b"});
  CHECK(encode(Strings{"a", "b"}, v, 1) == IdSequence{kPadId, 2, 3, kPadId});
  CHECK(encode(Strings{"zzz-unseen"}, v, 1) == IdSequence{kPadId, kUnkId, kPadId});
  CHECK(encode(Strings{}, v, 1) == IdSequence{kPadId, kPadId});
  CHECK(encode(Strings{"a"}, v, 2) == IdSequence{0, 0, 2, 0, 0});
  CHECK(decode(encode(Strings{"b", "a"}, v, 1), v) == Strings{"b", "a"});
  CHECK(kind_of([&] { pad(IdSequence{2}, -1); }) == ErrorKind::Domain);
}

TEST_CASE("load_corpus reads the three-line fixture") {
  Corpus c = load_corpus(kData / "corpus3.jsonl");
  CHECK(c.schema.names() == Strings{"battery", "screen"});
  REQUIRE(c.sentences.size() == 3);
  CHECK(c.sentences[0].aspects == std::vector<bool>{true, false});
  CHECK(c.sentences[0].sentiment == Polarity::Negative);
  CHECK(c.sentences[1].aspects == std::vector<bool>{true, true});
  CHECK(c.sentences[2].aspects == std::vector<bool>{false, false});
  CHECK_FALSE(c.sentences[2].sentiment.has_value());
  CHECK(c.sentences[0].sentence.tokens == Strings{"battery", "dies", "fast", "!"});
  for (const auto& ls : c.sentences) {
    CHECK(ls.sentence.length() == ls.sentence.tokens.size());
    for (TokenId id : ls.sentence.ids) CHECK(c.vocabulary.token(id) != "<unk>");
  }

  auto st = corpus_stats(c);
  CHECK(st.per_aspect == std::vector<std::size_t>{2, 1});
  CHECK(st.others == 1);
  CHECK(st.total == 3);
  CHECK(format_stats(st, c.schema) == "Aspects\t#Sentences\nbattery\t2\nscreen\t1\nothers\t1\nall\t3\n");
}

TEST_CASE("parse_corpus validates records") {
  AspectSchema schema({"battery", "screen"});
  auto line = [](const std::string& aspects, const std::string& sentiment) {
    return R"({"review_id":"r","ordinal":0,"text":"some text","aspects":)" + aspects +
           R"(,"sentiment":)" + sentiment + "}\n";
  };
  CHECK(kind_of([&] { parse_corpus(line("[]", "\"pos\""), schema); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { parse_corpus(line("[\"battery\"]", "null"), schema); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { parse_corpus(line("[\"camera\"]", "\"neg\""), schema); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { parse_corpus(line("[\"battery\"]", "\"meh\""), schema); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_corpus("{not json\n", schema); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_corpus(line("[]", "null"), std::nullopt); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { parse_corpus("{\"schema\":[\"x\"]}\n", schema); }) == ErrorKind::Validation);

  auto empty = parse_corpus("", schema);
  CHECK(empty.sentences.empty());
  CHECK(empty.vocabulary.size() == 2);
  auto st = corpus_stats(empty);
  CHECK(st.per_aspect == std::vector<std::size_t>{0, 0});
  CHECK(st.others == 0);
  CHECK(st.total == 0);

  try {
    parse_corpus("{\"schema\":[\"battery\",\"screen\"]}\n" + line("[]", "null") + "oops\n", std::nullopt, 1, "f.jsonl");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("f.jsonl:3") != std::string::npos);
  }
}

TEST_CASE("ingest and write_corpus round-trip through load_corpus") {
  AspectSchema schema({"battery", "screen"});
  std::vector<Review> reviews = {{"a", "Great phone. Battery dies fast!"}, {"b", "Screen is dim."}};
  auto sentences = ingest_reviews(reviews, schema);
  REQUIRE(sentences.size() == 3);
  CHECK(sentences[1].sentence.review_id == "a");
  CHECK(sentences[1].sentence.ordinal == 1);
  CHECK(sentences[2].sentence.ordinal == 0);

  const fs::path tmp = fs::temp_directory_path() / "aos_text_roundtrip.jsonl";
  sentences[1].aspects[0] = true;
  sentences[1].sentiment = Polarity::Negative;
  write_corpus(tmp, schema, sentences);
  Corpus back = load_corpus(tmp);
  fs::remove(tmp);
  REQUIRE(back.sentences.size() == 3);
  CHECK(back.schema == schema);
  CHECK(back.sentences[1].aspects == std::vector<bool>{true, false});
  CHECK(back.sentences[1].sentiment == Polarity::Negative);
  CHECK(back.sentences[0].sentence.raw == "Great phone.");
}

TEST_CASE("missing files are io errors") {
  CHECK(kind_of([] { load_corpus("/nonexistent/corpus.jsonl"); }) == ErrorKind::Io);
  CHECK(kind_of([] { load_reviews("/nonexistent/reviews.jsonl"); }) == ErrorKind::Io);
}

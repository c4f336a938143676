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

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "aos/error.hpp"
#include "aos/eval.hpp"
#include "aos/train.hpp"
#include "support/oracles.hpp"

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

const std::filesystem::path kData = AOS_TEST_DATA_DIR;

/// Aspect i fires when the aspect name occurs as a token; sentiment is
/// positive when "great" occurs.
struct KeywordModel final : AspectSentimentModel {
  AspectSchema aspects;
  const AspectSchema& schema() const override { return aspects; }
  TaskPrediction predict_task(std::size_t slot, const Sentence& s) const override {
    const std::string word = slot < aspects.size() ? aspects.name(slot) : "great";
    const bool hit = std::find(s.tokens.begin(), s.tokens.end(), word) != s.tokens.end();
    return {hit ? 0.9 : 0.1, hit};
  }
};

Trainer keyword_trainer() {
  return [](const Corpus& c, std::span<const std::size_t>, const Hyperparams&) {
    auto m = std::make_unique<KeywordModel>();
    m->aspects = c.schema;
    return std::unique_ptr<AspectSentimentModel>(std::move(m));
  };
}

Hyperparams tiny_hp() {
  Hyperparams hp;
  hp.k = 5;
  hp.m_aspect = 4;
  hp.m_sentiment = 3;
  hp.batch_size = 10;
  hp.epochs = 2;
  return hp;
}

}  // namespace

TEST_CASE("precision, recall and F1 match the count oracle") {
  auto s = precision_recall_f1({8, 2, 2, 0});
  CHECK(s.precision == doctest::Approx(0.8));
  CHECK(s.recall == doctest::Approx(0.8));
  CHECK(s.f1 == doctest::Approx(0.8));
  CHECK_FALSE(s.degenerate);

  auto zero = precision_recall_f1({0, 0, 0, 7});
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);
  CHECK(zero.degenerate);

  // Nonzero counts with no true positive: a real zero.
  auto miss = precision_recall_f1({0, 3, 4, 1});
  CHECK(miss.f1 == 0.0);
  CHECK_FALSE(miss.degenerate);

  for (std::size_t tp = 0; tp < 6; ++tp)
    for (std::size_t fp = 0; fp < 6; ++fp)
      for (std::size_t fn = 0; fn < 6; ++fn) {
        auto got = precision_recall_f1({tp, fp, fn, 0});
        auto want = oracle::f1_from_counts(oracle::Counts{tp, fp, fn});
        CHECK(got.f1 == doctest::Approx(want).epsilon(1e-12));
      }
}

TEST_CASE("F1 of 76.1% precision and 72.8% recall rounds to 74.4%") {
  const double p = 0.761, r = 0.728;
  CHECK(std::round(1000.0 * 2 * p * r / (p + r)) / 10.0 == doctest::Approx(74.4));
  auto s = precision_recall_f1({554008, 173992, 206992, 0});
  CHECK(std::round(s.f1 * 1000.0) / 10.0 == doctest::Approx(74.4));
}

TEST_CASE("accuracy") {
  CHECK(accuracy(84, 100) == doctest::Approx(0.84));
  CHECK(accuracy(0, 10) == 0.0);
  CHECK(kind_of([] { accuracy(0, 0); }) == ErrorKind::Domain);
  CHECK(kind_of([] { accuracy(3, 2); }) == ErrorKind::Domain);
}

TEST_CASE("kfold_split partitions the indices") {
  auto f = kfold_split(10, 5, 1);
  std::set<std::size_t> seen;
  for (int i = 0; i < 5; ++i) {
    auto test = f.test_indices(i);
    CHECK(test.size() == 2);
    CHECK(f.train_indices(i).size() == 8);
    for (auto x : test) CHECK(seen.insert(x).second);
  }
  CHECK(seen.size() == 10);

  auto g = kfold_split(12, 5, 1);
  std::multiset<std::size_t> sizes;
  for (int i = 0; i < 5; ++i) sizes.insert(g.test_indices(i).size());
  CHECK(sizes == std::multiset<std::size_t>{2, 2, 2, 3, 3});

  CHECK(kfold_split(97, 5, 42).fold_of == kfold_split(97, 5, 42).fold_of);
  CHECK(kfold_split(97, 5, 42).fold_of != kfold_split(97, 5, 43).fold_of);
  CHECK(kind_of([] { kfold_split(10, 1, 1); }) == ErrorKind::Usage);
  CHECK(kind_of([] { kfold_split(3, 5, 1); }) == ErrorKind::Validation);
}

TEST_CASE("evaluate_fold counts against gold labels") {
  Corpus c = load_corpus(kData / "corpus3.jsonl");
  KeywordModel m;
  m.aspects = c.schema;
  std::vector<std::size_t> all{0, 1, 2};
  FoldResult r = evaluate_fold(m, c, all);
  std::size_t gold_battery = 0, gold_sent = 0;
  for (const auto& ls : c.sentences) {
    gold_battery += ls.aspects[0];
    gold_sent += ls.sentiment.has_value();
  }
  const auto& b = r.aspect_counts[0];
  CHECK(b.tp + b.fn == gold_battery);
  CHECK(b.total() == 3);
  CHECK(r.sentiment_total == gold_sent);

  KeywordModel wrong;
  wrong.aspects = AspectSchema({"a", "b", "c"});
  CHECK(kind_of([&] { evaluate_fold(wrong, c, all); }) == ErrorKind::Validation);

  FoldResult none = evaluate_fold(m, c, std::vector<std::size_t>{2});
  CHECK(none.sentiment_degenerate);
  CHECK(none.sentiment_total == 0);
}

TEST_CASE("cross_validate averages per-fold values") {
  Corpus c = load_corpus(kData / "fixture50.jsonl");
  auto report = cross_validate(keyword_trainer(), c, Hyperparams{}, 5, 7, "keyword");
  REQUIRE(report.per_fold.size() == 5);
  for (std::size_t a = 0; a < c.schema.size(); ++a) {
    double f1 = 0.0;
    for (const auto& r : report.per_fold) f1 += r.aspect_scores[a].f1;
    CHECK(report.mean_aspect[a].f1 == doctest::Approx(f1 / 5.0));
  }
  double acc = 0.0;
  for (const auto& r : report.per_fold) acc += r.sentiment_accuracy;
  CHECK(report.mean_sentiment_accuracy == doctest::Approx(acc / 5.0));

  // Every sentence lands in exactly one test fold.
  std::size_t tested = 0;
  for (const auto& r : report.per_fold) tested += r.aspect_counts[0].total();
  CHECK(tested == c.sentences.size());
}

TEST_CASE("a fixture run reports five folds of every task and is reproducible") {
  Corpus c = load_corpus(kData / "fixture50.jsonl");
  auto trainer = make_trainer(Architecture::Cascaded);
  auto a = cross_validate(trainer, c, tiny_hp(), 5, 3, "ccnn");
  auto b = cross_validate(trainer, c, tiny_hp(), 5, 3, "ccnn");
  CHECK(report_json(a) == report_json(b));

  auto doc = nlohmann::json::parse(report_json(a));
  CHECK(doc["folds"] == 5);
  REQUIRE(doc["per_fold"].size() == 5);
  for (const auto& f : doc["per_fold"]) {
    CHECK(f["aspects"].size() == c.schema.size());
    CHECK(f.contains("sentiment"));
  }
  CHECK(doc["mean"]["aspects"].size() == c.schema.size());
  CHECK(doc["aspects"].get<std::vector<std::string>>() == c.schema.names());
}

TEST_CASE("report_table prints percentages with one decimal") {
  Corpus c = load_corpus(kData / "fixture50.jsonl");
  auto report = cross_validate(keyword_trainer(), c, Hyperparams{}, 5, 7, "keyword");
  auto table = report_table(report);
  CHECK(table.rfind("method: keyword  folds: 5  seed: 7\n", 0) == 0);
  CHECK(table.find("battery P\tR\tF") != std::string::npos);
  CHECK(table.find("\nmean\t") != std::string::npos);
  // Title, blank, header, five folds, mean, blank, footnote.
  CHECK(std::count(table.begin(), table.end(), '\n') == 11);
}

TEST_CASE("architecture names") {
  CHECK(parse_architecture("ccnn") == Architecture::Cascaded);
  CHECK(parse_architecture("mcnn") == Architecture::Multitask);
  CHECK(parse_architecture("svm") == Architecture::Svm);
  CHECK(to_string(Architecture::Multitask) == "mcnn");
  CHECK(kind_of([] { parse_architecture("CNN"); }) == ErrorKind::Usage);
}

TEST_CASE("select_lambda returns a candidate and is deterministic") {
  Corpus c = load_corpus(kData / "fixture50.jsonl");
  std::vector<std::size_t> train(c.sentences.size());
  for (std::size_t i = 0; i < train.size(); ++i) train[i] = i;
  const std::vector<double> grid{0.05, 0.5};
  double a = select_lambda(c, train, tiny_hp(), grid);
  CHECK(std::find(grid.begin(), grid.end(), a) != grid.end());
  CHECK(select_lambda(c, train, tiny_hp(), grid) == a);
  CHECK(kind_of([&] { select_lambda(c, train, tiny_hp(), {}); }) == ErrorKind::Usage);
  CHECK(select_lambda(c, train, tiny_hp(), std::vector<double>{0.25}) == 0.25);
}

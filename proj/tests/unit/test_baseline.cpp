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

#include "aos/baseline.hpp"
#include "aos/error.hpp"

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

SparseBinaryVector sbv(std::vector<TokenId> ids) { return SparseBinaryVector{std::move(ids)}; }

/// Dense evaluation of the squared-hinge objective.
double objective_oracle(const LinearModel& m, std::span<const LabeledVector> data) {
  double reg = 0.0;
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) reg += m.weights(i) * m.weights(i);
  double loss = 0.0;
  for (const auto& d : data) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.weights.size());
    for (TokenId id : d.x.active) x(id) = 1.0;
    const double slack = std::max(0.0, 1.0 - d.label * (m.weights.dot(x) + m.bias));
    loss += slack * slack;
  }
  return 0.5 * reg + m.reg_c * loss;
}

std::vector<LabeledVector> fixture_task(const Corpus& c, std::size_t aspect) {
  std::vector<LabeledVector> out;
  for (const auto& ls : c.sentences)
    out.push_back({term_presence(ls.sentence, c.vocabulary), ls.aspects[aspect] ? 1 : -1});
  return out;
}

}  // namespace

TEST_CASE("term presence ignores counts and order") {
  auto v = Vocabulary::from_tokens({"a", "b", "c"});
  auto s1 = make_sentence("a a b", v);
  CHECK(term_presence(s1, v) == sbv({v.id_of("a"), v.id_of("b")}));
  CHECK(term_presence(make_sentence("a", v), v) == term_presence(make_sentence("a a a", v), v));
  CHECK(term_presence(make_sentence("b a", v), v) == term_presence(make_sentence("a b", v), v));
  CHECK(term_presence(make_sentence("", v), v).active.empty());
  // Unknown words share the unk feature.
  CHECK(term_presence(make_sentence("zz yy", v), v) == sbv({kUnkId}));
  CHECK(kind_of([] { term_presence(std::vector<TokenId>{9}, 4); }) == ErrorKind::Index);
}

TEST_CASE("linear prediction follows the sign of the margin") {
  LinearModel m;
  m.weights = Eigen::VectorXd::Zero(4);
  auto p = predict_linear(m, sbv({1, 2}));
  CHECK(p.label == -1);
  CHECK(p.margin == 0.0);

  m.weights << 0.0, 1.0, 1.5, -3.0;
  m.bias = 0.0;
  p = predict_linear(m, sbv({1, 2}));
  CHECK(p.label == 1);
  CHECK(p.margin == doctest::Approx(2.5));

  LinearModel flipped = m;
  flipped.weights = -m.weights;
  flipped.bias = -m.bias;
  for (const auto& x : {sbv({1}), sbv({3}), sbv({1, 3}), sbv({2, 3})}) {
    CHECK(predict_linear(flipped, x).label == -predict_linear(m, x).label);
  }
}

TEST_CASE("svm objective matches a dense evaluation") {
  LinearModel m;
  m.weights = Eigen::VectorXd(3);
  m.weights << 0.5, -1.0, 2.0;
  m.bias = 0.25;
  m.reg_c = 0.7;
  std::vector<LabeledVector> data{{sbv({0}), 1}, {sbv({1, 2}), -1}, {sbv({}), 1}, {sbv({2}), 1}};
  CHECK(svm_objective(m, data) == doctest::Approx(objective_oracle(m, data)).epsilon(1e-12));
}

TEST_CASE("a separable two-point set is learned exactly") {
  std::vector<LabeledVector> data{{sbv({0}), 1}, {sbv({1}), -1}};
  auto m = train_linear_svm(data, 2, 1.0, 50, 1);
  CHECK(predict_linear(m, data[0].x).label == 1);
  CHECK(predict_linear(m, data[1].x).label == -1);
}

TEST_CASE("a vanishing constant shrinks the weights") {
  std::vector<LabeledVector> data{{sbv({0}), 1}, {sbv({1}), -1}, {sbv({0, 2}), 1}};
  auto big = train_linear_svm(data, 3, 1.0, 50, 1);
  auto tiny = train_linear_svm(data, 3, 1e-6, 50, 1);
  CHECK(tiny.weights.norm() < 1e-3);
  CHECK(tiny.weights.norm() < big.weights.norm());
}

TEST_CASE("the objective decreases over training on the fixture") {
  Corpus c = load_corpus(kData / "fixture50.jsonl");
  auto data = fixture_task(c, 0);
  std::vector<double> log;
  auto m = train_linear_svm(data, c.vocabulary.size(), 1.0, 30, 5, &log);
  REQUIRE(log.size() == 30);
  CHECK(log.back() < log.front());
  CHECK(log.back() == doctest::Approx(objective_oracle(m, data)).epsilon(1e-9));
  CHECK(train_linear_svm(data, c.vocabulary.size(), 1.0, 30, 5).weights == m.weights);
}

TEST_CASE("training input errors") {
  std::vector<LabeledVector> one_class{{sbv({0}), 1}, {sbv({1}), 1}};
  CHECK(kind_of([&] { train_linear_svm(one_class, 2, 1.0, 5, 1); }) == ErrorKind::Validation);
  std::vector<LabeledVector> ok{{sbv({0}), 1}, {sbv({1}), -1}};
  CHECK(kind_of([&] { train_linear_svm(ok, 2, 0.0, 5, 1); }) == ErrorKind::Usage);
}

TEST_CASE("the linear cascade gates sentiment and marks one-class tasks") {
  Corpus c = load_corpus(kData / "fixture50.jsonl");
  std::vector<std::size_t> train;
  // Leave out every camera sentence so that task holds one class.
  const std::size_t camera = *c.schema.index_of("camera");
  for (std::size_t i = 0; i < c.sentences.size(); ++i)
    if (!c.sentences[i].aspects[camera]) train.push_back(i);
  Hyperparams hp;
  hp.svm_epochs = 40;
  auto cascade = train_linear_cascade(c, train, hp);
  REQUIRE(cascade.tasks.size() == c.schema.size() + 1);
  CHECK(cascade.degenerate[camera]);
  CHECK_FALSE(cascade.degenerate[0]);
  CHECK_FALSE(cascade.degenerate[c.schema.size()]);

  for (std::size_t i : train) {
    const auto& s = c.sentences[i].sentence;
    CHECK_FALSE(cascade.predict_task(camera, s).positive);
    auto out = classify(cascade, s);
    bool any = std::find(out.aspects.begin(), out.aspects.end(), true) != out.aspects.end();
    CHECK(out.sentiment.has_value() == any);
    const double p = cascade.predict_task(0, s).probability;
    CHECK(p == doctest::Approx(1.0 / (1.0 + std::exp(-margin(cascade.tasks[0], term_presence(s, c.vocabulary))))));
  }
}

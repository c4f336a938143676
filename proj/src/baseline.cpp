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

#include "aos/baseline.hpp"

#include <algorithm>
#include <numeric>

#include "aos/error.hpp"
#include "aos/nn.hpp"
#include "aos/train.hpp"

namespace aos {

SparseBinaryVector term_presence(std::span<const TokenId> ids, std::size_t vocabulary_size) {
  SparseBinaryVector v;
  v.active.reserve(ids.size());
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocabulary_size)
      throw Error(ErrorKind::Index, "token id outside the vocabulary");
    if (id != kPadId) v.active.push_back(id);
  }
  std::sort(v.active.begin(), v.active.end());
  v.active.erase(std::unique(v.active.begin(), v.active.end()), v.active.end());
  return v;
}

SparseBinaryVector term_presence(const Sentence& sentence, const Vocabulary& vocab) {
  return term_presence(to_ids(sentence.tokens, vocab), vocab.size());
}

double margin(const LinearModel& model, const SparseBinaryVector& x) {
  double z = model.bias;
  for (TokenId id : x.active) {
    if (id >= model.weights.size()) throw Error(ErrorKind::Index, "feature id outside the weight vector");
    z += model.weights(id);
  }
  return z;
}

LinearPrediction predict_linear(const LinearModel& model, const SparseBinaryVector& x) {
  double z = margin(model, x);
  return {z > 0.0 ? 1 : -1, z};
}

double svm_objective(const LinearModel& model, std::span<const LabeledVector> data) {
  double loss = 0.0;
  for (const auto& d : data) {
    double slack = std::max(0.0, 1.0 - d.label * margin(model, d.x));
    loss += slack * slack;
  }
  return 0.5 * model.weights.squaredNorm() + model.reg_c * loss;
}

LinearModel train_linear_svm(std::span<const LabeledVector> data, std::size_t dimension, double reg_c, int epochs,
                             std::uint64_t seed, std::vector<double>* objective_log) {
  if (data.empty()) throw Error(ErrorKind::Validation, "SVM training data is empty");
  if (!(reg_c > 0.0)) throw Error(ErrorKind::Usage, "SVM regularization constant must be > 0");
  if (epochs < 1) throw Error(ErrorKind::Usage, "SVM epochs must be >= 1");
  bool has_pos = false, has_neg = false;
  std::size_t max_active = 0;
  for (const auto& d : data) {
    if (d.label != 1 && d.label != -1) throw Error(ErrorKind::Validation, "SVM labels must be +1 or -1");
    (d.label > 0 ? has_pos : has_neg) = true;
    max_active = std::max(max_active, d.x.active.size());
    for (TokenId id : d.x.active)
      if (id < 0 || static_cast<std::size_t>(id) >= dimension)
        throw Error(ErrorKind::Index, "feature id outside the SVM dimension");
  }
  if (!has_pos || !has_neg) throw Error(ErrorKind::Validation, "SVM training data holds a single class");

  // Per-example objective: lambda/2 |w|^2 + max(0, 1 - m)^2 with
  // lambda = 1 / (C n); its minimizer is the minimizer of the primal.
  const double n = static_cast<double>(data.size());
  const double lambda = 1.0 / (reg_c * n);
  // A step this small cannot overshoot the hinge point on a single example,
  // nor flip the sign of the weight decay factor.
  const double eta0 = std::min(1.0 / (2.0 * (static_cast<double>(max_active) + 1.0)), 1.0 / lambda);

  const auto dim = static_cast<Eigen::Index>(dimension);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  double b = 0.0;
  Eigen::VectorXd avg_w = Eigen::VectorXd::Zero(dim);
  double avg_b = 0.0;
  double averaged = 0.0;

  Rng rng = make_rng(seed, 0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double t = 0.0;
  LinearModel out;
  out.reg_c = reg_c;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto& d = data[i];
      const double eta = eta0 / (1.0 + lambda * eta0 * t);
      double z = b;
      for (TokenId id : d.x.active) z += w(id);
      const double slack = std::max(0.0, 1.0 - d.label * z);
      w *= 1.0 - eta * lambda;
      if (slack > 0.0) {
        const double step = eta * 2.0 * slack * d.label;
        for (TokenId id : d.x.active) w(id) += step;
        b += step;
      }
      t += 1.0;
      if (epoch >= 1) {
        averaged += 1.0;
        avg_w += (w - avg_w) / averaged;
        avg_b += (b - avg_b) / averaged;
      }
    }
    if (averaged > 0.0) {
      out.weights = avg_w;
      out.bias = avg_b;
    } else {
      out.weights = w;
      out.bias = b;
    }
    if (objective_log) objective_log->push_back(svm_objective(out, data));
  }
  return out;
}

TaskPrediction LinearCascade::predict_task(std::size_t slot, const Sentence& sentence) const {
  if (slot >= tasks.size()) throw Error(ErrorKind::Index, "task slot out of range");
  const auto& model = tasks[slot];
  double z = margin(model, term_presence(sentence.ids, static_cast<std::size_t>(model.weights.size())));
  return {nn::sigmoid(z), z > 0.0};
}

LinearCascade train_linear_cascade(const Corpus& corpus, std::span<const std::size_t> train_indices,
                                   const Hyperparams& hp) {
  hp.validate();
  if (train_indices.empty()) throw Error(ErrorKind::Validation, "training split is empty");
  const std::size_t c = corpus.schema.size();
  const std::size_t dim = corpus.vocabulary.size();

  std::vector<SparseBinaryVector> features;
  features.reserve(train_indices.size());
  for (std::size_t idx : train_indices) features.push_back(term_presence(corpus.sentences.at(idx).sentence.ids, dim));

  LinearCascade out;
  out.aspects = corpus.schema;
  for (std::size_t slot = 0; slot <= c; ++slot) {
    std::vector<LabeledVector> data;
    for (std::size_t p = 0; p < train_indices.size(); ++p) {
      const auto& ls = corpus.sentences[train_indices[p]];
      if (slot < c) {
        data.push_back({features[p], ls.aspects.at(slot) ? 1 : -1});
      } else if (ls.has_aspect() && ls.sentiment) {
        data.push_back({features[p], *ls.sentiment == Polarity::Positive ? 1 : -1});
      }
    }
    bool has_pos = std::any_of(data.begin(), data.end(), [](const auto& d) { return d.label > 0; });
    bool has_neg = std::any_of(data.begin(), data.end(), [](const auto& d) { return d.label < 0; });
    if (has_pos && has_neg) {
      out.tasks.push_back(train_linear_svm(data, dim, hp.svm_c, hp.svm_epochs, hp.seed + 7919 * slot));
      out.degenerate.push_back(false);
    } else {
      LinearModel constant;
      constant.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
      constant.bias = has_pos ? 1.0 : -1.0;
      constant.reg_c = hp.svm_c;
      out.tasks.push_back(std::move(constant));
      out.degenerate.push_back(true);
    }
  }
  return out;
}

}  // namespace aos

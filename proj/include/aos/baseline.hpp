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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aos/hyperparams.hpp"
#include "aos/models.hpp"
#include "aos/text.hpp"

namespace aos {

/// Binary bag of words: the sorted set of ids present in a sentence.
struct SparseBinaryVector {
  std::vector<TokenId> active;

  friend bool operator==(const SparseBinaryVector&, const SparseBinaryVector&) = default;
};

SparseBinaryVector term_presence(const Sentence& sentence, const Vocabulary& vocab);
/// Same, from ids already mapped into a vocabulary of `vocabulary_size`.
SparseBinaryVector term_presence(std::span<const TokenId> ids, std::size_t vocabulary_size);

/// w.x + b with an unregularized bias.
struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0;
  double reg_c = 1;
};

struct LabeledVector {
  SparseBinaryVector x;
  int label = 1;  // +1 or -1
};

struct LinearPrediction {
  int label = -1;
  double margin = 0;
};

double margin(const LinearModel& model, const SparseBinaryVector& x);

/// sign(w.x + b); a zero margin predicts -1.
LinearPrediction predict_linear(const LinearModel& model, const SparseBinaryVector& x);

/// (1/2)|w|^2 + C * sum max(0, 1 - y (w.x + b))^2
double svm_objective(const LinearModel& model, std::span<const LabeledVector> data);

/// Stochastic gradient descent on the L2-regularized squared-hinge objective
/// with iterate averaging from the second epoch on. Throws
/// ErrorKind::Validation unless both classes are present.
/// `objective_log`, when given, receives the objective of the returned
/// (averaged) iterate after every epoch.
LinearModel train_linear_svm(std::span<const LabeledVector> data, std::size_t dimension, double reg_c, int epochs,
                             std::uint64_t seed, std::vector<double>* objective_log = nullptr);

/// C linear aspect classifiers plus one linear sentiment classifier, gated
/// like the cascaded network. Tasks whose training labels hold one class are
/// replaced by a constant predictor and marked degenerate.
struct LinearCascade final : AspectSentimentModel {
  AspectSchema aspects;
  std::vector<LinearModel> tasks;  // C+1
  std::vector<bool> degenerate;    // C+1

  const AspectSchema& schema() const override { return aspects; }
  /// `probability` reports the logistic of the margin; `positive` is margin > 0.
  TaskPrediction predict_task(std::size_t slot, const Sentence& sentence) const override;
};

LinearCascade train_linear_cascade(const Corpus& corpus, std::span<const std::size_t> train_indices,
                                   const Hyperparams& hp);

}  // namespace aos

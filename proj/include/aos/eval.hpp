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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aos/hyperparams.hpp"
#include "aos/models.hpp"
#include "aos/text.hpp"

namespace aos {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Scores in [0, 1]. A 0/0 ratio scores 0 and sets `degenerate`.
struct PrfScores {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  bool degenerate = false;
};

PrfScores precision_recall_f1(const ConfusionCounts& c);

/// correct / total; throws ErrorKind::Domain when total is zero.
double accuracy(std::size_t correct, std::size_t total);

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of;  // sentence index -> fold id

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

/// Seeded permutation cut into k folds whose sizes differ by at most one.
FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed);

struct FoldResult {
  int fold = 0;
  std::vector<ConfusionCounts> aspect_counts;
  std::vector<PrfScores> aspect_scores;
  std::vector<bool> aspect_train_degenerate;  // no positive training example
  std::size_t sentiment_correct = 0;
  std::size_t sentiment_total = 0;
  double sentiment_accuracy = 0;
  bool sentiment_degenerate = false;  // no gold sentiment in the test fold
};

struct EvalReport {
  AspectSchema schema;
  std::string method;
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> per_fold;
  std::vector<PrfScores> mean_aspect;  // unweighted means of per-fold values
  double mean_sentiment_accuracy = 0;
};

/// Trains a model on the given corpus indices.
using Trainer = std::function<std::unique_ptr<AspectSentimentModel>(
    const Corpus& corpus, std::span<const std::size_t> train_indices, const Hyperparams& hp)>;

/// Scores a trained model on held-out sentences against gold labels. Aspect
/// flags are compared for every sentence; sentiment is compared on every
/// gold aspect-bearing sentence, whatever the predicted flags.
FoldResult evaluate_fold(const AspectSentimentModel& model, const Corpus& corpus,
                         std::span<const std::size_t> test_indices);

EvalReport cross_validate(const Trainer& trainer, const Corpus& corpus, const Hyperparams& hp, int k,
                          std::uint64_t seed, std::string method = {});

/// Full-precision machine-readable report.
std::string report_json(const EvalReport& report);
/// Percentages with one decimal, one row per fold plus the mean.
std::string report_table(const EvalReport& report);

enum class Architecture { Cascaded, Multitask, Svm };

Architecture parse_architecture(std::string_view name);
std::string_view to_string(Architecture arch);

/// Trainer for one architecture. `pretrained`, when given, initializes the
/// CNN embeddings and must match the corpus vocabulary.
Trainer make_trainer(Architecture arch, std::shared_ptr<const Embedding> pretrained = nullptr);

/// Chooses a uniform auxiliary weight by holding out 10% of the training
/// indices (selected by hp.seed) and maximizing the mean development score
/// of the multitask suite (aspect F1 and sentiment accuracy averaged).
/// Ties keep the earlier candidate.
double select_lambda(const Corpus& corpus, std::span<const std::size_t> train_indices, const Hyperparams& hp,
                     std::span<const double> candidates, const Embedding* pretrained = nullptr);

}  // namespace aos

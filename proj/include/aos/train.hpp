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
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aos/error.hpp"
#include "aos/hyperparams.hpp"
#include "aos/models.hpp"
#include "aos/text.hpp"

namespace aos {

using Rng = std::mt19937_64;

/// Deterministic generator for a (seed, stream) pair.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Stream for embedding columns absent from a pre-trained vector file.
inline constexpr std::uint64_t kEmbeddingFallbackStream = 0xE3B;

// ---------------------------------------------------------------------------
// Initialization

/// i.i.d. Normal(0, sigma^2) entries.
Eigen::MatrixXd init_weights(Eigen::Index rows, Eigen::Index cols, Rng& rng, double sigma);

Embedding init_embedding(std::size_t vocabulary_size, const Hyperparams& hp, Rng& rng);

/// Gaussian filters and head weights; biases are exactly zero.
TaskLayers init_task_layers(int filters, const Hyperparams& hp, Rng& rng);

int filters_for_slot(std::size_t slot, std::size_t aspect_count, const Hyperparams& hp);

MultitaskCnn init_multitask(const AspectSchema& schema, std::size_t vocabulary_size, const Hyperparams& hp,
                            Rng& rng, const Embedding* pretrained = nullptr);

CascadedCnn init_cascaded(const AspectSchema& schema, std::size_t vocabulary_size, const Hyperparams& hp,
                          Rng& rng, const Embedding* pretrained = nullptr);

// ---------------------------------------------------------------------------
// Pre-trained vectors

struct EmbeddingCoverage {
  std::size_t covered = 0;
  std::size_t uncovered = 0;
  std::vector<std::string> uncovered_tokens;  // corpus tokens only
};

struct LoadedEmbedding {
  Embedding layer;
  EmbeddingCoverage coverage;
};

/// Reads the "count dim" text format. Vocabulary entries found in the file
/// take the file's vector; every other column (including pad and unk) is
/// drawn from Normal(0, fallback_std^2) in id order.
LoadedEmbedding load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab, int k,
                                           double fallback_std, Rng& rng);
LoadedEmbedding parse_pretrained_embeddings(std::string_view content, const Vocabulary& vocab, int k,
                                            double fallback_std, Rng& rng);

// ---------------------------------------------------------------------------
// Optimizer

/// Classical momentum on one tensor: v <- mu v - lr g; theta <- theta + v.
template <typename Param, typename Grad, typename Velocity>
void sgd_momentum_step(Eigen::DenseBase<Param>& param, const Eigen::DenseBase<Grad>& grad,
                       Eigen::DenseBase<Velocity>& velocity, double lr, double mu) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols() || param.rows() != velocity.rows() ||
      param.cols() != velocity.cols())
    throw Error(ErrorKind::Shape, "parameter, gradient and velocity shapes differ");
  velocity.derived() = mu * velocity.derived() - lr * grad.derived();
  param.derived() += velocity.derived();
}

/// Velocity buffers for one task's view of (embedding, conv, head).
struct TaskVelocity {
  Eigen::MatrixXd embedding;
  Eigen::MatrixXd filters;
  Eigen::VectorXd conv_bias;
  Eigen::VectorXd head_weights;
  double head_bias = 0;

  static TaskVelocity zeros_like(const Embedding& embedding, const TaskLayers& layers);
};

/// Applies one momentum step with gradient `grad` to every tensor. The
/// sparse embedding gradient is treated as zero outside its columns.
void apply_momentum_step(Embedding& embedding, TaskLayers& layers, TaskVelocity& velocity,
                         const nn::TaskGradients<double>& grad, double lr, double mu);

// ---------------------------------------------------------------------------
// Batches

struct Example {
  const IdSequence* padded = nullptr;
  int label = 0;
};

struct BatchGradient {
  nn::TaskGradients<double> grad;  // mean over examples
  double loss = 0;                 // mean logistic loss
  std::size_t count = 0;
};

/// Forward/backward over the examples in order, averaged.
BatchGradient batch_gradient(const Embedding& embedding, const TaskLayers& layers, std::span<const Example> examples);

/// Training sentences of one corpus split, padded once.
class TrainingSet {
 public:
  TrainingSet(const Corpus& corpus, std::span<const std::size_t> indices, int half_window);

  std::size_t size() const { return padded_.size(); }
  std::size_t aspect_count() const { return aspect_count_; }
  bool has_aspect(std::size_t pos) const { return sentiment_[pos].has_value(); }

  /// Examples of task `slot` among the given positions. Aspect tasks label
  /// every sentence with its flag; the sentiment task keeps only
  /// aspect-bearing sentences.
  std::vector<Example> examples(std::size_t slot, std::span<const std::size_t> positions) const;

  std::vector<std::size_t> all_positions() const;
  std::vector<std::size_t> aspect_bearing_positions() const;

 private:
  std::size_t aspect_count_;
  std::vector<IdSequence> padded_;
  std::vector<std::vector<bool>> aspects_;
  std::vector<std::optional<Polarity>> sentiment_;
};

/// Random permutation of `positions` cut into batches of min(batch_size, n);
/// the last short batch is kept.
std::vector<std::vector<std::size_t>> make_batches(std::span<const std::size_t> positions, int batch_size, Rng& rng);

// ---------------------------------------------------------------------------
// Multitask training

struct EpochStats {
  double main_loss = 0;  // mean over batches of the main-task loss
  double objective = 0;  // main loss plus lambda-weighted auxiliary losses
};

/// One main-task run of the multitask procedure over a shared embedding.
/// Per batch: a main-task step, then one lambda-weighted step per auxiliary
/// task in slot order, each recomputing its gradient after the preceding
/// updates. Each task keeps its own momentum buffer for the shared embedding.
class MultitaskTrainer {
 public:
  struct Options {
    bool allow_zero_lambda = false;  // test hook for the single-task reduction
  };

  MultitaskTrainer(MultitaskCnn model, const TrainingSet& data, std::size_t main_slot, const Hyperparams& hp,
                   Options options);
  MultitaskTrainer(MultitaskCnn model, const TrainingSet& data, std::size_t main_slot, const Hyperparams& hp)
      : MultitaskTrainer(std::move(model), data, main_slot, hp, Options{}) {}

  /// One weighted update of task `slot`. Returns the batch loss, or nothing
  /// when the batch holds no examples for that task (no update is made).
  std::optional<double> step(std::size_t slot, std::span<const std::size_t> batch, double weight);

  /// Main step followed by the auxiliary steps.
  EpochStats train_batch(std::span<const std::size_t> batch);
  EpochStats run_epoch(const std::vector<std::vector<std::size_t>>& batches);
  EpochStats run_epoch(Rng& rng);

  const MultitaskCnn& model() const { return model_; }
  MultitaskCnn release() { return std::move(model_); }
  std::size_t main_slot() const { return main_slot_; }

 private:
  MultitaskCnn model_;
  const TrainingSet& data_;
  std::size_t main_slot_;
  Hyperparams hp_;
  std::vector<TaskVelocity> velocity_;
};

/// Trains one independent network (embedding + task layers) on one task.
class SingleTaskTrainer {
 public:
  SingleTaskTrainer(Embedding& embedding, TaskLayers& layers, const TrainingSet& data, std::size_t slot,
                    const Hyperparams& hp);

  std::optional<double> step(std::span<const std::size_t> batch);
  double run_epoch(const std::vector<std::vector<std::size_t>>& batches);
  double run_epoch(Rng& rng);

 private:
  Embedding& embedding_;
  TaskLayers& layers_;
  const TrainingSet& data_;
  std::size_t slot_;
  Hyperparams hp_;
  TaskVelocity velocity_;
};

struct TrainedSuite {
  MultitaskSuite suite;
  std::vector<std::vector<EpochStats>> logs;  // per main task, per epoch
};

struct TrainedCascade {
  CascadedCnn model;
  std::vector<std::vector<double>> logs;  // per network, per epoch loss
};

/// Trains C+1 multitask models, the i-th with task i as main task.
TrainedSuite train_mcnn(const Corpus& corpus, std::span<const std::size_t> train_indices, const Hyperparams& hp,
                        const Embedding* pretrained = nullptr);

/// Trains each of the C+1 networks independently; the sentiment network sees
/// only aspect-bearing sentences.
TrainedCascade train_ccnn(const Corpus& corpus, std::span<const std::size_t> train_indices, const Hyperparams& hp,
                          const Embedding* pretrained = nullptr);

/// Trains network `slot` of a cascade in place for hp.epochs epochs.
std::vector<double> train_cascade_network(CascadedCnn& model, std::size_t slot, const TrainingSet& data,
                                          const Hyperparams& hp);

}  // namespace aos

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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aos/nn.hpp"
#include "aos/text.hpp"

namespace aos {

using Embedding = nn::EmbeddingLayer<double>;
using Conv = nn::ConvLayer<double>;
using Head = nn::OutputHead<double>;

/// Task-specific layers on top of a word embedding.
struct TaskLayers {
  Conv conv;
  Head head;
};

/// Aspect i occupies slot i; the sentiment task occupies slot C.
class TaskKind {
 public:
  static TaskKind aspect(std::size_t index) { return TaskKind(index, false); }
  static TaskKind sentiment() { return TaskKind(0, true); }
  static TaskKind from_slot(std::size_t slot, std::size_t aspect_count);

  bool is_sentiment() const { return sentiment_; }
  std::size_t aspect_index() const;
  std::size_t slot(std::size_t aspect_count) const;

 private:
  TaskKind(std::size_t index, bool sentiment) : index_(index), sentiment_(sentiment) {}
  std::size_t index_;
  bool sentiment_;
};

struct TaskPrediction {
  double probability = 0.5;
  bool positive = false;
};

/// Anything that scores a sentence for each of the C+1 binary tasks.
class AspectSentimentModel {
 public:
  virtual ~AspectSentimentModel() = default;
  virtual const AspectSchema& schema() const = 0;
  virtual TaskPrediction predict_task(std::size_t slot, const Sentence& sentence) const = 0;

  std::size_t task_count() const { return schema().size() + 1; }
};

/// C aspect networks and one sentiment network, each with its own embedding.
struct CascadedCnn final : AspectSentimentModel {
  AspectSchema aspects;
  std::vector<Embedding> embeddings;  // C+1
  std::vector<TaskLayers> tasks;      // C+1
  double threshold = 0.5;

  const AspectSchema& schema() const override { return aspects; }
  TaskPrediction predict_task(std::size_t slot, const Sentence& sentence) const override;
};

/// C+1 task networks over one shared embedding.
struct MultitaskCnn final : AspectSentimentModel {
  AspectSchema aspects;
  Embedding shared_embedding;
  std::vector<TaskLayers> tasks;  // C+1
  double threshold = 0.5;

  const AspectSchema& schema() const override { return aspects; }
  TaskPrediction predict_task(std::size_t slot, const Sentence& sentence) const override;
};

/// Multitask models trained with each task in turn as the main task;
/// task i is answered by members[i].
struct MultitaskSuite final : AspectSentimentModel {
  std::vector<MultitaskCnn> members;

  const AspectSchema& schema() const override;
  TaskPrediction predict_task(std::size_t slot, const Sentence& sentence) const override;
};

/// Probability of one task network; pads `ids` with the conv half-window.
double task_probability(const Embedding& embedding, const TaskLayers& layers, std::span<const TokenId> ids);

// ---------------------------------------------------------------------------
// Cascaded inference

struct SentenceRef {
  std::string review_id;
  int ordinal = 0;
  std::string text;

  friend bool operator==(const SentenceRef&, const SentenceRef&) = default;
};

struct SentimentPrediction {
  Polarity polarity = Polarity::Negative;
  double probability = 0.5;  // probability of the positive class

  friend bool operator==(const SentimentPrediction&, const SentimentPrediction&) = default;
};

struct AspectPrediction {
  std::vector<double> probabilities;
  std::vector<bool> flags;

  bool any() const;
};

struct ClassifiedSentence {
  SentenceRef ref;
  std::vector<bool> aspects;
  std::vector<double> aspect_probabilities;
  std::optional<SentimentPrediction> sentiment;

  friend bool operator==(const ClassifiedSentence&, const ClassifiedSentence&) = default;
};

/// Throws ErrorKind::EmptyInput for a sentence without words.
AspectPrediction predict_aspects(const AspectSentimentModel& model, const Sentence& sentence);

/// Absent unless some flag is set.
std::optional<SentimentPrediction> predict_sentiment(const AspectSentimentModel& model, const Sentence& sentence,
                                                     const std::vector<bool>& aspect_flags);

ClassifiedSentence classify(const AspectSentimentModel& model, const Sentence& sentence);

/// Classifies in order using up to `threads` worker threads; the result does
/// not depend on the thread count.
std::vector<ClassifiedSentence> classify_all(const AspectSentimentModel& model, std::span<const Sentence> sentences,
                                             unsigned threads = 1);

}  // namespace aos

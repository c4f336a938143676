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

#include "aos/models.hpp"

#include <algorithm>
#include <thread>

#include "aos/error.hpp"

namespace aos {
namespace {

void check_slot(std::size_t slot, std::size_t tasks) {
  if (slot >= tasks)
    throw Error(ErrorKind::Index, "task slot " + std::to_string(slot) + " outside " + std::to_string(tasks) + " tasks");
}

void check_nonempty(const Sentence& s) {
  if (s.length() == 0) throw Error(ErrorKind::EmptyInput, "cannot classify an empty sentence");
}

}  // namespace

TaskKind TaskKind::from_slot(std::size_t slot, std::size_t aspect_count) {
  if (slot > aspect_count) throw Error(ErrorKind::Index, "task slot out of range");
  return slot == aspect_count ? sentiment() : aspect(slot);
}

std::size_t TaskKind::aspect_index() const {
  if (sentiment_) throw Error(ErrorKind::Domain, "sentiment task has no aspect index");
  return index_;
}

std::size_t TaskKind::slot(std::size_t aspect_count) const {
  if (sentiment_) return aspect_count;
  if (index_ >= aspect_count) throw Error(ErrorKind::Index, "aspect index out of range");
  return index_;
}

double task_probability(const Embedding& embedding, const TaskLayers& layers, std::span<const TokenId> ids) {
  IdSequence padded = pad(ids, layers.conv.half_window);
  return nn::predict<double>(padded, embedding, layers.conv, layers.head);
}

TaskPrediction CascadedCnn::predict_task(std::size_t slot, const Sentence& sentence) const {
  check_slot(slot, tasks.size());
  double p = task_probability(embeddings.at(slot), tasks[slot], sentence.ids);
  return {p, p > threshold};
}

TaskPrediction MultitaskCnn::predict_task(std::size_t slot, const Sentence& sentence) const {
  check_slot(slot, tasks.size());
  double p = task_probability(shared_embedding, tasks[slot], sentence.ids);
  return {p, p > threshold};
}

const AspectSchema& MultitaskSuite::schema() const {
  if (members.empty()) throw Error(ErrorKind::Validation, "multitask suite has no members");
  return members.front().aspects;
}

TaskPrediction MultitaskSuite::predict_task(std::size_t slot, const Sentence& sentence) const {
  check_slot(slot, members.size());
  return members[slot].predict_task(slot, sentence);
}

bool AspectPrediction::any() const { return std::find(flags.begin(), flags.end(), true) != flags.end(); }

AspectPrediction predict_aspects(const AspectSentimentModel& model, const Sentence& sentence) {
  check_nonempty(sentence);
  const std::size_t c = model.schema().size();
  AspectPrediction out;
  out.probabilities.reserve(c);
  out.flags.reserve(c);
  for (std::size_t i = 0; i < c; ++i) {
    auto pred = model.predict_task(i, sentence);
    out.probabilities.push_back(pred.probability);
    out.flags.push_back(pred.positive);
  }
  return out;
}

std::optional<SentimentPrediction> predict_sentiment(const AspectSentimentModel& model, const Sentence& sentence,
                                                     const std::vector<bool>& aspect_flags) {
  if (aspect_flags.size() != model.schema().size())
    throw Error(ErrorKind::Shape, "expected " + std::to_string(model.schema().size()) + " aspect flags");
  if (std::find(aspect_flags.begin(), aspect_flags.end(), true) == aspect_flags.end()) return std::nullopt;
  check_nonempty(sentence);
  auto pred = model.predict_task(model.schema().size(), sentence);
  return SentimentPrediction{pred.positive ? Polarity::Positive : Polarity::Negative, pred.probability};
}

ClassifiedSentence classify(const AspectSentimentModel& model, const Sentence& sentence) {
  ClassifiedSentence out;
  out.ref = {sentence.review_id, sentence.ordinal, sentence.raw};
  auto aspects = predict_aspects(model, sentence);
  out.sentiment = predict_sentiment(model, sentence, aspects.flags);
  out.aspects = std::move(aspects.flags);
  out.aspect_probabilities = std::move(aspects.probabilities);
  return out;
}

std::vector<ClassifiedSentence> classify_all(const AspectSentimentModel& model, std::span<const Sentence> sentences,
                                             unsigned threads) {
  std::vector<ClassifiedSentence> out(sentences.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(sentences.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < sentences.size(); ++i) out[i] = classify(model, sentences[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < sentences.size(); i += threads) out[i] = classify(model, sentences[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace aos

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

#include "aos/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "aos/baseline.hpp"
#include "aos/error.hpp"
#include "aos/train.hpp"

namespace aos {

PrfScores precision_recall_f1(const ConfusionCounts& c) {
  PrfScores s;
  auto ratio = [&s](double num, double den) {
    if (den == 0.0) {
      s.degenerate = true;
      return 0.0;
    }
    return num / den;
  };
  s.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  s.recall = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  // P = R = 0 with nonzero counts is a real zero, not a 0/0 case.
  const double pr = s.precision + s.recall;
  s.f1 = pr > 0.0 ? 2.0 * s.precision * s.recall / pr : 0.0;
  return s;
}

double accuracy(std::size_t correct, std::size_t total) {
  if (total == 0) throw Error(ErrorKind::Domain, "accuracy over zero examples");
  if (correct > total) throw Error(ErrorKind::Domain, "more correct answers than examples");
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::Usage, "need at least 2 folds");
  if (n < static_cast<std::size_t>(k)) throw Error(ErrorKind::Validation, "fewer sentences than folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, 0xF01D);
  std::shuffle(order.begin(), order.end(), rng);

  FoldAssignment out;
  out.k = k;
  out.fold_of.assign(n, 0);
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) out.fold_of[order[pos++]] = f;
  }
  return out;
}

FoldResult evaluate_fold(const AspectSentimentModel& model, const Corpus& corpus,
                         std::span<const std::size_t> test_indices) {
  const std::size_t c = corpus.schema.size();
  if (model.schema().size() != c) throw Error(ErrorKind::Validation, "model and corpus schemas differ in size");
  FoldResult r;
  r.aspect_counts.assign(c, {});
  for (std::size_t idx : test_indices) {
    const auto& ls = corpus.sentences.at(idx);
    for (std::size_t a = 0; a < c; ++a) {
      bool predicted = model.predict_task(a, ls.sentence).positive;
      bool gold = ls.aspects[a];
      auto& cc = r.aspect_counts[a];
      (gold ? (predicted ? cc.tp : cc.fn) : (predicted ? cc.fp : cc.tn)) += 1;
    }
    if (ls.has_aspect() && ls.sentiment) {
      bool predicted = model.predict_task(c, ls.sentence).positive;
      ++r.sentiment_total;
      if (predicted == (*ls.sentiment == Polarity::Positive)) ++r.sentiment_correct;
    }
  }
  for (const auto& cc : r.aspect_counts) r.aspect_scores.push_back(precision_recall_f1(cc));
  if (r.sentiment_total == 0)
    r.sentiment_degenerate = true;
  else
    r.sentiment_accuracy = accuracy(r.sentiment_correct, r.sentiment_total);
  return r;
}

EvalReport cross_validate(const Trainer& trainer, const Corpus& corpus, const Hyperparams& hp, int k,
                          std::uint64_t seed, std::string method) {
  auto folds = kfold_split(corpus.sentences.size(), k, seed);
  const std::size_t c = corpus.schema.size();
  EvalReport report;
  report.schema = corpus.schema;
  report.method = std::move(method);
  report.folds = k;
  report.seed = seed;

  for (int f = 0; f < k; ++f) {
    auto train = folds.train_indices(f);
    auto test = folds.test_indices(f);
    auto model = trainer(corpus, train, hp);
    FoldResult r = evaluate_fold(*model, corpus, test);
    r.fold = f;
    r.aspect_train_degenerate.assign(c, true);
    for (std::size_t idx : train)
      for (std::size_t a = 0; a < c; ++a)
        if (corpus.sentences[idx].aspects[a]) r.aspect_train_degenerate[a] = false;
    report.per_fold.push_back(std::move(r));
  }

  report.mean_aspect.assign(c, {});
  for (const auto& r : report.per_fold) {
    for (std::size_t a = 0; a < c; ++a) {
      auto& m = report.mean_aspect[a];
      m.precision += r.aspect_scores[a].precision;
      m.recall += r.aspect_scores[a].recall;
      m.f1 += r.aspect_scores[a].f1;
      m.degenerate = m.degenerate || r.aspect_scores[a].degenerate || r.aspect_train_degenerate[a];
    }
    report.mean_sentiment_accuracy += r.sentiment_accuracy;
  }
  const double folds_d = static_cast<double>(k);
  for (auto& m : report.mean_aspect) {
    m.precision /= folds_d;
    m.recall /= folds_d;
    m.f1 /= folds_d;
  }
  report.mean_sentiment_accuracy /= folds_d;
  return report;
}

std::string report_json(const EvalReport& report) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["method"] = report.method;
  doc["folds"] = report.folds;
  doc["seed"] = report.seed;
  doc["aspects"] = report.schema.names();
  json folds = json::array();
  for (const auto& r : report.per_fold) {
    json f;
    f["fold"] = r.fold;
    json aspects = json::array();
    for (std::size_t a = 0; a < r.aspect_scores.size(); ++a) {
      const auto& cc = r.aspect_counts[a];
      const auto& s = r.aspect_scores[a];
      aspects.push_back(json{{"aspect", report.schema.name(a)},
                             {"tp", cc.tp},
                             {"fp", cc.fp},
                             {"fn", cc.fn},
                             {"tn", cc.tn},
                             {"precision", s.precision},
                             {"recall", s.recall},
                             {"f1", s.f1},
                             {"degenerate", s.degenerate || r.aspect_train_degenerate[a]}});
    }
    f["aspects"] = std::move(aspects);
    f["sentiment"] = json{{"correct", r.sentiment_correct},
                          {"total", r.sentiment_total},
                          {"accuracy", r.sentiment_accuracy},
                          {"degenerate", r.sentiment_degenerate}};
    folds.push_back(std::move(f));
  }
  doc["per_fold"] = std::move(folds);
  json mean = json::array();
  for (std::size_t a = 0; a < report.mean_aspect.size(); ++a) {
    const auto& s = report.mean_aspect[a];
    mean.push_back(json{{"aspect", report.schema.name(a)},
                        {"precision", s.precision},
                        {"recall", s.recall},
                        {"f1", s.f1},
                        {"degenerate", s.degenerate}});
  }
  bool sentiment_degenerate = std::any_of(report.per_fold.begin(), report.per_fold.end(),
                                          [](const FoldResult& r) { return r.sentiment_degenerate; });
  doc["mean"] = json{{"aspects", std::move(mean)},
                     {"sentiment_accuracy", report.mean_sentiment_accuracy},
                     {"sentiment_degenerate", sentiment_degenerate}};
  return doc.dump(2) + "\n";
}

std::string report_table(const EvalReport& report) {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v * 100.0);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "method: " << (report.method.empty() ? "-" : report.method) << "  folds: " << report.folds
     << "  seed: " << report.seed << "\n\n";
  os << "fold";
  for (const auto& name : report.schema.names()) os << '\t' << name << " P\tR\tF";
  os << "\tsentiment acc\n";
  auto row = [&](const std::string& label, const std::vector<PrfScores>& scores, double acc, bool acc_flag) {
    os << label;
    for (const auto& s : scores)
      os << '\t' << pct(s.precision) << '\t' << pct(s.recall) << '\t' << pct(s.f1) << (s.degenerate ? "*" : "");
    os << '\t' << pct(acc) << (acc_flag ? "*" : "") << '\n';
  };
  for (const auto& r : report.per_fold) {
    std::vector<PrfScores> scores = r.aspect_scores;
    for (std::size_t a = 0; a < scores.size(); ++a) scores[a].degenerate |= r.aspect_train_degenerate[a];
    row(std::to_string(r.fold), scores, r.sentiment_accuracy, r.sentiment_degenerate);
  }
  bool any_sent_flag = std::any_of(report.per_fold.begin(), report.per_fold.end(),
                                   [](const FoldResult& r) { return r.sentiment_degenerate; });
  row("mean", report.mean_aspect, report.mean_sentiment_accuracy, any_sent_flag);
  os << "\n* degenerate: a 0/0 ratio or a task without positive training examples\n";
  return os.str();
}

Architecture parse_architecture(std::string_view name) {
  if (name == "ccnn") return Architecture::Cascaded;
  if (name == "mcnn") return Architecture::Multitask;
  if (name == "svm") return Architecture::Svm;
  throw Error(ErrorKind::Usage, "unknown architecture '" + std::string(name) + "' (expected ccnn, mcnn or svm)");
}

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::Cascaded:
      return "ccnn";
    case Architecture::Multitask:
      return "mcnn";
    case Architecture::Svm:
      return "svm";
  }
  return "?";
}

Trainer make_trainer(Architecture arch, std::shared_ptr<const Embedding> pretrained) {
  switch (arch) {
    case Architecture::Cascaded:
      return [pretrained](const Corpus& corpus, std::span<const std::size_t> train, const Hyperparams& hp) {
        return std::unique_ptr<AspectSentimentModel>(
            std::make_unique<CascadedCnn>(train_ccnn(corpus, train, hp, pretrained.get()).model));
      };
    case Architecture::Multitask:
      return [pretrained](const Corpus& corpus, std::span<const std::size_t> train, const Hyperparams& hp) {
        return std::unique_ptr<AspectSentimentModel>(
            std::make_unique<MultitaskSuite>(train_mcnn(corpus, train, hp, pretrained.get()).suite));
      };
    case Architecture::Svm:
      return [](const Corpus& corpus, std::span<const std::size_t> train, const Hyperparams& hp) {
        return std::unique_ptr<AspectSentimentModel>(
            std::make_unique<LinearCascade>(train_linear_cascade(corpus, train, hp)));
      };
  }
  throw Error(ErrorKind::Usage, "unknown architecture");
}

double select_lambda(const Corpus& corpus, std::span<const std::size_t> train_indices, const Hyperparams& hp,
                     std::span<const double> candidates, const Embedding* pretrained) {
  if (candidates.empty()) throw Error(ErrorKind::Usage, "no lambda candidates");
  std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
  Rng rng = make_rng(hp.seed, 0xDE7);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t dev_size = std::max<std::size_t>(1, order.size() / 10);
  if (dev_size >= order.size()) throw Error(ErrorKind::Validation, "training split too small for a development set");
  std::vector<std::size_t> dev(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(dev_size));
  std::vector<std::size_t> fit(order.begin() + static_cast<std::ptrdiff_t>(dev_size), order.end());

  double best = candidates.front();
  double best_score = -1.0;
  for (double lambda : candidates) {
    Hyperparams trial = hp;
    trial.lambda = lambda;
    trial.lambdas.clear();
    auto suite = train_mcnn(corpus, fit, trial, pretrained).suite;
    FoldResult r = evaluate_fold(suite, corpus, dev);
    double score = 0.0;
    for (const auto& s : r.aspect_scores) score += s.f1;
    score += r.sentiment_accuracy;
    score /= static_cast<double>(r.aspect_scores.size() + 1);
    if (score > best_score) {
      best_score = score;
      best = lambda;
    }
  }
  return best;
}

}  // namespace aos

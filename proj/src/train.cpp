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

#include "aos/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "aos/loss.hpp"

namespace aos {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

// ---------------------------------------------------------------------------
// Initialization

Eigen::MatrixXd init_weights(Eigen::Index rows, Eigen::Index cols, Rng& rng, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::Domain, "initialization std must be > 0");
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) w(r, c) = normal(rng);
  return w;
}

Embedding init_embedding(std::size_t vocabulary_size, const Hyperparams& hp, Rng& rng) {
  return Embedding{init_weights(hp.k, static_cast<Eigen::Index>(vocabulary_size), rng, hp.init_std)};
}

TaskLayers init_task_layers(int filters, const Hyperparams& hp, Rng& rng) {
  TaskLayers layers;
  layers.conv.half_window = hp.half_window();
  layers.conv.filters = init_weights(static_cast<Eigen::Index>(hp.h) * hp.k, filters, rng, hp.init_std);
  layers.conv.bias = Eigen::VectorXd::Zero(filters);
  layers.head.weights = init_weights(filters, 1, rng, hp.init_std);
  layers.head.bias = 0.0;
  return layers;
}

int filters_for_slot(std::size_t slot, std::size_t aspect_count, const Hyperparams& hp) {
  return slot == aspect_count ? hp.m_sentiment : hp.m_aspect;
}

namespace {

void check_pretrained(const Embedding* pretrained, std::size_t vocabulary_size, const Hyperparams& hp) {
  if (!pretrained) return;
  if (pretrained->weights.rows() != hp.k ||
      pretrained->weights.cols() != static_cast<Eigen::Index>(vocabulary_size))
    throw Error(ErrorKind::Shape, "pre-trained embedding does not match k x |D|");
}

}  // namespace

MultitaskCnn init_multitask(const AspectSchema& schema, std::size_t vocabulary_size, const Hyperparams& hp, Rng& rng,
                            const Embedding* pretrained) {
  check_pretrained(pretrained, vocabulary_size, hp);
  MultitaskCnn m;
  m.aspects = schema;
  m.threshold = hp.threshold;
  m.shared_embedding = pretrained ? *pretrained : init_embedding(vocabulary_size, hp, rng);
  for (std::size_t slot = 0; slot <= schema.size(); ++slot)
    m.tasks.push_back(init_task_layers(filters_for_slot(slot, schema.size(), hp), hp, rng));
  return m;
}

CascadedCnn init_cascaded(const AspectSchema& schema, std::size_t vocabulary_size, const Hyperparams& hp, Rng& rng,
                          const Embedding* pretrained) {
  check_pretrained(pretrained, vocabulary_size, hp);
  CascadedCnn m;
  m.aspects = schema;
  m.threshold = hp.threshold;
  for (std::size_t slot = 0; slot <= schema.size(); ++slot) {
    m.embeddings.push_back(pretrained ? *pretrained : init_embedding(vocabulary_size, hp, rng));
    m.tasks.push_back(init_task_layers(filters_for_slot(slot, schema.size(), hp), hp, rng));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Pre-trained vectors

LoadedEmbedding parse_pretrained_embeddings(std::string_view content, const Vocabulary& vocab, int k,
                                            double fallback_std, Rng& rng) {
  auto next_line = [&content]() -> std::optional<std::string_view> {
    while (!content.empty()) {
      auto nl = content.find('\n');
      std::string_view line = content.substr(0, nl);
      content.remove_prefix(nl == std::string_view::npos ? content.size() : nl + 1);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.remove_suffix(1);
      if (!line.empty()) return line;
    }
    return std::nullopt;
  };
  auto fields = [](std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  };
  auto number = [](std::string_view s, auto& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
  };

  auto header = next_line();
  if (!header) throw Error(ErrorKind::Parse, "word-vector file is empty");
  auto hf = fields(*header);
  std::size_t count = 0;
  int dim = 0;
  if (hf.size() != 2 || !number(hf[0], count) || !number(hf[1], dim) || dim < 1)
    throw Error(ErrorKind::Parse, "word-vector header must be \"count dim\"");
  if (dim != k)
    throw Error(ErrorKind::Validation,
                "word vectors have dimension " + std::to_string(dim) + " but k = " + std::to_string(k));

  Eigen::MatrixXd weights(k, static_cast<Eigen::Index>(vocab.size()));
  std::vector<bool> covered(vocab.size(), false);
  std::size_t rows = 0;
  while (auto line = next_line()) {
    ++rows;
    auto f = fields(*line);
    if (f.size() != static_cast<std::size_t>(dim) + 1)
      throw Error(ErrorKind::Parse, "word-vector row " + std::to_string(rows) + " has " +
                                        std::to_string(f.size() - 1) + " values, expected " + std::to_string(dim));
    Eigen::VectorXd v(dim);
    for (int d = 0; d < dim; ++d)
      if (!number(f[static_cast<std::size_t>(d) + 1], v(d)))
        throw Error(ErrorKind::Parse, "word-vector row " + std::to_string(rows) + " has a non-numeric value");
    if (!vocab.contains(f[0])) continue;
    auto id = static_cast<std::size_t>(vocab.id_of(f[0]));
    if (covered[id]) continue;
    covered[id] = true;
    weights.col(static_cast<Eigen::Index>(id)) = v;
  }
  if (rows != count)
    throw Error(ErrorKind::Parse, "word-vector header declares " + std::to_string(count) + " rows but the body has " +
                                      std::to_string(rows));

  LoadedEmbedding out;
  std::normal_distribution<double> normal(0.0, fallback_std);
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    if (covered[id]) {
      ++out.coverage.covered;
      continue;
    }
    for (int d = 0; d < k; ++d) weights(d, static_cast<Eigen::Index>(id)) = normal(rng);
    if (id >= 2) {
      ++out.coverage.uncovered;
      out.coverage.uncovered_tokens.push_back(vocab.token(static_cast<TokenId>(id)));
    }
  }
  out.layer.weights = std::move(weights);
  return out;
}

LoadedEmbedding load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab, int k,
                                           double fallback_std, Rng& rng) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open word vectors " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pretrained_embeddings(ss.str(), vocab, k, fallback_std, rng);
}

// ---------------------------------------------------------------------------
// Optimizer

TaskVelocity TaskVelocity::zeros_like(const Embedding& embedding, const TaskLayers& layers) {
  TaskVelocity v;
  v.embedding = Eigen::MatrixXd::Zero(embedding.weights.rows(), embedding.weights.cols());
  v.filters = Eigen::MatrixXd::Zero(layers.conv.filters.rows(), layers.conv.filters.cols());
  v.conv_bias = Eigen::VectorXd::Zero(layers.conv.bias.size());
  v.head_weights = Eigen::VectorXd::Zero(layers.head.weights.size());
  return v;
}

void apply_momentum_step(Embedding& embedding, TaskLayers& layers, TaskVelocity& velocity,
                         const nn::TaskGradients<double>& grad, double lr, double mu) {
  if (velocity.embedding.rows() != embedding.weights.rows() || velocity.embedding.cols() != embedding.weights.cols())
    throw Error(ErrorKind::Shape, "embedding velocity shape differs from the embedding");
  velocity.embedding *= mu;
  for (const auto& [id, col] : grad.embedding) {
    if (id < 0 || id >= embedding.weights.cols()) throw Error(ErrorKind::Index, "gradient column outside embedding");
    if (col.size() != embedding.weights.rows()) throw Error(ErrorKind::Shape, "embedding gradient column length");
    velocity.embedding.col(id) -= lr * col;
  }
  embedding.weights += velocity.embedding;

  sgd_momentum_step(layers.conv.filters, grad.filters, velocity.filters, lr, mu);
  sgd_momentum_step(layers.conv.bias, grad.conv_bias, velocity.conv_bias, lr, mu);
  sgd_momentum_step(layers.head.weights, grad.head_weights, velocity.head_weights, lr, mu);
  velocity.head_bias = mu * velocity.head_bias - lr * grad.head_bias;
  layers.head.bias += velocity.head_bias;
}

// ---------------------------------------------------------------------------
// Batches

BatchGradient batch_gradient(const Embedding& embedding, const TaskLayers& layers, std::span<const Example> examples) {
  BatchGradient out;
  out.grad = nn::TaskGradients<double>::zeros_like(layers.conv, layers.head);
  if (examples.empty()) return out;
  double loss_sum = 0.0;
  for (const auto& ex : examples) {
    auto trace = nn::forward<double>(*ex.padded, embedding, layers.conv, layers.head);
    loss_sum += logistic_loss(trace.probability, ex.label);
    out.grad.add_scaled(nn::backward(trace, ex.label, embedding, layers.conv, layers.head), 1.0);
  }
  out.count = examples.size();
  const double inv = 1.0 / static_cast<double>(out.count);
  out.grad.scale(inv);
  out.loss = loss_sum * inv;
  return out;
}

TrainingSet::TrainingSet(const Corpus& corpus, std::span<const std::size_t> indices, int half_window)
    : aspect_count_(corpus.schema.size()) {
  padded_.reserve(indices.size());
  for (std::size_t idx : indices) {
    const auto& ls = corpus.sentences.at(idx);
    if (ls.sentence.length() == 0) throw Error(ErrorKind::EmptyInput, "training sentence has no words");
    if (ls.aspects.size() != aspect_count_) throw Error(ErrorKind::Validation, "aspect flags do not match the schema");
    padded_.push_back(pad(ls.sentence.ids, half_window));
    aspects_.push_back(ls.aspects);
    sentiment_.push_back(ls.has_aspect() ? ls.sentiment : std::nullopt);
  }
}

std::vector<Example> TrainingSet::examples(std::size_t slot, std::span<const std::size_t> positions) const {
  std::vector<Example> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) {
    if (slot < aspect_count_) {
      out.push_back({&padded_.at(p), aspects_[p][slot] ? 1 : 0});
    } else if (slot == aspect_count_) {
      if (sentiment_.at(p)) out.push_back({&padded_[p], *sentiment_[p] == Polarity::Positive ? 1 : 0});
    } else {
      throw Error(ErrorKind::Index, "task slot out of range");
    }
  }
  return out;
}

std::vector<std::size_t> TrainingSet::all_positions() const {
  std::vector<std::size_t> out(padded_.size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

std::vector<std::size_t> TrainingSet::aspect_bearing_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < padded_.size(); ++p)
    if (sentiment_[p]) out.push_back(p);
  return out;
}

std::vector<std::vector<std::size_t>> make_batches(std::span<const std::size_t> positions, int batch_size, Rng& rng) {
  std::vector<std::size_t> order(positions.begin(), positions.end());
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  if (order.empty()) return batches;
  const std::size_t size = std::min<std::size_t>(static_cast<std::size_t>(std::max(batch_size, 1)), order.size());
  for (std::size_t b = 0; b < order.size(); b += size)
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(b),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(b + size, order.size())));
  return batches;
}

// ---------------------------------------------------------------------------
// Multitask training

MultitaskTrainer::MultitaskTrainer(MultitaskCnn model, const TrainingSet& data, std::size_t main_slot,
                                   const Hyperparams& hp, Options options)
    : model_(std::move(model)), data_(data), main_slot_(main_slot), hp_(hp) {
  if (model_.tasks.size() != data_.aspect_count() + 1)
    throw Error(ErrorKind::Shape, "model task count does not match the training data");
  if (main_slot_ >= model_.tasks.size()) throw Error(ErrorKind::Index, "main task slot out of range");
  if (options.allow_zero_lambda) {
    Hyperparams check = hp_;
    check.lambda = 0.5;
    check.lambdas.clear();
    check.validate();
    for (std::size_t s = 0; s < model_.tasks.size(); ++s)
      if (!(hp_.lambda_for(s) >= 0.0 && hp_.lambda_for(s) < 1.0))
        throw Error(ErrorKind::Usage, "lambdas must lie in [0, 1)");
  } else {
    hp_.validate(model_.tasks.size());
  }
  for (const auto& t : model_.tasks) velocity_.push_back(TaskVelocity::zeros_like(model_.shared_embedding, t));
}

std::optional<double> MultitaskTrainer::step(std::size_t slot, std::span<const std::size_t> batch, double weight) {
  auto examples = data_.examples(slot, batch);
  if (examples.empty()) return std::nullopt;
  auto bg = batch_gradient(model_.shared_embedding, model_.tasks.at(slot), examples);
  if (weight != 1.0) bg.grad.scale(weight);
  apply_momentum_step(model_.shared_embedding, model_.tasks[slot], velocity_[slot], bg.grad, hp_.learning_rate,
                      hp_.momentum);
  return bg.loss;
}

EpochStats MultitaskTrainer::train_batch(std::span<const std::size_t> batch) {
  EpochStats st;
  auto main = step(main_slot_, batch, 1.0);
  st.main_loss = main.value_or(std::numeric_limits<double>::quiet_NaN());
  st.objective = st.main_loss;
  for (std::size_t j = 0; j < model_.tasks.size(); ++j) {
    if (j == main_slot_) continue;
    const double lambda = hp_.lambda_for(j);
    if (auto aux = step(j, batch, lambda)) st.objective += lambda * *aux;
  }
  return st;
}

EpochStats MultitaskTrainer::run_epoch(const std::vector<std::vector<std::size_t>>& batches) {
  EpochStats total;
  std::size_t counted = 0;
  for (const auto& b : batches) {
    auto st = train_batch(b);
    if (std::isnan(st.main_loss)) continue;
    total.main_loss += st.main_loss;
    total.objective += st.objective;
    ++counted;
  }
  if (counted > 0) {
    total.main_loss /= static_cast<double>(counted);
    total.objective /= static_cast<double>(counted);
  }
  return total;
}

EpochStats MultitaskTrainer::run_epoch(Rng& rng) {
  auto positions = data_.all_positions();
  return run_epoch(make_batches(positions, hp_.batch_size, rng));
}

SingleTaskTrainer::SingleTaskTrainer(Embedding& embedding, TaskLayers& layers, const TrainingSet& data,
                                     std::size_t slot, const Hyperparams& hp)
    : embedding_(embedding),
      layers_(layers),
      data_(data),
      slot_(slot),
      hp_(hp),
      velocity_(TaskVelocity::zeros_like(embedding, layers)) {
  if (slot_ > data_.aspect_count()) throw Error(ErrorKind::Index, "task slot out of range");
}

std::optional<double> SingleTaskTrainer::step(std::span<const std::size_t> batch) {
  auto examples = data_.examples(slot_, batch);
  if (examples.empty()) return std::nullopt;
  auto bg = batch_gradient(embedding_, layers_, examples);
  apply_momentum_step(embedding_, layers_, velocity_, bg.grad, hp_.learning_rate, hp_.momentum);
  return bg.loss;
}

double SingleTaskTrainer::run_epoch(const std::vector<std::vector<std::size_t>>& batches) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& b : batches) {
    if (auto loss = step(b)) {
      sum += *loss;
      ++counted;
    }
  }
  return counted ? sum / static_cast<double>(counted) : 0.0;
}

double SingleTaskTrainer::run_epoch(Rng& rng) {
  auto positions = slot_ == data_.aspect_count() ? data_.aspect_bearing_positions() : data_.all_positions();
  return run_epoch(make_batches(positions, hp_.batch_size, rng));
}

namespace {

void check_training_inputs(const Corpus& corpus, std::span<const std::size_t> train_indices, const Hyperparams& hp) {
  hp.validate(corpus.schema.size() + 1);
  if (train_indices.empty()) throw Error(ErrorKind::Validation, "training split is empty");
}

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kMultitaskShuffleStream = 100;
constexpr std::uint64_t kCascadeShuffleStream = 2000;

}  // namespace

TrainedSuite train_mcnn(const Corpus& corpus, std::span<const std::size_t> train_indices, const Hyperparams& hp,
                        const Embedding* pretrained) {
  check_training_inputs(corpus, train_indices, hp);
  TrainingSet data(corpus, train_indices, hp.half_window());
  TrainedSuite out;
  for (std::size_t main = 0; main <= corpus.schema.size(); ++main) {
    Rng init_rng = make_rng(hp.seed, kInitStream);
    MultitaskTrainer trainer(init_multitask(corpus.schema, corpus.vocabulary.size(), hp, init_rng, pretrained), data,
                             main, hp);
    Rng shuffle = make_rng(hp.seed, kMultitaskShuffleStream + main);
    std::vector<EpochStats> log;
    for (int e = 0; e < hp.epochs; ++e) log.push_back(trainer.run_epoch(shuffle));
    out.suite.members.push_back(trainer.release());
    out.logs.push_back(std::move(log));
  }
  return out;
}

std::vector<double> train_cascade_network(CascadedCnn& model, std::size_t slot, const TrainingSet& data,
                                          const Hyperparams& hp) {
  SingleTaskTrainer trainer(model.embeddings.at(slot), model.tasks.at(slot), data, slot, hp);
  Rng shuffle = make_rng(hp.seed, kCascadeShuffleStream + slot);
  std::vector<double> log;
  for (int e = 0; e < hp.epochs; ++e) log.push_back(trainer.run_epoch(shuffle));
  return log;
}

TrainedCascade train_ccnn(const Corpus& corpus, std::span<const std::size_t> train_indices, const Hyperparams& hp,
                          const Embedding* pretrained) {
  check_training_inputs(corpus, train_indices, hp);
  TrainingSet data(corpus, train_indices, hp.half_window());
  Rng init_rng = make_rng(hp.seed, kInitStream);
  TrainedCascade out;
  out.model = init_cascaded(corpus.schema, corpus.vocabulary.size(), hp, init_rng, pretrained);
  for (std::size_t slot = 0; slot <= corpus.schema.size(); ++slot)
    out.logs.push_back(train_cascade_network(out.model, slot, data, hp));
  return out;
}

}  // namespace aos

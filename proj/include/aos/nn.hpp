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

// Single-task sentence network: embedding lookup, windowed convolution with a
// rectifier, max-over-time pooling and a logistic output unit, together with
// exact backpropagation of the per-example logistic loss.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aos/error.hpp"
#include "aos/text.hpp"

namespace aos::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// k x |D| table; column `id` is the vector of vocabulary entry `id`.
template <typename Scalar>
struct EmbeddingLayer {
  Matrix<Scalar> weights;

  Index dim() const { return weights.rows(); }
  Index vocabulary_size() const { return weights.cols(); }
};

/// Filters are stored one per column, each of length window() * k. The
/// window input is the concatenation of h consecutive embedding columns,
/// earliest word first.
template <typename Scalar>
struct ConvLayer {
  Matrix<Scalar> filters;
  Vector<Scalar> bias;
  int half_window = 1;

  int window() const { return 2 * half_window + 1; }
  Index filter_count() const { return filters.cols(); }
};

template <typename Scalar>
struct OutputHead {
  Vector<Scalar> weights;
  Scalar bias = 0;
};

template <typename Scalar>
struct Pooled {
  Vector<Scalar> values;
  std::vector<Index> argmax;
};

/// Everything backward() needs from one forward pass.
template <typename Scalar>
struct ForwardTrace {
  IdSequence padded_ids;
  Matrix<Scalar> embedded;        // k x (l + 2r)
  Matrix<Scalar> pre_activation;  // m x l
  Matrix<Scalar> feature_maps;    // m x l
  std::vector<Index> argmax;      // per filter
  Vector<Scalar> pooled;          // m
  Scalar logit = 0;
  Scalar probability = 0;
};

/// Gradients congruent with one (embedding, conv, head) triple. The
/// embedding gradient is kept only for the columns a sentence touches.
template <typename Scalar>
struct TaskGradients {
  std::map<TokenId, Vector<Scalar>> embedding;
  Matrix<Scalar> filters;
  Vector<Scalar> conv_bias;
  Vector<Scalar> head_weights;
  Scalar head_bias = 0;

  static TaskGradients zeros_like(const ConvLayer<Scalar>& conv, const OutputHead<Scalar>& head) {
    TaskGradients g;
    g.filters = Matrix<Scalar>::Zero(conv.filters.rows(), conv.filters.cols());
    g.conv_bias = Vector<Scalar>::Zero(conv.bias.size());
    g.head_weights = Vector<Scalar>::Zero(head.weights.size());
    return g;
  }

  /// this += scale * other
  void add_scaled(const TaskGradients& other, Scalar scale) {
    for (const auto& [id, col] : other.embedding) {
      auto [it, inserted] = embedding.try_emplace(id, scale * col);
      if (!inserted) it->second += scale * col;
    }
    filters += scale * other.filters;
    conv_bias += scale * other.conv_bias;
    head_weights += scale * other.head_weights;
    head_bias += scale * other.head_bias;
  }

  void scale(Scalar s) {
    for (auto& [id, col] : embedding) col *= s;
    filters *= s;
    conv_bias *= s;
    head_weights *= s;
    head_bias *= s;
  }
};

// ---------------------------------------------------------------------------

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= 0) return Scalar(1) / (Scalar(1) + std::exp(-z));
  Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

/// Logistic function kept strictly inside (0, 1) for every finite input.
template <typename Scalar>
Scalar probability_from_logit(Scalar z) {
  constexpr Scalar lo = std::numeric_limits<Scalar>::min();
  constexpr Scalar hi = Scalar(1) - std::numeric_limits<Scalar>::epsilon() / 2;
  Scalar p = sigmoid(z);
  return p < lo ? lo : (p > hi ? hi : p);
}

template <typename Scalar>
Matrix<Scalar> embed(std::span<const TokenId> padded_ids, const EmbeddingLayer<Scalar>& layer) {
  Matrix<Scalar> out(layer.weights.rows(), static_cast<Index>(padded_ids.size()));
  for (std::size_t t = 0; t < padded_ids.size(); ++t) {
    TokenId id = padded_ids[t];
    if (id < 0 || id >= layer.weights.cols())
      throw Error(ErrorKind::Index, "token id " + std::to_string(id) + " outside embedding table of " +
                                        std::to_string(layer.weights.cols()) + " columns");
    out.col(static_cast<Index>(t)) = layer.weights.col(id);
  }
  return out;
}

/// Number of convolution windows for a padded input, or an EmptyInput error
/// when the unpadded sentence has no words.
template <typename Scalar>
Index window_count(const Matrix<Scalar>& embedded, const ConvLayer<Scalar>& conv) {
  Index l = embedded.cols() - 2 * conv.half_window;
  if (l <= 0) throw Error(ErrorKind::EmptyInput, "sentence has no words to convolve");
  return l;
}

/// The hk x l matrix whose column t is the concatenated window starting at
/// padded position t. Column-major storage makes each window contiguous.
template <typename Scalar>
Matrix<Scalar> windows(const Matrix<Scalar>& embedded, const ConvLayer<Scalar>& conv) {
  Index l = window_count(embedded, conv);
  Index k = embedded.rows();
  Index hk = k * conv.window();
  if (conv.filters.rows() != hk)
    throw Error(ErrorKind::Shape, "filter length " + std::to_string(conv.filters.rows()) +
                                      " does not match window size " + std::to_string(hk));
  Matrix<Scalar> out(hk, l);
  for (Index t = 0; t < l; ++t)
    out.col(t) = Eigen::Map<const Vector<Scalar>>(embedded.data() + t * k, hk);
  return out;
}

/// Filter responses before the rectifier, m x l.
template <typename Scalar>
Matrix<Scalar> convolve_linear(const Matrix<Scalar>& embedded, const ConvLayer<Scalar>& conv) {
  Matrix<Scalar> pre = conv.filters.transpose() * windows(embedded, conv);
  pre.colwise() += conv.bias;
  return pre;
}

template <typename Scalar>
Matrix<Scalar> relu(const Matrix<Scalar>& pre) {
  return pre.cwiseMax(Scalar(0));
}

template <typename Scalar>
Matrix<Scalar> convolve(const Matrix<Scalar>& embedded, const ConvLayer<Scalar>& conv) {
  return relu(convolve_linear(embedded, conv));
}

/// Row-wise maximum; ties go to the earliest time step.
template <typename Scalar>
Pooled<Scalar> max_over_time(const Matrix<Scalar>& maps) {
  if (maps.cols() == 0) throw Error(ErrorKind::EmptyInput, "feature maps have no time steps");
  Pooled<Scalar> out;
  out.values.resize(maps.rows());
  out.argmax.resize(static_cast<std::size_t>(maps.rows()));
  for (Index j = 0; j < maps.rows(); ++j) {
    Index best = 0;
    for (Index t = 1; t < maps.cols(); ++t)
      if (maps(j, t) > maps(j, best)) best = t;
    out.values(j) = maps(j, best);
    out.argmax[static_cast<std::size_t>(j)] = best;
  }
  return out;
}

template <typename Scalar>
Scalar head_logit(const Vector<Scalar>& v, const OutputHead<Scalar>& head) {
  if (v.size() != head.weights.size())
    throw Error(ErrorKind::Shape, "pooled vector and head weights differ in length");
  return head.weights.dot(v) + head.bias;
}

template <typename Scalar>
Scalar head_forward(const Vector<Scalar>& v, const OutputHead<Scalar>& head) {
  return probability_from_logit(head_logit(v, head));
}

template <typename Scalar>
ForwardTrace<Scalar> forward(std::span<const TokenId> padded_ids, const EmbeddingLayer<Scalar>& embedding,
                             const ConvLayer<Scalar>& conv, const OutputHead<Scalar>& head) {
  ForwardTrace<Scalar> tr;
  tr.padded_ids.assign(padded_ids.begin(), padded_ids.end());
  tr.embedded = embed(padded_ids, embedding);
  tr.pre_activation = convolve_linear(tr.embedded, conv);
  tr.feature_maps = relu(tr.pre_activation);
  auto pooled = max_over_time(tr.feature_maps);
  tr.pooled = std::move(pooled.values);
  tr.argmax = std::move(pooled.argmax);
  tr.logit = head_logit(tr.pooled, head);
  tr.probability = probability_from_logit(tr.logit);
  return tr;
}

/// Probability only, without keeping the trace.
template <typename Scalar>
Scalar predict(std::span<const TokenId> padded_ids, const EmbeddingLayer<Scalar>& embedding,
               const ConvLayer<Scalar>& conv, const OutputHead<Scalar>& head) {
  Matrix<Scalar> maps = convolve(embed(padded_ids, embedding), conv);
  return head_forward(max_over_time(maps).values, head);
}

/// Gradients of -[y ln a + (1-y) ln(1-a)] for one example. Pooling routes the
/// signal to the stored argmax step only; the rectifier passes it where the
/// pre-activation is strictly positive.
template <typename Scalar>
TaskGradients<Scalar> backward(const ForwardTrace<Scalar>& trace, int label,
                               const EmbeddingLayer<Scalar>& embedding, const ConvLayer<Scalar>& conv,
                               const OutputHead<Scalar>& head) {
  const Index k = embedding.dim();
  const Index m = conv.filter_count();
  const Index h = conv.window();
  if (trace.embedded.rows() != k || trace.pre_activation.rows() != m ||
      static_cast<Index>(trace.argmax.size()) != m || trace.pooled.size() != m ||
      head.weights.size() != m || conv.filters.rows() != h * k || conv.bias.size() != m ||
      trace.embedded.cols() != static_cast<Index>(trace.padded_ids.size()))
    throw Error(ErrorKind::Shape, "forward trace does not match the parameter shapes");

  TaskGradients<Scalar> g = TaskGradients<Scalar>::zeros_like(conv, head);
  const Scalar dlogit = trace.probability - Scalar(label);
  g.head_weights = dlogit * trace.pooled;
  g.head_bias = dlogit;

  Matrix<Scalar> d_embedded = Matrix<Scalar>::Zero(k, trace.embedded.cols());
  for (Index j = 0; j < m; ++j) {
    const Index t = trace.argmax[static_cast<std::size_t>(j)];
    if (!(trace.pre_activation(j, t) > Scalar(0))) continue;
    const Scalar dpre = dlogit * head.weights(j);
    Eigen::Map<const Vector<Scalar>> window(trace.embedded.data() + t * k, h * k);
    g.filters.col(j) += dpre * window;
    g.conv_bias(j) += dpre;
    Eigen::Map<Vector<Scalar>> d_window(d_embedded.data() + t * k, h * k);
    d_window += dpre * conv.filters.col(j);
  }

  // Columns inside no argmax window receive nothing.
  std::vector<bool> touched(static_cast<std::size_t>(d_embedded.cols()), false);
  for (Index j = 0; j < m; ++j) {
    const Index t = trace.argmax[static_cast<std::size_t>(j)];
    if (!(trace.pre_activation(j, t) > Scalar(0))) continue;
    for (Index c = t; c < t + h; ++c) touched[static_cast<std::size_t>(c)] = true;
  }
  for (Index c = 0; c < d_embedded.cols(); ++c) {
    if (!touched[static_cast<std::size_t>(c)]) continue;
    TokenId id = trace.padded_ids[static_cast<std::size_t>(c)];
    auto [it, inserted] = g.embedding.try_emplace(id, d_embedded.col(c));
    if (!inserted) it->second += d_embedded.col(c);
  }
  return g;
}

}  // namespace aos::nn

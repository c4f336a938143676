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

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>

#include "aos/loss.hpp"
#include "aos/nn.hpp"

namespace aos::nn {

struct GradcheckExample {
  IdSequence padded_ids;
  int label = 0;
};

/// Per-example logistic loss of one network.
inline double example_loss(const GradcheckExample& ex, const EmbeddingLayer<double>& embedding,
                           const ConvLayer<double>& conv, const OutputHead<double>& head) {
  return logistic_loss(predict<double>(ex.padded_ids, embedding, conv, head), ex.label);
}

/// Central-difference comparison of `analytic` against the loss at
/// theta +/- eps for every parameter. Returns the largest relative error,
/// using max(|analytic|, |numeric|, 1e-8) as the denominator. Parameters are
/// restored bitwise after each probe.
inline double finite_difference_check(EmbeddingLayer<double> embedding, ConvLayer<double> conv,
                                      OutputHead<double> head, const GradcheckExample& ex,
                                      const TaskGradients<double>& analytic, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "finite-difference step must be positive");
  double worst = 0.0;
  auto probe = [&](double& param, double grad) {
    const double saved = param;
    param = saved + eps;
    const double up = example_loss(ex, embedding, conv, head);
    param = saved - eps;
    const double down = example_loss(ex, embedding, conv, head);
    param = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(grad), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(grad - numeric) / denom);
  };

  for (Index c = 0; c < embedding.weights.cols(); ++c) {
    auto it = analytic.embedding.find(static_cast<TokenId>(c));
    for (Index r = 0; r < embedding.weights.rows(); ++r)
      probe(embedding.weights(r, c), it == analytic.embedding.end() ? 0.0 : it->second(r));
  }
  for (Index c = 0; c < conv.filters.cols(); ++c)
    for (Index r = 0; r < conv.filters.rows(); ++r) probe(conv.filters(r, c), analytic.filters(r, c));
  for (Index j = 0; j < conv.bias.size(); ++j) probe(conv.bias(j), analytic.conv_bias(j));
  for (Index j = 0; j < head.weights.size(); ++j) probe(head.weights(j), analytic.head_weights(j));
  probe(head.bias, analytic.head_bias);
  return worst;
}

/// Runs forward/backward and checks the result.
inline double finite_difference_check(const EmbeddingLayer<double>& embedding, const ConvLayer<double>& conv,
                                      const OutputHead<double>& head, const GradcheckExample& ex,
                                      double eps) {
  auto trace = forward<double>(ex.padded_ids, embedding, conv, head);
  auto grads = backward(trace, ex.label, embedding, conv, head);
  return finite_difference_check(embedding, conv, head, ex, grads, eps);
}

}  // namespace aos::nn

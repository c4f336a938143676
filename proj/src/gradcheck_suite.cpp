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

#include "aos/gradcheck_suite.hpp"

#include <cmath>

#include "aos/gradcheck.hpp"
#include "aos/models.hpp"
#include "aos/train.hpp"

namespace aos {
namespace {

constexpr double kKinkMargin = 1e-3;

bool near_kink(const nn::ForwardTrace<double>& trace) {
  const auto& pre = trace.pre_activation;
  for (Eigen::Index j = 0; j < pre.rows(); ++j) {
    double top = -1.0, second = -1.0;
    for (Eigen::Index t = 0; t < pre.cols(); ++t) {
      const double z = pre(j, t);
      if (std::abs(z) < kKinkMargin) return true;
      const double a = std::max(z, 0.0);
      if (a > top) {
        second = top;
        top = a;
      } else if (a > second) {
        second = a;
      }
    }
    if (top > 0.0 && second >= 0.0 && top - second < kKinkMargin) return true;
  }
  return false;
}

}  // namespace

GradcheckSuiteResult run_gradcheck_suite(std::uint64_t seed, std::size_t count, double eps) {
  Rng rng = make_rng(seed, 0x6C);
  std::uniform_int_distribution<int> dim(1, 8), len(1, 10), filt(1, 6), vocab(3, 12), label(0, 1);
  GradcheckSuiteResult out;
  while (out.networks < count) {
    const int k = dim(rng), l = len(rng), m = filt(rng), v = vocab(rng);
    Embedding emb{init_weights(k, v, rng, 1.0)};
    Conv conv;
    conv.half_window = 1;
    conv.filters = init_weights(3 * k, m, rng, 1.0 / std::sqrt(3.0 * k));
    conv.bias = init_weights(m, 1, rng, 0.1);
    Head head;
    head.weights = init_weights(m, 1, rng, 1.0 / std::sqrt(static_cast<double>(m)));
    head.bias = init_weights(1, 1, rng, 0.1)(0, 0);

    std::uniform_int_distribution<TokenId> word(1, v - 1);
    IdSequence ids(static_cast<std::size_t>(l));
    for (auto& id : ids) id = word(rng);
    nn::GradcheckExample ex{pad(ids, 1), label(rng)};

    auto trace = nn::forward<double>(ex.padded_ids, emb, conv, head);
    if (near_kink(trace)) {
      ++out.resampled;
      continue;
    }
    auto grads = nn::backward(trace, ex.label, emb, conv, head);
    const double err = nn::finite_difference_check(emb, conv, head, ex, grads, eps);
    if (err > out.max_relative_error || out.networks == 0) {
      out.max_relative_error = std::max(out.max_relative_error, err);
      out.worst_network = out.networks;
    }
    ++out.networks;
  }
  return out;
}

}  // namespace aos

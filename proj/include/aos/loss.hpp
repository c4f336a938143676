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

#include <cmath>
#include <cstddef>
#include <span>

#include "aos/error.hpp"

namespace aos {

/// -[y ln a + (1 - y) ln(1 - a)] for a in (0, 1) and y in {0, 1}.
template <typename Scalar>
Scalar logistic_loss(Scalar probability, int label) {
  if (!(probability > Scalar(0) && probability < Scalar(1)))
    throw Error(ErrorKind::Domain, "logistic loss needs a probability strictly inside (0, 1)");
  if (label != 0 && label != 1) throw Error(ErrorKind::Domain, "logistic loss label must be 0 or 1");
  return label == 1 ? -std::log(probability) : -std::log1p(-probability);
}

/// Mean of logistic_loss over paired probabilities and labels.
template <typename Scalar>
Scalar mean_logistic_loss(std::span<const Scalar> probabilities, std::span<const int> labels) {
  if (probabilities.size() != labels.size())
    throw Error(ErrorKind::Shape, "probabilities and labels differ in count");
  if (probabilities.empty()) throw Error(ErrorKind::EmptyInput, "empty batch");
  Scalar sum = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) sum += logistic_loss(probabilities[i], labels[i]);
  return sum / Scalar(probabilities.size());
}

/// Main-task loss plus lambda-weighted auxiliary losses. Each lambda must lie
/// strictly inside (0, 1).
inline double multitask_objective(double main_loss, std::span<const double> aux_losses,
                                  std::span<const double> lambdas) {
  if (aux_losses.size() != lambdas.size())
    throw Error(ErrorKind::Usage, "one lambda is required per auxiliary task");
  double j = main_loss;
  for (std::size_t t = 0; t < aux_losses.size(); ++t) {
    if (!(lambdas[t] > 0.0 && lambdas[t] < 1.0))
      throw Error(ErrorKind::Usage, "auxiliary task weights must lie in (0, 1)");
    j += lambdas[t] * aux_losses[t];
  }
  return j;
}

}  // namespace aos

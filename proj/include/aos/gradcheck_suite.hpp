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

namespace aos {

struct GradcheckSuiteResult {
  std::size_t networks = 0;
  double max_relative_error = 0;
  std::size_t worst_network = 0;
  std::size_t resampled = 0;  // draws rejected for sitting near a kink
};

/// Finite-difference checks of `count` random single-task networks with
/// k <= 8, sentence length <= 10, m <= 6 filters and h = 3. A draw whose
/// pre-activations lie within 1e-3 of zero, or whose top two pooled
/// candidates lie within 1e-3 of each other, is redrawn: the loss is not
/// differentiable there.
GradcheckSuiteResult run_gradcheck_suite(std::uint64_t seed, std::size_t count, double eps);

}  // namespace aos

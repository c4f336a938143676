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
#include <string>
#include <string_view>
#include <vector>

namespace aos {

/// Network and optimizer settings. Epochs, lambda and the SVM constant
/// have no canonical value; the defaults here are local choices.
struct Hyperparams {
  int k = 30;
  int h = 3;
  int m_aspect = 300;
  int m_sentiment = 100;
  int batch_size = 1000;
  double learning_rate = 0.5;
  double momentum = 0.9;
  double init_std = 0.1;
  int epochs = 50;
  double lambda = 0.1;
  // Optional per-task override indexed by task slot (aspects, then sentiment).
  std::vector<double> lambdas;
  double threshold = 0.5;
  std::uint64_t seed = 1;
  int min_count = 1;
  double svm_c = 1.0;
  int svm_epochs = 30;

  int half_window() const { return h / 2; }
  double lambda_for(std::size_t slot) const;

  /// Throws ErrorKind::Usage on any out-of-range field. `task_count` is C+1
  /// when known (checks the lambdas length); 0 skips that check.
  void validate(std::size_t task_count = 0) const;
};

/// Applies one `key = value` setting. Unknown keys are usage errors.
void apply_setting(Hyperparams& hp, std::string_view key, std::string_view value);

/// Flat key-value text; '#' starts a comment.
Hyperparams parse_config(std::string_view content, Hyperparams base = {});
Hyperparams load_config(const std::filesystem::path& path, Hyperparams base = {});

/// Inverse of parse_config; every field is written.
std::string to_config(const Hyperparams& hp);

}  // namespace aos

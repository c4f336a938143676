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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "aos/baseline.hpp"
#include "aos/hyperparams.hpp"
#include "aos/models.hpp"
#include "aos/text.hpp"

namespace aos {

inline constexpr std::uint32_t kModelFormatVersion = 1;

enum class ModelKind : std::uint8_t { Cascaded = 1, MultitaskSuite = 2, LinearCascade = 3 };

/// A trained model with everything needed to run it on raw text.
struct ModelBundle {
  Hyperparams hp;
  Vocabulary vocabulary;
  std::variant<CascadedCnn, MultitaskSuite, LinearCascade> model;

  ModelKind kind() const;
  const AspectSentimentModel& classifier() const;
};

struct LoadExpectations {
  std::optional<AspectSchema> schema;
  std::optional<std::uint64_t> vocabulary_hash;
};

/// Versioned little-endian container: magic, format version, model kind,
/// hyperparameters (config text), schema, threshold, vocabulary hash and
/// tokens, then named tensors as (name, shape, row-major doubles).
std::string save_model(const ModelBundle& bundle);

/// Throws ErrorKind::Parse on bad magic or truncation and
/// ErrorKind::Validation on a version, hash, schema or shape mismatch.
ModelBundle load_model(std::string_view bytes, const LoadExpectations& expect = {});

void save_model_file(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_model_file(const std::filesystem::path& path, const LoadExpectations& expect = {});

}  // namespace aos

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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aos/models.hpp"
#include "aos/text.hpp"

namespace aos {

struct SummaryEntry {
  std::string review_id;
  int ordinal = 0;
  std::string text;
  Polarity polarity = Polarity::Negative;
  double probability = 0.5;  // probability of the positive class

  friend bool operator==(const SummaryEntry&, const SummaryEntry&) = default;
};

/// positive_count + negative_count == entries.size()
struct AspectSummary {
  std::string name;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
  std::vector<SummaryEntry> entries;  // sorted by (review_id, ordinal)

  friend bool operator==(const AspectSummary&, const AspectSummary&) = default;
};

struct SummaryReport {
  AspectSchema schema;
  std::vector<AspectSummary> summaries;  // one per aspect, schema order
  std::size_t processed = 0;
  std::size_t mapped = 0;  // sentences with at least one aspect

  friend bool operator==(const SummaryReport&, const SummaryReport&) = default;
};

/// Tallies each sentence once under every aspect it fires, with its single
/// polarity. Throws ErrorKind::Validation when a sentence breaks the gating
/// rule (sentiment present iff some aspect fires) or has the wrong width.
SummaryReport aggregate(std::span<const ClassifiedSentence> classified, const AspectSchema& schema);

/// Stable key order and sentence order; parse_report_json inverts it.
std::string emit_json(const SummaryReport& report);
/// Throws ErrorKind::Parse on malformed input, ErrorKind::Validation when
/// counts disagree with the listed sentences.
SummaryReport parse_report_json(std::string_view json);

/// Self-contained static page. Counts link to the sentence lists below them.
std::string emit_html(const SummaryReport& report);

std::string html_escape(std::string_view text);

/// Segments, tokenizes and classifies raw reviews, then aggregates.
/// Sentences without any token are skipped.
SummaryReport summarize_reviews(const AspectSentimentModel& model, const Vocabulary& vocabulary,
                                std::span<const Review> reviews, unsigned threads = 1);

}  // namespace aos

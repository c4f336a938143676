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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aos {

using TokenId = std::int32_t;
using IdSequence = std::vector<TokenId>;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;

/// Token index space. Ids 0 and 1 are reserved for padding and unknown
/// words; corpus tokens occupy 2..size()-1.
class Vocabulary {
 public:
  Vocabulary();

  /// Builds from corpus tokens listed in id order (ids 2, 3, ...).
  /// Throws ErrorKind::Validation on duplicates or empty tokens.
  static Vocabulary from_tokens(std::vector<std::string> corpus_tokens);

  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;
  /// Returns kUnkId for out-of-vocabulary tokens.
  TokenId id_of(std::string_view token) const;
  const std::string& token(TokenId id) const;

  /// Corpus tokens only, in id order.
  std::span<const std::string> corpus_tokens() const;

  /// FNV-1a over the corpus tokens; stable across platforms.
  std::uint64_t content_hash() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
};

enum class Polarity { Negative, Positive };

std::string_view to_string(Polarity p);

struct Sentence {
  std::string raw;
  std::vector<std::string> tokens;
  IdSequence ids;  // unpadded
  std::string review_id;
  int ordinal = 0;

  std::size_t length() const { return ids.size(); }
};

struct LabeledSentence {
  Sentence sentence;
  std::vector<bool> aspects;
  std::optional<Polarity> sentiment;

  bool has_aspect() const;
};

class AspectSchema {
 public:
  AspectSchema() = default;
  /// Throws ErrorKind::Validation for an empty list, empty names or
  /// duplicates.
  explicit AspectSchema(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const AspectSchema&, const AspectSchema&) = default;

 private:
  std::vector<std::string> names_;
};

struct Corpus {
  AspectSchema schema;
  std::vector<LabeledSentence> sentences;
  Vocabulary vocabulary;
};

struct Review {
  std::string review_id;
  std::string text;
};

// ---------------------------------------------------------------------------
// Segmentation and tokenization

/// Splits review text into sentences after runs of terminal punctuation
/// (. ! ?) that are followed by whitespace or end of text. A period that
/// closes a known abbreviation or a dotted initialism does not split.
/// Never returns empty strings.
std::vector<std::string> segment_review(std::string_view text);

/// Lowercases ASCII letters and isolates every punctuation character as its
/// own token, except apostrophes with a letter or digit on both sides.
std::vector<std::string> tokenize(std::string_view sentence_text);

// ---------------------------------------------------------------------------
// Vocabulary and encoding

/// Keeps tokens with frequency >= min_count, ordered by descending frequency
/// and then lexicographically. Throws ErrorKind::Usage if min_count < 1.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> sentences,
                            int min_count = 1);

IdSequence to_ids(std::span<const std::string> tokens, const Vocabulary& vocab);

/// Surrounds ids with `r` pad ids on each side.
IdSequence pad(std::span<const TokenId> ids, int r);

/// Maps tokens through the vocabulary and pads with r entries on each side;
/// the result has length tokens.size() + 2r.
IdSequence encode(std::span<const std::string> tokens, const Vocabulary& vocab, int r);
IdSequence encode(const Sentence& sentence, const Vocabulary& vocab, int r);

/// Inverse of encode for in-vocabulary tokens: pad ids are dropped.
std::vector<std::string> decode(std::span<const TokenId> padded, const Vocabulary& vocab);

/// Tokenizes raw text and fills ids against `vocab`.
Sentence make_sentence(std::string raw, const Vocabulary& vocab, std::string review_id = {},
                       int ordinal = 0);

// ---------------------------------------------------------------------------
// Files

AspectSchema load_schema(const std::filesystem::path& path);

/// Reads the labeled-corpus line format. A leading `{"schema": [...]}` record
/// declares the aspect names; otherwise `schema` must be supplied. When both
/// are present they must agree. The vocabulary is built over every sentence in
/// the file with the given min_count.
Corpus load_corpus(const std::filesystem::path& path,
                   const std::optional<AspectSchema>& schema = std::nullopt,
                   int min_count = 1);

/// Same format, from an in-memory string; `origin` labels error messages.
Corpus parse_corpus(std::string_view content, const std::optional<AspectSchema>& schema,
                    int min_count = 1, std::string_view origin = "<memory>");

std::vector<Review> load_reviews(const std::filesystem::path& path);

/// Writes the corpus (schema header + one record per sentence).
void write_corpus(const std::filesystem::path& path, const AspectSchema& schema,
                  std::span<const LabeledSentence> sentences);

/// Segments reviews into unlabeled sentences (no aspects, no sentiment).
std::vector<LabeledSentence> ingest_reviews(std::span<const Review> reviews,
                                            const AspectSchema& schema);

struct CorpusStats {
  std::vector<std::size_t> per_aspect;
  std::size_t others = 0;
  std::size_t total = 0;
};

CorpusStats corpus_stats(const Corpus& corpus);

std::string format_stats(const CorpusStats& stats, const AspectSchema& schema);

}  // namespace aos

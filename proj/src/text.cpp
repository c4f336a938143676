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

#include "aos/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "aos/error.hpp"

namespace aos {
namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 28> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "e.g",
    "i.e", "approx", "fig", "mt", "ft", "dept", "jan", "feb", "apr", "jun",
    "jul", "aug", "sep", "sept", "oct", "nov", "dec", "cf"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// True when the single period at `dot` closes an abbreviation ("Dr."),
// an initialism ("U.S.") or a lone initial ("J.").
bool closes_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  std::string_view word = text.substr(begin, dot - begin);
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\''))
    word.remove_prefix(1);
  if (word.empty()) return false;
  // The pronoun "I" ends sentences often enough that it is never an initial.
  if (word.size() == 1 && word[0] != 'I' && std::isupper(static_cast<unsigned char>(word[0])))
    return true;

  std::string w = lower(word);
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), w) != kAbbreviations.end())
    return true;
  // Initialisms: single letters separated by periods, e.g. "u.s".
  if (w.size() >= 3) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      bool want_letter = (i % 2 == 0);
      if (want_letter != (std::isalpha(static_cast<unsigned char>(w[i])) != 0)) return false;
      if (!want_letter && w[i] != '.') return false;
    }
    return w.size() % 2 == 1;
  }
  return false;
}

[[noreturn]] void parse_error(std::string_view origin, std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw Error(ErrorKind::Parse, os.str());
}

[[noreturn]] void validation_error(std::string_view origin, std::size_t line,
                                   const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw Error(ErrorKind::Validation, os.str());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  while (!content.empty()) {
    ++line_no;
    auto nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content.remove_prefix(nl == std::string_view::npos ? content.size() : nl + 1);
    line = trim(line);
    if (!line.empty()) fn(line, line_no);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() : tokens_{"<pad>", "<unk>"} {}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> corpus_tokens) {
  Vocabulary v;
  v.tokens_.reserve(corpus_tokens.size() + 2);
  for (auto& t : corpus_tokens) {
    if (t.empty()) throw Error(ErrorKind::Validation, "empty vocabulary token");
    auto id = static_cast<TokenId>(v.tokens_.size());
    if (!v.index_.emplace(t, id).second)
      throw Error(ErrorKind::Validation, "duplicate vocabulary token '" + t + "'");
    v.tokens_.push_back(std::move(t));
  }
  return v;
}

bool Vocabulary::contains(std::string_view token) const { return index_.find(token) != index_.end(); }

TokenId Vocabulary::id_of(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw Error(ErrorKind::Index, "token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::span<const std::string> Vocabulary::corpus_tokens() const {
  return std::span<const std::string>(tokens_).subspan(2);
}

std::uint64_t Vocabulary::content_hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](unsigned char b) {
    h ^= b;
    h *= 1099511628211ull;
  };
  for (const auto& t : corpus_tokens()) {
    for (char c : t) mix(static_cast<unsigned char>(c));
    mix(0);
  }
  return h;
}

std::string_view to_string(Polarity p) { return p == Polarity::Positive ? "pos" : "neg"; }

bool LabeledSentence::has_aspect() const {
  return std::find(aspects.begin(), aspects.end(), true) != aspects.end();
}

AspectSchema::AspectSchema(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw Error(ErrorKind::Validation, "aspect schema is empty");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw Error(ErrorKind::Validation, "empty aspect name");
    for (std::size_t j = 0; j < i; ++j)
      if (names_[i] == names_[j])
        throw Error(ErrorKind::Validation, "duplicate aspect name '" + names_[i] + "'");
  }
}

std::optional<std::size_t> AspectSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Segmentation and tokenization

std::vector<std::string> segment_review(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  auto emit = [&](std::size_t end) {
    auto piece = trim(text.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end;
  };
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t run_begin = i;
    while (i < text.size() && is_terminal(text[i])) ++i;
    bool single_period = i - run_begin == 1 && text[run_begin] == '.';
    while (i < text.size() && is_closer(text[i])) ++i;
    bool at_break = i == text.size() || is_space(text[i]);
    if (!at_break) continue;
    if (single_period && closes_abbreviation(text, run_begin)) continue;
    emit(i);
  }
  emit(text.size());
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (is_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      bool inner_apostrophe =
          c == '\'' && i > 0 && i + 1 < s.size() && is_alnum(s[i - 1]) && is_alnum(s[i + 1]);
      if (inner_apostrophe) {
        cur.push_back(c);
      } else {
        flush();
        out.emplace_back(1, c);
      }
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary and encoding

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> sentences, int min_count) {
  if (min_count < 1) throw Error(ErrorKind::Usage, "min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences)
    for (const auto& t : s) ++counts[t];

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : counts)
    if (n >= static_cast<std::size_t>(min_count)) kept.emplace_back(tok, n);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [tok, n] : kept) tokens.push_back(tok);
  return Vocabulary::from_tokens(std::move(tokens));
}

IdSequence to_ids(std::span<const std::string> tokens, const Vocabulary& vocab) {
  IdSequence ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab.id_of(t));
  return ids;
}

IdSequence pad(std::span<const TokenId> ids, int r) {
  if (r < 0) throw Error(ErrorKind::Domain, "padding width must be >= 0");
  auto width = static_cast<std::size_t>(r);
  IdSequence out(ids.size() + 2 * width, kPadId);
  std::copy(ids.begin(), ids.end(), out.begin() + static_cast<std::ptrdiff_t>(width));
  return out;
}

IdSequence encode(std::span<const std::string> tokens, const Vocabulary& vocab, int r) {
  return pad(to_ids(tokens, vocab), r);
}

IdSequence encode(const Sentence& sentence, const Vocabulary& vocab, int r) {
  return encode(sentence.tokens, vocab, r);
}

std::vector<std::string> decode(std::span<const TokenId> padded, const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (TokenId id : padded)
    if (id != kPadId) out.push_back(vocab.token(id));
  return out;
}

Sentence make_sentence(std::string raw, const Vocabulary& vocab, std::string review_id, int ordinal) {
  Sentence s;
  s.tokens = tokenize(raw);
  s.ids = to_ids(s.tokens, vocab);
  s.raw = std::move(raw);
  s.review_id = std::move(review_id);
  s.ordinal = ordinal;
  return s;
}

// ---------------------------------------------------------------------------
// Files

AspectSchema load_schema(const std::filesystem::path& path) {
  std::vector<std::string> names;
  for_each_line(read_file(path), [&](std::string_view line, std::size_t) { names.emplace_back(line); });
  return AspectSchema(std::move(names));
}

Corpus parse_corpus(std::string_view content, const std::optional<AspectSchema>& schema,
                    int min_count, std::string_view origin) {
  Corpus corpus;
  std::optional<AspectSchema> declared = schema;
  bool first = true;

  for_each_line(content, [&](std::string_view line, std::size_t line_no) {
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      parse_error(origin, line_no, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) parse_error(origin, line_no, "record is not an object");

    if (first && rec.contains("schema")) {
      first = false;
      if (!rec["schema"].is_array()) parse_error(origin, line_no, "schema must be a list");
      std::vector<std::string> names;
      for (const auto& n : rec["schema"]) {
        if (!n.is_string()) parse_error(origin, line_no, "schema entries must be strings");
        names.push_back(n.get<std::string>());
      }
      AspectSchema header(std::move(names));
      if (declared && !(*declared == header))
        validation_error(origin, line_no, "corpus schema disagrees with the supplied schema");
      declared = std::move(header);
      return;
    }
    first = false;
    if (!declared) validation_error(origin, line_no, "no aspect schema declared");

    auto field = [&](const char* name) -> const json& {
      if (!rec.contains(name)) parse_error(origin, line_no, std::string("missing field '") + name + "'");
      return rec[name];
    };
    const json& rid = field("review_id");
    const json& ord = field("ordinal");
    const json& text = field("text");
    const json& aspects = field("aspects");
    if (!rid.is_string()) parse_error(origin, line_no, "review_id must be a string");
    if (!ord.is_number_integer()) parse_error(origin, line_no, "ordinal must be an integer");
    if (!text.is_string()) parse_error(origin, line_no, "text must be a string");
    if (!aspects.is_array()) parse_error(origin, line_no, "aspects must be a list");

    LabeledSentence ls;
    ls.aspects.assign(declared->size(), false);
    for (const auto& a : aspects) {
      if (!a.is_string()) parse_error(origin, line_no, "aspect names must be strings");
      auto idx = declared->index_of(a.get<std::string>());
      if (!idx) validation_error(origin, line_no, "unknown aspect '" + a.get<std::string>() + "'");
      ls.aspects[*idx] = true;
    }

    if (rec.contains("sentiment") && !rec["sentiment"].is_null()) {
      const json& s = rec["sentiment"];
      if (s == "pos")
        ls.sentiment = Polarity::Positive;
      else if (s == "neg")
        ls.sentiment = Polarity::Negative;
      else
        parse_error(origin, line_no, "sentiment must be \"pos\", \"neg\" or null");
    }
    if (ls.sentiment && !ls.has_aspect())
      validation_error(origin, line_no, "sentiment given for a sentence without aspects");
    if (!ls.sentiment && ls.has_aspect())
      validation_error(origin, line_no, "aspect-bearing sentence has no sentiment");

    ls.sentence.raw = text.get<std::string>();
    ls.sentence.tokens = tokenize(ls.sentence.raw);
    if (ls.sentence.tokens.empty()) validation_error(origin, line_no, "sentence has no tokens");
    ls.sentence.review_id = rid.get<std::string>();
    ls.sentence.ordinal = ord.get<int>();
    corpus.sentences.push_back(std::move(ls));
  });

  if (!declared) throw Error(ErrorKind::Validation, std::string(origin) + ": no aspect schema declared");
  corpus.schema = std::move(*declared);

  std::vector<std::vector<std::string>> all_tokens;
  all_tokens.reserve(corpus.sentences.size());
  for (const auto& ls : corpus.sentences) all_tokens.push_back(ls.sentence.tokens);
  corpus.vocabulary = build_vocabulary(all_tokens, min_count);
  for (auto& ls : corpus.sentences) ls.sentence.ids = to_ids(ls.sentence.tokens, corpus.vocabulary);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const std::optional<AspectSchema>& schema,
                   int min_count) {
  return parse_corpus(read_file(path), schema, min_count, path.string());
}

std::vector<Review> load_reviews(const std::filesystem::path& path) {
  std::vector<Review> out;
  std::string origin = path.string();
  for_each_line(read_file(path), [&](std::string_view line, std::size_t line_no) {
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      parse_error(origin, line_no, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("review_id") || !rec.contains("text") ||
        !rec["review_id"].is_string() || !rec["text"].is_string())
      parse_error(origin, line_no, "expected {\"review_id\": string, \"text\": string}");
    out.push_back({rec["review_id"].get<std::string>(), rec["text"].get<std::string>()});
  });
  return out;
}

void write_corpus(const std::filesystem::path& path, const AspectSchema& schema,
                  std::span<const LabeledSentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << json{{"schema", schema.names()}}.dump() << '\n';
  for (const auto& ls : sentences) {
    json rec;
    rec["review_id"] = ls.sentence.review_id;
    rec["ordinal"] = ls.sentence.ordinal;
    rec["text"] = ls.sentence.raw;
    json aspects = json::array();
    for (std::size_t i = 0; i < ls.aspects.size(); ++i)
      if (ls.aspects[i]) aspects.push_back(schema.name(i));
    rec["aspects"] = std::move(aspects);
    rec["sentiment"] = ls.sentiment ? json(std::string(to_string(*ls.sentiment))) : json(nullptr);
    out << rec.dump() << '\n';
  }
}

std::vector<LabeledSentence> ingest_reviews(std::span<const Review> reviews, const AspectSchema& schema) {
  std::vector<LabeledSentence> out;
  for (const auto& review : reviews) {
    int ordinal = 0;
    for (auto& text : segment_review(review.text)) {
      LabeledSentence ls;
      ls.sentence.tokens = tokenize(text);
      ls.sentence.raw = std::move(text);
      ls.sentence.review_id = review.review_id;
      ls.sentence.ordinal = ordinal++;
      ls.aspects.assign(schema.size(), false);
      out.push_back(std::move(ls));
    }
  }
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats st;
  st.per_aspect.assign(corpus.schema.size(), 0);
  for (const auto& ls : corpus.sentences) {
    ++st.total;
    bool any = false;
    for (std::size_t i = 0; i < ls.aspects.size(); ++i) {
      if (ls.aspects[i]) {
        ++st.per_aspect[i];
        any = true;
      }
    }
    if (!any) ++st.others;
  }
  return st;
}

std::string format_stats(const CorpusStats& stats, const AspectSchema& schema) {
  std::ostringstream os;
  os << "Aspects\t#Sentences\n";
  for (std::size_t i = 0; i < schema.size(); ++i) os << schema.name(i) << '\t' << stats.per_aspect.at(i) << '\n';
  os << "others\t" << stats.others << '\n';
  os << "all\t" << stats.total << '\n';
  return os.str();
}

}  // namespace aos

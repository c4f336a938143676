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

#include "aos/summarize.hpp"

#include <algorithm>
#include <tuple>

#include <json.hpp>

#include "aos/error.hpp"

namespace aos {
namespace {

using json = nlohmann::ordered_json;

bool entry_less(const SummaryEntry& a, const SummaryEntry& b) {
  return std::tie(a.review_id, a.ordinal) < std::tie(b.review_id, b.ordinal);
}

Polarity parse_polarity(const std::string& s) {
  if (s == "pos") return Polarity::Positive;
  if (s == "neg") return Polarity::Negative;
  throw Error(ErrorKind::Parse, "unknown polarity '" + s + "'");
}

}  // namespace

SummaryReport aggregate(std::span<const ClassifiedSentence> classified, const AspectSchema& schema) {
  SummaryReport report;
  report.schema = schema;
  for (const auto& name : schema.names()) report.summaries.push_back({name, 0, 0, {}});

  for (const auto& cs : classified) {
    if (cs.aspects.size() != schema.size())
      throw Error(ErrorKind::Validation, "classified sentence has " + std::to_string(cs.aspects.size()) +
                                             " aspect flags for a schema of " + std::to_string(schema.size()));
    const bool fired = std::find(cs.aspects.begin(), cs.aspects.end(), true) != cs.aspects.end();
    if (fired != cs.sentiment.has_value())
      throw Error(ErrorKind::Validation, "sentence " + cs.ref.review_id + "#" + std::to_string(cs.ref.ordinal) +
                                             (fired ? " fires an aspect without a sentiment"
                                                    : " carries a sentiment without any aspect"));
    ++report.processed;
    if (!fired) continue;
    ++report.mapped;
    for (std::size_t a = 0; a < schema.size(); ++a) {
      if (!cs.aspects[a]) continue;
      auto& s = report.summaries[a];
      (cs.sentiment->polarity == Polarity::Positive ? s.positive_count : s.negative_count) += 1;
      s.entries.push_back(
          {cs.ref.review_id, cs.ref.ordinal, cs.ref.text, cs.sentiment->polarity, cs.sentiment->probability});
    }
  }
  for (auto& s : report.summaries) std::stable_sort(s.entries.begin(), s.entries.end(), entry_less);
  return report;
}

std::string emit_json(const SummaryReport& report) {
  json doc;
  doc["schema"] = report.schema.names();
  doc["totals"] = {{"processed", report.processed}, {"mapped", report.mapped}};
  json aspects = json::array();
  for (const auto& s : report.summaries) {
    json a;
    a["name"] = s.name;
    a["positive"] = s.positive_count;
    a["negative"] = s.negative_count;
    json sentences = json::array();
    for (const auto& e : s.entries) {
      sentences.push_back({{"review_id", e.review_id},
                           {"ordinal", e.ordinal},
                           {"text", e.text},
                           {"polarity", std::string(to_string(e.polarity))},
                           {"probability", e.probability}});
    }
    a["sentences"] = std::move(sentences);
    aspects.push_back(std::move(a));
  }
  doc["aspects"] = std::move(aspects);
  return doc.dump(2) + "\n";
}

SummaryReport parse_report_json(std::string_view text) {
  SummaryReport r;
  try {
    json doc = json::parse(text);
    r.schema = AspectSchema(doc.at("schema").get<std::vector<std::string>>());
    r.processed = doc.at("totals").at("processed").get<std::size_t>();
    r.mapped = doc.at("totals").at("mapped").get<std::size_t>();
    for (const auto& a : doc.at("aspects")) {
      AspectSummary s;
      s.name = a.at("name").get<std::string>();
      s.positive_count = a.at("positive").get<std::size_t>();
      s.negative_count = a.at("negative").get<std::size_t>();
      for (const auto& e : a.at("sentences")) {
        s.entries.push_back({e.at("review_id").get<std::string>(), e.at("ordinal").get<int>(),
                             e.at("text").get<std::string>(), parse_polarity(e.at("polarity").get<std::string>()),
                             e.at("probability").get<double>()});
      }
      r.summaries.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed summary report: ") + e.what());
  }
  if (r.summaries.size() != r.schema.size())
    throw Error(ErrorKind::Validation, "summary report lists a different number of aspects than its schema");
  for (std::size_t a = 0; a < r.summaries.size(); ++a) {
    const auto& s = r.summaries[a];
    if (s.name != r.schema.name(a)) throw Error(ErrorKind::Validation, "summary aspects are out of schema order");
    if (s.positive_count + s.negative_count != s.entries.size())
      throw Error(ErrorKind::Validation, "counts for aspect '" + s.name + "' disagree with its sentences");
  }
  if (r.mapped > r.processed) throw Error(ErrorKind::Validation, "mapped total exceeds processed total");
  return r;
}

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&#39;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string emit_html(const SummaryReport& report) {
  std::string h;
  h += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  h += "<title>Opinion summary</title>\n<style>\n";
  h += "body{font-family:sans-serif;max-width:60em;margin:2em auto}\n";
  h += ".pos{color:#176117}.neg{color:#a11}\nli{margin:.2em 0}\n</style>\n</head>\n<body>\n";
  h += "<h1>Opinion summary</h1>\n";
  h += "<p>Sentences processed: " + std::to_string(report.processed) +
       ". Mapped to an aspect: " + std::to_string(report.mapped) + ".</p>\n";

  h += "<table>\n<tr><th>Aspect</th><th>Positive</th><th>Negative</th></tr>\n";
  for (std::size_t a = 0; a < report.summaries.size(); ++a) {
    const auto& s = report.summaries[a];
    const std::string id = "aspect-" + std::to_string(a);
    h += "<tr><td><a href=\"#" + id + "\">" + html_escape(s.name) + "</a></td>";
    h += "<td><a class=\"pos\" href=\"#" + id + "-pos\">" + std::to_string(s.positive_count) + "</a></td>";
    h += "<td><a class=\"neg\" href=\"#" + id + "-neg\">" + std::to_string(s.negative_count) + "</a></td></tr>\n";
  }
  h += "</table>\n";

  for (std::size_t a = 0; a < report.summaries.size(); ++a) {
    const auto& s = report.summaries[a];
    const std::string id = "aspect-" + std::to_string(a);
    h += "<section id=\"" + id + "\">\n<h2>" + html_escape(s.name) + "</h2>\n";
    for (Polarity p : {Polarity::Positive, Polarity::Negative}) {
      const bool pos = p == Polarity::Positive;
      h += "<h3 id=\"" + id + (pos ? "-pos" : "-neg") + "\" class=\"" + (pos ? "pos" : "neg") + "\">" +
           (pos ? "Positive" : "Negative") + " (" + std::to_string(pos ? s.positive_count : s.negative_count) +
           ")</h3>\n<ul>\n";
      for (const auto& e : s.entries) {
        if (e.polarity != p) continue;
        h += "<li><cite>" + html_escape(e.review_id) + " #" + std::to_string(e.ordinal) + "</cite> " +
             html_escape(e.text) + "</li>\n";
      }
      h += "</ul>\n";
    }
    h += "</section>\n";
  }
  h += "</body>\n</html>\n";
  return h;
}

SummaryReport summarize_reviews(const AspectSentimentModel& model, const Vocabulary& vocabulary,
                                std::span<const Review> reviews, unsigned threads) {
  std::vector<Sentence> sentences;
  for (const auto& review : reviews) {
    int ordinal = 0;
    for (auto& raw : segment_review(review.text)) {
      Sentence s = make_sentence(std::move(raw), vocabulary, review.review_id, ordinal++);
      if (!s.tokens.empty()) sentences.push_back(std::move(s));
    }
  }
  auto classified = classify_all(model, sentences, threads);
  return aggregate(classified, model.schema());
}

}  // namespace aos

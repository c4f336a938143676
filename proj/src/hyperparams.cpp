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

#include "aos/hyperparams.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "aos/error.hpp"

namespace aos {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::Usage, "invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  value = trim(value);
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double Hyperparams::lambda_for(std::size_t slot) const {
  return slot < lambdas.size() ? lambdas[slot] : lambda;
}

void Hyperparams::validate(std::size_t task_count) const {
  auto fail = [](const char* msg) { throw Error(ErrorKind::Usage, msg); };
  if (k < 1) fail("k must be >= 1");
  if (h < 1 || h % 2 == 0) fail("window size h must be odd and >= 1");
  if (m_aspect < 1 || m_sentiment < 1) fail("filter counts must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must lie in [0, 1)");
  if (!(init_std > 0.0)) fail("init_std must be > 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) fail("lambda must lie in (0, 1)");
  for (double l : lambdas)
    if (!(l > 0.0 && l < 1.0)) fail("lambdas must lie in (0, 1)");
  if (task_count != 0 && !lambdas.empty() && lambdas.size() != task_count)
    fail("lambdas needs one value per task");
  if (!(threshold > 0.0 && threshold < 1.0)) fail("threshold must lie in (0, 1)");
  if (min_count < 1) fail("min_count must be >= 1");
  if (!(svm_c > 0.0)) fail("svm_c must be > 0");
  if (svm_epochs < 1) fail("svm_epochs must be >= 1");
}

void apply_setting(Hyperparams& hp, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "k") hp.k = parse_number<int>(key, value);
  else if (key == "h") hp.h = parse_number<int>(key, value);
  else if (key == "m_aspect") hp.m_aspect = parse_number<int>(key, value);
  else if (key == "m_sentiment") hp.m_sentiment = parse_number<int>(key, value);
  else if (key == "batch_size") hp.batch_size = parse_number<int>(key, value);
  else if (key == "learning_rate") hp.learning_rate = parse_number<double>(key, value);
  else if (key == "momentum") hp.momentum = parse_number<double>(key, value);
  else if (key == "init_std") hp.init_std = parse_number<double>(key, value);
  else if (key == "epochs") hp.epochs = parse_number<int>(key, value);
  else if (key == "lambda") hp.lambda = parse_number<double>(key, value);
  else if (key == "lambdas") {
    hp.lambdas.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      hp.lambdas.push_back(parse_number<double>(key, rest.substr(0, comma)));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  else if (key == "threshold") hp.threshold = parse_number<double>(key, value);
  else if (key == "seed") hp.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "min_count") hp.min_count = parse_number<int>(key, value);
  else if (key == "svm_c") hp.svm_c = parse_number<double>(key, value);
  else if (key == "svm_epochs") hp.svm_epochs = parse_number<int>(key, value);
  else throw Error(ErrorKind::Usage, "unknown setting '" + std::string(key) + "'");
}

Hyperparams parse_config(std::string_view content, Hyperparams base) {
  std::size_t line_no = 0;
  while (!content.empty()) {
    ++line_no;
    auto nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content.remove_prefix(nl == std::string_view::npos ? content.size() : nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Usage, "config line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

Hyperparams load_config(const std::filesystem::path& path, Hyperparams base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string to_config(const Hyperparams& hp) {
  std::ostringstream os;
  os << "k = " << hp.k << '\n'
     << "h = " << hp.h << '\n'
     << "m_aspect = " << hp.m_aspect << '\n'
     << "m_sentiment = " << hp.m_sentiment << '\n'
     << "batch_size = " << hp.batch_size << '\n'
     << "learning_rate = " << format_double(hp.learning_rate) << '\n'
     << "momentum = " << format_double(hp.momentum) << '\n'
     << "init_std = " << format_double(hp.init_std) << '\n'
     << "epochs = " << hp.epochs << '\n'
     << "lambda = " << format_double(hp.lambda) << '\n';
  if (!hp.lambdas.empty()) {
    os << "lambdas = ";
    for (std::size_t i = 0; i < hp.lambdas.size(); ++i) os << (i ? "," : "") << format_double(hp.lambdas[i]);
    os << '\n';
  }
  os << "threshold = " << format_double(hp.threshold) << '\n'
     << "seed = " << hp.seed << '\n'
     << "min_count = " << hp.min_count << '\n'
     << "svm_c = " << format_double(hp.svm_c) << '\n'
     << "svm_epochs = " << hp.svm_epochs << '\n';
  return os.str();
}

}  // namespace aos

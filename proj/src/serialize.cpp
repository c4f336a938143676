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

#include "aos/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "aos/error.hpp"

namespace aos {
namespace {

constexpr char kMagic[8] = {'A', 'O', 'S', 'M', 'O', 'D', 'E', 'L'};

template <typename T>
T byteswap_if_needed(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = byteswap_if_needed(v);
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out_.append(b, sizeof(T));
  }
  void put_string(std::string_view s) {
    put<std::uint64_t>(s.size());
    out_.append(s);
  }
  void raw(const char* data, std::size_t n) { out_.append(data, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data(), sizeof(T));
    in_.remove_prefix(sizeof(T));
    return byteswap_if_needed(v);
  }
  std::string get_string() {
    auto n = get<std::uint64_t>();
    need(n);
    std::string s(in_.substr(0, n));
    in_.remove_prefix(n);
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(0, n);
    in_.remove_prefix(n);
    return s;
  }
  bool done() const { return in_.empty(); }

 private:
  void need(std::uint64_t n) const {
    if (n > in_.size()) throw Error(ErrorKind::Parse, "model data is truncated");
  }
  std::string_view in_;
};

struct Tensor {
  std::vector<std::uint64_t> shape;
  std::vector<double> values;  // row-major
};

using TensorMap = std::map<std::string, Tensor>;

void add(TensorMap& m, const std::string& name, const Eigen::MatrixXd& mat) {
  Tensor t;
  t.shape = {static_cast<std::uint64_t>(mat.rows()), static_cast<std::uint64_t>(mat.cols())};
  t.values.reserve(static_cast<std::size_t>(mat.size()));
  for (Eigen::Index r = 0; r < mat.rows(); ++r)
    for (Eigen::Index c = 0; c < mat.cols(); ++c) t.values.push_back(mat(r, c));
  m[name] = std::move(t);
}

void add(TensorMap& m, const std::string& name, const Eigen::VectorXd& v) {
  m[name] = Tensor{{static_cast<std::uint64_t>(v.size())}, std::vector<double>(v.data(), v.data() + v.size())};
}

void add(TensorMap& m, const std::string& name, double v) { m[name] = Tensor{{}, {v}}; }

const Tensor& find(const TensorMap& m, const std::string& name) {
  auto it = m.find(name);
  if (it == m.end()) throw Error(ErrorKind::Validation, "model data lacks tensor '" + name + "'");
  return it->second;
}

Eigen::MatrixXd matrix(const TensorMap& m, const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  const Tensor& t = find(m, name);
  if (t.shape.size() != 2 || t.shape[0] != static_cast<std::uint64_t>(rows) ||
      t.shape[1] != static_cast<std::uint64_t>(cols))
    throw Error(ErrorKind::Validation, "tensor '" + name + "' has an unexpected shape");
  Eigen::MatrixXd out(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = t.values[i++];
  return out;
}

Eigen::VectorXd vector(const TensorMap& m, const std::string& name, Eigen::Index size) {
  const Tensor& t = find(m, name);
  if (t.shape.size() != 1 || t.shape[0] != static_cast<std::uint64_t>(size))
    throw Error(ErrorKind::Validation, "tensor '" + name + "' has an unexpected shape");
  return Eigen::Map<const Eigen::VectorXd>(t.values.data(), size);
}

double scalar(const TensorMap& m, const std::string& name) {
  const Tensor& t = find(m, name);
  if (!t.shape.empty()) throw Error(ErrorKind::Validation, "tensor '" + name + "' is not a scalar");
  return t.values.at(0);
}

std::string slot_name(const std::string& prefix, std::size_t slot) { return prefix + std::to_string(slot); }

void add_layers(TensorMap& m, const std::string& prefix, const TaskLayers& layers) {
  add(m, prefix + ".conv.filters", layers.conv.filters);
  add(m, prefix + ".conv.bias", layers.conv.bias);
  add(m, prefix + ".head.weights", layers.head.weights);
  add(m, prefix + ".head.bias", layers.head.bias);
}

TaskLayers read_layers(const TensorMap& m, const std::string& prefix, const Hyperparams& hp, int filters) {
  TaskLayers l;
  l.conv.half_window = hp.half_window();
  l.conv.filters = matrix(m, prefix + ".conv.filters", static_cast<Eigen::Index>(hp.h) * hp.k, filters);
  l.conv.bias = vector(m, prefix + ".conv.bias", filters);
  l.head.weights = vector(m, prefix + ".head.weights", filters);
  l.head.bias = scalar(m, prefix + ".head.bias");
  return l;
}

Embedding read_embedding(const TensorMap& m, const std::string& name, const Hyperparams& hp, std::size_t vocab) {
  return Embedding{matrix(m, name, hp.k, static_cast<Eigen::Index>(vocab))};
}

}  // namespace

ModelKind ModelBundle::kind() const {
  switch (model.index()) {
    case 0:
      return ModelKind::Cascaded;
    case 1:
      return ModelKind::MultitaskSuite;
    default:
      return ModelKind::LinearCascade;
  }
}

const AspectSentimentModel& ModelBundle::classifier() const {
  return std::visit([](const auto& m) -> const AspectSentimentModel& { return m; }, model);
}

std::string save_model(const ModelBundle& bundle) {
  const AspectSchema& schema = bundle.classifier().schema();
  const std::size_t tasks = schema.size() + 1;
  TensorMap tensors;
  double threshold = 0.5;

  if (const auto* c = std::get_if<CascadedCnn>(&bundle.model)) {
    threshold = c->threshold;
    for (std::size_t s = 0; s < tasks; ++s) {
      add(tensors, slot_name("net.", s) + ".embedding", c->embeddings.at(s).weights);
      add_layers(tensors, slot_name("net.", s), c->tasks.at(s));
    }
  } else if (const auto* suite = std::get_if<MultitaskSuite>(&bundle.model)) {
    threshold = suite->members.at(0).threshold;
    for (std::size_t i = 0; i < suite->members.size(); ++i) {
      const auto& member = suite->members[i];
      add(tensors, slot_name("member.", i) + ".embedding", member.shared_embedding.weights);
      for (std::size_t s = 0; s < tasks; ++s)
        add_layers(tensors, slot_name("member.", i) + slot_name(".task.", s), member.tasks.at(s));
    }
  } else {
    const auto& lin = std::get<LinearCascade>(bundle.model);
    for (std::size_t s = 0; s < tasks; ++s) {
      add(tensors, slot_name("task.", s) + ".weights", lin.tasks.at(s).weights);
      add(tensors, slot_name("task.", s) + ".bias", lin.tasks.at(s).bias);
      add(tensors, slot_name("task.", s) + ".degenerate", lin.degenerate.at(s) ? 1.0 : 0.0);
    }
  }

  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kModelFormatVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(bundle.kind()));
  w.put_string(to_config(bundle.hp));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(schema.size()));
  for (const auto& n : schema.names()) w.put_string(n);
  w.put<double>(threshold);
  w.put<std::uint64_t>(bundle.vocabulary.content_hash());
  auto tokens = bundle.vocabulary.corpus_tokens();
  w.put<std::uint64_t>(tokens.size());
  for (const auto& t : tokens) w.put_string(t);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    w.put_string(name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.put<std::uint64_t>(d);
    for (double v : t.values) w.put<double>(v);
  }
  return w.take();
}

ModelBundle load_model(std::string_view bytes, const LoadExpectations& expect) {
  Reader r(bytes);
  if (r.raw(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic))
    throw Error(ErrorKind::Parse, "not a model file");
  auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion)
    throw Error(ErrorKind::Validation, "model format version " + std::to_string(version) + " is not supported (expected " +
                                           std::to_string(kModelFormatVersion) + ")");
  auto kind = static_cast<ModelKind>(r.get<std::uint8_t>());
  if (kind != ModelKind::Cascaded && kind != ModelKind::MultitaskSuite && kind != ModelKind::LinearCascade)
    throw Error(ErrorKind::Parse, "unknown model kind");

  ModelBundle b;
  b.hp = parse_config(r.get_string());
  std::vector<std::string> names(r.get<std::uint32_t>());
  for (auto& n : names) n = r.get_string();
  AspectSchema schema(std::move(names));
  if (expect.schema && !(*expect.schema == schema))
    throw Error(ErrorKind::Validation, "model schema has " + std::to_string(schema.size()) +
                                           " aspects and does not match the expected schema of " +
                                           std::to_string(expect.schema->size()));
  const double threshold = r.get<double>();
  const auto stored_hash = r.get<std::uint64_t>();
  const auto token_count = r.get<std::uint64_t>();
  if (token_count > bytes.size()) throw Error(ErrorKind::Parse, "model data is truncated");
  std::vector<std::string> tokens(token_count);
  for (auto& t : tokens) t = r.get_string();
  b.vocabulary = Vocabulary::from_tokens(std::move(tokens));
  if (b.vocabulary.content_hash() != stored_hash)
    throw Error(ErrorKind::Validation, "model vocabulary does not match its stored hash");
  if (expect.vocabulary_hash && *expect.vocabulary_hash != stored_hash)
    throw Error(ErrorKind::Validation, "model vocabulary does not match the expected vocabulary");

  TensorMap tensors;
  const auto tensor_count = r.get<std::uint32_t>();
  for (std::uint32_t n = 0; n < tensor_count; ++n) {
    std::string name = r.get_string();
    Tensor t;
    t.shape.resize(r.get<std::uint32_t>());
    if (t.shape.size() > 2) throw Error(ErrorKind::Parse, "tensor '" + name + "' has rank above 2");
    std::uint64_t count = 1;
    for (auto& d : t.shape) {
      d = r.get<std::uint64_t>();
      if (d != 0 && count > bytes.size() / d) throw Error(ErrorKind::Parse, "model data is truncated");
      count *= d;
    }
    if (count > bytes.size() / sizeof(double)) throw Error(ErrorKind::Parse, "model data is truncated");
    t.values.resize(count);
    for (auto& v : t.values) v = r.get<double>();
    tensors[std::move(name)] = std::move(t);
  }
  if (!r.done()) throw Error(ErrorKind::Parse, "trailing bytes after model data");

  const std::size_t c = schema.size();
  const std::size_t vocab = b.vocabulary.size();
  auto filters = [&](std::size_t slot) { return slot < c ? b.hp.m_aspect : b.hp.m_sentiment; };

  switch (kind) {
    case ModelKind::Cascaded: {
      CascadedCnn m;
      m.aspects = schema;
      m.threshold = threshold;
      for (std::size_t s = 0; s <= c; ++s) {
        m.embeddings.push_back(read_embedding(tensors, slot_name("net.", s) + ".embedding", b.hp, vocab));
        m.tasks.push_back(read_layers(tensors, slot_name("net.", s), b.hp, filters(s)));
      }
      b.model = std::move(m);
      break;
    }
    case ModelKind::MultitaskSuite: {
      MultitaskSuite suite;
      for (std::size_t i = 0; i <= c; ++i) {
        MultitaskCnn m;
        m.aspects = schema;
        m.threshold = threshold;
        m.shared_embedding = read_embedding(tensors, slot_name("member.", i) + ".embedding", b.hp, vocab);
        for (std::size_t s = 0; s <= c; ++s)
          m.tasks.push_back(read_layers(tensors, slot_name("member.", i) + slot_name(".task.", s), b.hp, filters(s)));
        suite.members.push_back(std::move(m));
      }
      b.model = std::move(suite);
      break;
    }
    case ModelKind::LinearCascade: {
      LinearCascade m;
      m.aspects = schema;
      for (std::size_t s = 0; s <= c; ++s) {
        LinearModel lin;
        lin.weights = vector(tensors, slot_name("task.", s) + ".weights", static_cast<Eigen::Index>(vocab));
        lin.bias = scalar(tensors, slot_name("task.", s) + ".bias");
        lin.reg_c = b.hp.svm_c;
        m.tasks.push_back(std::move(lin));
        m.degenerate.push_back(scalar(tensors, slot_name("task.", s) + ".degenerate") != 0.0);
      }
      b.model = std::move(m);
      break;
    }
  }
  return b;
}

void save_model_file(const std::filesystem::path& path, const ModelBundle& bundle) {
  const std::string bytes = save_model(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

ModelBundle load_model_file(const std::filesystem::path& path, const LoadExpectations& expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str(), expect);
}

}  // namespace aos

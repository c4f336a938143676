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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aos/baseline.hpp"
#include "aos/error.hpp"
#include "aos/eval.hpp"
#include "aos/gradcheck_suite.hpp"
#include "aos/hyperparams.hpp"
#include "aos/serialize.hpp"
#include "aos/summarize.hpp"
#include "aos/text.hpp"
#include "aos/train.hpp"

namespace {

using namespace aos;

/// Command-line overrides, applied after any config file.
struct HyperparamFlags {
  std::string config;
  std::optional<int> k, h, m_aspect, m_sentiment, batch, epochs, min_count, svm_epochs;
  std::optional<double> lr, momentum, init_std, lambda, threshold, svm_c;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value hyperparameter file")->check(CLI::ExistingFile);
    app->add_option("--k", k, "embedding dimension");
    app->add_option("--h", h, "convolution window (odd)");
    app->add_option("--m-aspect", m_aspect, "filters per aspect network");
    app->add_option("--m-sentiment", m_sentiment, "filters of the sentiment network");
    app->add_option("--batch", batch, "mini-batch size");
    app->add_option("--lr", lr, "learning rate");
    app->add_option("--momentum", momentum, "momentum coefficient");
    app->add_option("--init-std", init_std, "std of the Gaussian initializer");
    app->add_option("--epochs", epochs, "training epochs");
    app->add_option("--lambda", lambda, "auxiliary task weight");
    app->add_option("--threshold", threshold, "aspect decision threshold");
    app->add_option("--min-count", min_count, "minimum token frequency for the vocabulary");
    app->add_option("--svm-c", svm_c, "SVM regularization constant");
    app->add_option("--svm-epochs", svm_epochs, "SVM training epochs");
    app->add_option("--seed", seed, "random seed");
  }

  Hyperparams resolve() const {
    Hyperparams hp = config.empty() ? Hyperparams{} : load_config(config);
    if (k) hp.k = *k;
    if (h) hp.h = *h;
    if (m_aspect) hp.m_aspect = *m_aspect;
    if (m_sentiment) hp.m_sentiment = *m_sentiment;
    if (batch) hp.batch_size = *batch;
    if (lr) hp.learning_rate = *lr;
    if (momentum) hp.momentum = *momentum;
    if (init_std) hp.init_std = *init_std;
    if (epochs) hp.epochs = *epochs;
    if (lambda) hp.lambda = *lambda;
    if (threshold) hp.threshold = *threshold;
    if (min_count) hp.min_count = *min_count;
    if (svm_c) hp.svm_c = *svm_c;
    if (svm_epochs) hp.svm_epochs = *svm_epochs;
    if (seed) hp.seed = *seed;
    hp.validate();
    return hp;
  }
};

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path);
}

std::optional<AspectSchema> optional_schema(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_schema(path);
}

std::shared_ptr<const Embedding> pretrained_for(const std::string& path, const Corpus& corpus,
                                                const Hyperparams& hp) {
  if (path.empty()) return nullptr;
  Rng rng = make_rng(hp.seed, kEmbeddingFallbackStream);
  auto loaded = load_pretrained_embeddings(path, corpus.vocabulary, hp.k, hp.init_std, rng);
  std::cerr << "embeddings: " << loaded.coverage.covered << " of "
            << loaded.coverage.covered + loaded.coverage.uncovered << " vocabulary entries covered\n";
  return std::make_shared<const Embedding>(std::move(loaded.layer));
}

int run(int argc, char** argv) {
  CLI::App app{"Aspect mapping and sentiment classification with convolutional networks"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  // ingest
  std::string reviews_path, schema_path, out_path;
  auto* ingest = app.add_subcommand("ingest", "Segment and tokenize raw reviews into the corpus format");
  ingest->add_option("--reviews", reviews_path, "JSONL reviews (review_id, text)")->required();
  ingest->add_option("--schema", schema_path, "aspect names, one per line")->required();
  ingest->add_option("--out", out_path, "corpus output")->required();

  // train
  std::string corpus_path, arch_name = "mcnn", embeddings_path;
  HyperparamFlags train_flags;
  auto* train = app.add_subcommand("train", "Train a model on a labeled corpus");
  train->add_option("--corpus", corpus_path, "labeled corpus")->required();
  train->add_option("--arch", arch_name, "ccnn, mcnn or svm")->check(CLI::IsMember({"ccnn", "mcnn", "svm"}));
  train->add_option("--embeddings", embeddings_path, "pre-trained vectors (text format)");
  train->add_option("--schema", schema_path, "aspect names, when the corpus has no schema header");
  train->add_option("--out", out_path, "model output")->required();
  train_flags.attach(train);

  // eval
  int folds = 5;
  bool table = false;
  HyperparamFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Cross-validate an architecture on a labeled corpus");
  eval->add_option("--corpus", corpus_path, "labeled corpus")->required();
  eval->add_option("--arch", arch_name, "ccnn, mcnn or svm")->check(CLI::IsMember({"ccnn", "mcnn", "svm"}));
  eval->add_option("--folds", folds, "number of folds")->check(CLI::Range(2, 1000));
  eval->add_option("--embeddings", embeddings_path, "pre-trained vectors (text format)");
  eval->add_option("--schema", schema_path, "aspect names, when the corpus has no schema header");
  eval->add_option("--out", out_path, "write the JSON report here instead of stdout");
  eval->add_flag("--table", table, "print a percentage table to stderr");
  eval_flags.attach(eval);

  // gradcheck
  std::uint64_t gc_seed = 1;
  double eps = 1e-5, tol = 1e-4;
  std::size_t count = 100;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of backpropagation");
  gradcheck->add_option("--seed", gc_seed, "random seed");
  gradcheck->add_option("--eps", eps, "finite-difference step");
  gradcheck->add_option("--count", count, "random networks to check");
  gradcheck->add_option("--tol", tol, "largest accepted relative error");

  // summarize
  std::string model_path, json_path, html_path;
  unsigned threads = 1;
  auto* summarize = app.add_subcommand("summarize", "Summarize raw reviews with a trained model");
  summarize->add_option("--model", model_path, "trained model")->required();
  summarize->add_option("--reviews", reviews_path, "JSONL reviews (review_id, text)")->required();
  summarize->add_option("--out-json", json_path, "JSON summary output");
  summarize->add_option("--out-html", html_path, "HTML summary output");
  summarize->add_option("--threads", threads, "classification threads")->check(CLI::Range(1u, 256u));

  // stats
  auto* stats = app.add_subcommand("stats", "Sentence counts per aspect");
  stats->add_option("--corpus", corpus_path, "labeled corpus")->required();
  stats->add_option("--schema", schema_path, "aspect names, when the corpus has no schema header");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (ingest->parsed()) {
    AspectSchema schema = load_schema(schema_path);
    auto reviews = load_reviews(reviews_path);
    auto sentences = ingest_reviews(reviews, schema);
    write_corpus(out_path, schema, sentences);
    std::cerr << "ingested " << reviews.size() << " reviews into " << sentences.size() << " sentences\n";
    return 0;
  }

  if (train->parsed()) {
    Hyperparams hp = train_flags.resolve();
    Corpus corpus = load_corpus(corpus_path, optional_schema(schema_path), hp.min_count);
    hp.validate(corpus.schema.size() + 1);
    std::vector<std::size_t> all(corpus.sentences.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto pretrained = pretrained_for(embeddings_path, corpus, hp);
    ModelBundle bundle{hp, corpus.vocabulary, LinearCascade{}};
    switch (parse_architecture(arch_name)) {
      case Architecture::Cascaded:
        bundle.model = train_ccnn(corpus, all, hp, pretrained.get()).model;
        break;
      case Architecture::Multitask:
        bundle.model = train_mcnn(corpus, all, hp, pretrained.get()).suite;
        break;
      case Architecture::Svm:
        bundle.model = train_linear_cascade(corpus, all, hp);
        break;
    }
    save_model_file(out_path, bundle);
    return 0;
  }

  if (eval->parsed()) {
    Hyperparams hp = eval_flags.resolve();
    Corpus corpus = load_corpus(corpus_path, optional_schema(schema_path), hp.min_count);
    hp.validate(corpus.schema.size() + 1);
    const Architecture arch = parse_architecture(arch_name);
    auto report = cross_validate(make_trainer(arch, pretrained_for(embeddings_path, corpus, hp)), corpus, hp, folds,
                                 hp.seed, std::string(to_string(arch)));
    const std::string json = report_json(report);
    if (out_path.empty()) {
      std::cout << json;
    } else {
      write_text(out_path, json);
    }
    if (table) std::cerr << report_table(report);
    return 0;
  }

  if (gradcheck->parsed()) {
    auto result = run_gradcheck_suite(gc_seed, count, eps);
    std::printf("networks %zu  max relative error %.3e  (network %zu, %zu redrawn near kinks)\n", result.networks,
                result.max_relative_error, result.worst_network, result.resampled);
    if (!(result.max_relative_error < tol)) {
      std::fprintf(stderr, "gradient check failed: %.3e >= %.3e\n", result.max_relative_error, tol);
      return exit_code(ErrorKind::Numerical);
    }
    return 0;
  }

  if (summarize->parsed()) {
    if (json_path.empty() && html_path.empty())
      throw Error(ErrorKind::Usage, "summarize needs --out-json and/or --out-html");
    ModelBundle bundle = load_model_file(model_path);
    auto reviews = load_reviews(reviews_path);
    auto report = summarize_reviews(bundle.classifier(), bundle.vocabulary, reviews, threads);
    if (!json_path.empty()) write_text(json_path, emit_json(report));
    if (!html_path.empty()) write_text(html_path, emit_html(report));
    std::cerr << "processed " << report.processed << " sentences, " << report.mapped << " mapped to an aspect\n";
    return 0;
  }

  if (stats->parsed()) {
    Corpus corpus = load_corpus(corpus_path, optional_schema(schema_path));
    std::cout << format_stats(corpus_stats(corpus), corpus.schema);
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const aos::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return aos::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

// Copyright 2026 The stancekit Authors
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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stancekit/classify.hpp"
#include "stancekit/corpus.hpp"
#include "stancekit/features.hpp"
#include "stancekit/lexicon.hpp"

namespace stancekit {

// Positive class is pro_kremlin (+1).
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  void add(int truth, int predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted);

// F1 of the positive class; 0 when tp = 0. Throws MetricError on an empty matrix.
double f1_score(const ConfusionMatrix& cm);
// 0 when the expected agreement is 1. Throws MetricError on an empty matrix.
double cohens_kappa(const ConfusionMatrix& cm);
double accuracy(const ConfusionMatrix& cm);

// Features plus document metadata, row i describing docs[i].
struct Dataset {
  std::vector<Document> docs;
  FeatureTable features;
  std::vector<RowError> dropped;  // documents that failed annotation or extraction
};

// Annotates with the built-in tagger and extracts the full manifest
// (linguistic + keyword) for every document.
Dataset build_dataset(const std::vector<Document>& docs, const LexiconSet& lexicons,
                      unsigned jobs = 1);

enum class Protocol { kfold, holdout, transfer };
std::string_view to_string(Protocol p);

struct ExperimentConfig {
  std::string name;
  Protocol protocol = Protocol::kfold;
  int k = 5;
  double holdout_fraction = 0.1;
  double test_fraction = 1.0;  // transfer: stratified share of the test selection used
  bool stratify_language = true;
  std::uint64_t seed = 0;
  DocFilter train;
  DocFilter test;  // transfer only
  ModelKind model = ModelKind::svm_rbf;
  Hyperparameters hyperparameters = default_hyperparameters(ModelKind::svm_rbf);
  FeatureMode features = FeatureMode::linguistic_only;
  // Optional resource paths, resolved relative to the config file.
  std::optional<std::filesystem::path> corpus, sources, lexicons, embeddings;

  nlohmann::json to_json() const;
};

// Field-level ConfigError on any schema violation.
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct DocPrediction {
  std::string id;
  Language language = Language::en;
  Genre genre = Genre::newspaper;
  std::size_t fold = 0;
  int truth = 0;
  int predicted = 0;
  double score = 0.0;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  ConfusionMatrix cm;
  double f1 = 0.0;
  double kappa = 0.0;
  bool converged = true;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<FoldResult> folds;
  ConfusionMatrix aggregate;  // sum of fold matrices
  double f1 = 0.0;            // from the aggregate matrix
  double kappa = 0.0;
  double mean_f1 = 0.0;
  double mean_kappa = 0.0;
  std::size_t best_fold = 0;  // highest kappa, then F1, then lowest index
  std::vector<DocPrediction> predictions;  // fold by fold, corpus order within a fold
  std::string corpus_hash;
  std::string glossary_hash;

  nlohmann::json to_json() const;
};

// `embeddings` is required for embedding_linear and ignored otherwise.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& data,
                                const EmbeddingTable* embeddings = nullptr, unsigned jobs = 1);
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::vector<Document>& corpus,
                                const LexiconSet& lexicons,
                                const EmbeddingTable* embeddings = nullptr, unsigned jobs = 1);

struct LanguageRow {
  Language language = Language::en;
  ConfusionMatrix cm;
  double f1 = 0.0;
  double kappa = 0.0;
};

// One row per language present in the predictions, in enum order.
std::vector<LanguageRow> per_language_breakdown(const ExperimentReport& report);

// algorithm,kappa,F1,FP,FN,experiment,summary; two rows per report
// (best_fold and aggregate).
void write_summary_csv(std::ostream& out, const std::vector<ExperimentReport>& reports);
void write_predictions_csv(std::ostream& out, const ExperimentReport& report);
void write_breakdown_csv(std::ostream& out, const std::vector<LanguageRow>& rows);

}  // namespace stancekit

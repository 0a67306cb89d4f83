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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stancekit/features.hpp"
#include "stancekit/matrix.hpp"
#include "stancekit/optimize.hpp"

namespace stancekit {


enum class ModelKind { svm_rbf, logistic, tree, mlp, embedding_linear };
std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view s);

// Margin models threshold the score at 0, probabilistic ones at 0.5.
bool is_probabilistic(ModelKind k);

enum class Scaling { none, zscore, minmax };
std::string_view to_string(Scaling s);
std::optional<Scaling> parse_scaling(std::string_view s);

// Per-feature affine transform fitted on training rows only.
struct Scaler {
  Scaling kind = Scaling::none;
  std::vector<double> shift;
  std::vector<double> scale;

  static Scaler fit(const Matrix& x, Scaling kind);
  void apply(std::span<const double> in, std::span<double> out) const;
  Matrix apply(const Matrix& x) const;
};

struct Hyperparameters {
  Scaling scaling = Scaling::zscore;
  // svm_rbf
  std::string kernel = "rbf";  // rbf | linear
  double gamma = 100.0;
  double C = 46.0;
  double tolerance = 1e-3;
  std::size_t cache_mb = 256;
  // logistic, mlp
  double l2 = 1e-4;
  std::vector<std::size_t> hidden = {64, 64};
  double alpha = 1e-5;
  std::size_t max_iter = 500;
  // embedding_linear
  double learning_rate = 1e-4;
  std::size_t epochs = 4;
  std::size_t batch_size = 16;
  // tree
  std::size_t min_leaf = 2;
  std::size_t max_depth = 0;  // 0: unlimited
};

Hyperparameters default_hyperparameters(ModelKind kind);
// Only the fields relevant to `kind` are written.
nlohmann::json hyperparameters_to_json(ModelKind kind, const Hyperparameters& hp);
// Starts from the defaults for `kind`; unknown or irrelevant keys are a
// ConfigError naming the key.
Hyperparameters hyperparameters_from_json(ModelKind kind, const nlohmann::json& j);

struct TrainMeta {
  std::uint64_t seed = 0;
  std::string corpus_hash;
  std::string date;  // ISO date of training, informational
  std::size_t rows = 0;
  bool converged = true;
  std::size_t iterations = 0;
};

struct SvmParams {
  Matrix support;             // scaled support vectors
  std::vector<double> coef;   // alpha_i * y_i
  double bias = 0.0;
};

struct LinearParams {
  std::vector<double> weights;
  double bias = 0.0;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;  // fraction of positive training rows at the node
  std::size_t count = 0;
  double impurity = 0.0;
  double gain = 0.0;  // impurity decrease of the split (weighted), 0 for leaves
};

struct TreeParams {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t depth() const;
};

struct MlpParams {
  std::vector<std::size_t> layers;  // input, hidden..., 1
  std::vector<double> theta;        // per layer: W (out x in, row-major) then b
};

struct TrainedModel {
  ModelKind kind = ModelKind::svm_rbf;
  Hyperparameters hyperparameters;
  FeatureManifest manifest;
  Scaler scaler;
  TrainMeta meta;
  std::variant<SvmParams, LinearParams, TreeParams, MlpParams> params;
};

struct Prediction {
  std::vector<int> labels;  // +1 pro_kremlin, -1 pro_western
  std::vector<double> scores;
};

// Labels are +1/-1. Rows are validated for finiteness first.
TrainedModel train(ModelKind kind, const Matrix& x, const std::vector<int>& labels,
                   const FeatureManifest& manifest, const Hyperparameters& hp,
                   std::uint64_t seed = 0);

// Throws ContractError when `rows_manifest` differs from the model's.
Prediction predict(const TrainedModel& model, const Matrix& x,
                   const FeatureManifest& rows_manifest);
// Assumes rows follow the model's manifest; only the width is checked.
Prediction predict(const TrainedModel& model, const Matrix& x);
double decision_score(const TrainedModel& model, std::span<const double> row);
int label_for(const TrainedModel& model, double score);

// Per-feature weight * scaled value for linear models; empty otherwise.
std::vector<double> linear_contributions(const TrainedModel& model, std::span<const double> row);

inline constexpr std::string_view kModelFormat = "stancekit-model";
inline constexpr int kModelVersion = 1;

void save_model(std::ostream& out, const TrainedModel& model);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::filesystem::path& path);

// Warning text when the model was trained against a different glossary.
std::optional<std::string> glossary_mismatch(const TrainedModel& model,
                                             std::string_view current_hash);

// Training objectives, exposed for gradient checks.
ObjectiveFunction logistic_objective(const Matrix& x, const std::vector<int>& labels, double l2);
ObjectiveFunction mlp_objective(const Matrix& x, const std::vector<int>& labels,
                                const std::vector<std::size_t>& layers, double alpha);
std::size_t mlp_parameter_count(const std::vector<std::size_t>& layers);

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::map<std::string, std::vector<double>> vectors;

  // Rows in the order of `ids`; a missing id is a LookupError.
  Matrix rows(const std::vector<std::string>& ids) const;
};

inline constexpr std::string_view kEmbeddingFormat = "stancekit-embeddings";
inline constexpr int kEmbeddingVersion = 1;

// "# stancekit-embeddings 1 dim=<d>" then "id v1 ... vd" per line
// (whitespace separated).
EmbeddingTable read_embedding_table(std::istream& in);
EmbeddingTable read_embedding_table(const std::filesystem::path& path);
void write_embedding_table(std::ostream& out, const EmbeddingTable& table);

}  // namespace stancekit

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

#include "stancekit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "stancekit/error.hpp"
#include "stancekit/io.hpp"
#include "stancekit/rng.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

using nlohmann::json;

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::svm_rbf: return "svm_rbf";
    case ModelKind::logistic: return "logistic";
    case ModelKind::tree: return "tree";
    case ModelKind::mlp: return "mlp";
    case ModelKind::embedding_linear: return "embedding_linear";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::svm_rbf, ModelKind::logistic, ModelKind::tree, ModelKind::mlp,
                 ModelKind::embedding_linear})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

bool is_probabilistic(ModelKind k) { return k != ModelKind::svm_rbf; }

std::string_view to_string(Scaling s) {
  switch (s) {
    case Scaling::none: return "none";
    case Scaling::zscore: return "zscore";
    case Scaling::minmax: return "minmax";
  }
  return "?";
}

std::optional<Scaling> parse_scaling(std::string_view s) {
  for (auto k : {Scaling::none, Scaling::zscore, Scaling::minmax})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

// --- scaler ---

Scaler Scaler::fit(const Matrix& x, Scaling kind) {
  Scaler s;
  s.kind = kind;
  const std::size_t d = x.cols(), n = x.rows();
  s.shift.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (kind == Scaling::none || n == 0) return s;
  for (std::size_t j = 0; j < d; ++j) {
    if (kind == Scaling::zscore) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
      var /= static_cast<double>(n);
      s.shift[j] = mean;
      s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    } else {
      double lo = x(0, j), hi = x(0, j);
      for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, x(i, j));
        hi = std::max(hi, x(i, j));
      }
      s.shift[j] = lo;
      s.scale[j] = hi > lo ? hi - lo : 1.0;
    }
  }
  return s;
}

void Scaler::apply(std::span<const double> in, std::span<double> out) const {
  if (kind == Scaling::none || shift.empty()) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - shift[j]) / scale[j];
}

Matrix Scaler::apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) apply(x.row(i), out.row(i));
  return out;
}

// --- hyperparameters ---

Hyperparameters default_hyperparameters(ModelKind kind) {
  Hyperparameters hp;
  switch (kind) {
    // gamma=100 assumes the raw length-normalized scale; after z-scoring,
    // distances between rows are so large that the kernel is the identity.
    case ModelKind::svm_rbf: hp.scaling = Scaling::none; break;
    case ModelKind::logistic:
    case ModelKind::mlp:
    case ModelKind::embedding_linear: hp.scaling = Scaling::zscore; break;
    case ModelKind::tree: hp.scaling = Scaling::none; break;
  }
  return hp;
}

namespace {

std::vector<std::string_view> keys_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::svm_rbf: return {"scaling", "kernel", "gamma", "C", "tolerance", "cache_mb"};
    case ModelKind::logistic: return {"scaling", "l2", "max_iter"};
    case ModelKind::mlp: return {"scaling", "hidden", "alpha", "max_iter"};
    case ModelKind::embedding_linear:
      return {"scaling", "learning_rate", "epochs", "batch_size"};
    case ModelKind::tree: return {"scaling", "min_leaf", "max_depth"};
  }
  return {};
}

template <typename T>
T get_field(const json& j, std::string_view key) {
  try {
    return j.at(std::string(key)).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("hyperparameter '" + std::string(key) + "' has the wrong type");
  }
}

}  // namespace

json hyperparameters_to_json(ModelKind kind, const Hyperparameters& hp) {
  json j = json::object();
  for (auto key : keys_for(kind)) {
    if (key == "scaling") j["scaling"] = std::string(to_string(hp.scaling));
    else if (key == "kernel") j["kernel"] = hp.kernel;
    else if (key == "gamma") j["gamma"] = hp.gamma;
    else if (key == "C") j["C"] = hp.C;
    else if (key == "tolerance") j["tolerance"] = hp.tolerance;
    else if (key == "cache_mb") j["cache_mb"] = hp.cache_mb;
    else if (key == "l2") j["l2"] = hp.l2;
    else if (key == "hidden") j["hidden"] = hp.hidden;
    else if (key == "alpha") j["alpha"] = hp.alpha;
    else if (key == "max_iter") j["max_iter"] = hp.max_iter;
    else if (key == "learning_rate") j["learning_rate"] = hp.learning_rate;
    else if (key == "epochs") j["epochs"] = hp.epochs;
    else if (key == "batch_size") j["batch_size"] = hp.batch_size;
    else if (key == "min_leaf") j["min_leaf"] = hp.min_leaf;
    else if (key == "max_depth") j["max_depth"] = hp.max_depth;
  }
  return j;
}

Hyperparameters hyperparameters_from_json(ModelKind kind, const json& j) {
  Hyperparameters hp = default_hyperparameters(kind);
  if (j.is_null()) return hp;
  if (!j.is_object()) throw ConfigError("hyperparameters must be an object");
  const auto allowed = keys_for(kind);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("hyperparameter '" + key + "' does not apply to " +
                        std::string(to_string(kind)));
    if (key == "scaling") {
      auto s = parse_scaling(get_field<std::string>(j, key));
      if (!s) throw ConfigError("unknown scaling '" + value.dump() + "'");
      hp.scaling = *s;
    } else if (key == "kernel") {
      hp.kernel = get_field<std::string>(j, key);
      if (hp.kernel != "rbf" && hp.kernel != "linear")
        throw ConfigError("unknown kernel '" + hp.kernel + "'");
    } else if (key == "gamma") hp.gamma = get_field<double>(j, key);
    else if (key == "C") hp.C = get_field<double>(j, key);
    else if (key == "tolerance") hp.tolerance = get_field<double>(j, key);
    else if (key == "cache_mb") hp.cache_mb = get_field<std::size_t>(j, key);
    else if (key == "l2") hp.l2 = get_field<double>(j, key);
    else if (key == "hidden") hp.hidden = get_field<std::vector<std::size_t>>(j, key);
    else if (key == "alpha") hp.alpha = get_field<double>(j, key);
    else if (key == "max_iter") hp.max_iter = get_field<std::size_t>(j, key);
    else if (key == "learning_rate") hp.learning_rate = get_field<double>(j, key);
    else if (key == "epochs") hp.epochs = get_field<std::size_t>(j, key);
    else if (key == "batch_size") hp.batch_size = get_field<std::size_t>(j, key);
    else if (key == "min_leaf") hp.min_leaf = get_field<std::size_t>(j, key);
    else if (key == "max_depth") hp.max_depth = get_field<std::size_t>(j, key);
  }
  if (!(hp.C > 0.0)) throw ConfigError("C must be positive");
  if (!(hp.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (hp.batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (hp.min_leaf == 0) throw ConfigError("min_leaf must be at least 1");
  for (auto h : hp.hidden)
    if (h == 0) throw ConfigError("hidden layer widths must be positive");
  return hp;
}

// --- objectives ---

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -log p(t | z) for t in {0, 1}.
double log_loss(double z, double t) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - t * z;
}

double target(int label) { return label > 0 ? 1.0 : 0.0; }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct MlpShape {
  std::vector<std::size_t> layers;
  std::vector<std::size_t> w_off, b_off;
  std::size_t total = 0;

  explicit MlpShape(const std::vector<std::size_t>& l) : layers(l) {
    for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
      w_off.push_back(total);
      total += layers[k + 1] * layers[k];
      b_off.push_back(total);
      total += layers[k + 1];
    }
  }
  std::size_t depth() const { return layers.size() - 1; }
};

// Forward pass; acts[k] holds layer k activations (acts[0] = input).
double mlp_forward(const MlpShape& s, std::span<const double> theta, std::span<const double> x,
                   std::vector<std::vector<double>>& acts) {
  acts.resize(s.layers.size());
  acts[0].assign(x.begin(), x.end());
  double z_out = 0.0;
  for (std::size_t k = 0; k < s.depth(); ++k) {
    const std::size_t in = s.layers[k], out = s.layers[k + 1];
    acts[k + 1].resize(out);
    const double* w = theta.data() + s.w_off[k];
    const double* b = theta.data() + s.b_off[k];
    const bool last = k + 1 == s.depth();
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += wr[i] * acts[k][i];
      if (last) {
        acts[k + 1][o] = z;
        z_out = z;
      } else {
        acts[k + 1][o] = std::tanh(z);
      }
    }
  }
  return z_out;
}

}  // namespace

std::size_t mlp_parameter_count(const std::vector<std::size_t>& layers) {
  return MlpShape(layers).total;
}

ObjectiveFunction logistic_objective(const Matrix& x, const std::vector<int>& labels, double l2) {
  const std::size_t d = x.cols();
  ObjectiveFunction obj;
  obj.dimension = d + 1;
  obj.evaluate = [&x, &labels, l2, d](std::span<const double> p, std::span<double> g) {
    const std::size_t n = x.rows();
    std::fill(g.begin(), g.end(), 0.0);
    double loss = 0.0;
    const auto w = p.first(d);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      const double z = dot(w, row) + p[d];
      const double t = target(labels[i]);
      loss += log_loss(z, t);
      const double r = (sigmoid(z) - t) * inv_n;
      for (std::size_t j = 0; j < d; ++j) g[j] += r * row[j];
      g[d] += r;
    }
    loss *= inv_n;
    for (std::size_t j = 0; j < d; ++j) {
      loss += 0.5 * l2 * p[j] * p[j];
      g[j] += l2 * p[j];
    }
    return loss;
  };
  return obj;
}

ObjectiveFunction mlp_objective(const Matrix& x, const std::vector<int>& labels,
                                const std::vector<std::size_t>& layers, double alpha) {
  if (layers.size() < 2 || layers.front() != x.cols() || layers.back() != 1)
    throw ContractError("MLP layer sizes do not match the data");
  auto shape = std::make_shared<MlpShape>(layers);
  ObjectiveFunction obj;
  obj.dimension = shape->total;
  obj.evaluate = [&x, &labels, shape, alpha](std::span<const double> theta, std::span<double> g) {
    const MlpShape& s = *shape;
    const std::size_t n = x.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::fill(g.begin(), g.end(), 0.0);
    std::vector<std::vector<double>> acts;
    std::vector<double> delta, prev_delta;
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double z = mlp_forward(s, theta, x.row(r), acts);
      const double t = target(labels[r]);
      loss += log_loss(z, t);
      delta.assign(1, (sigmoid(z) - t) * inv_n);
      for (std::size_t k = s.depth(); k-- > 0;) {
        const std::size_t in = s.layers[k], out = s.layers[k + 1];
        const double* w = theta.data() + s.w_off[k];
        double* gw = g.data() + s.w_off[k];
        double* gb = g.data() + s.b_off[k];
        for (std::size_t o = 0; o < out; ++o) {
          gb[o] += delta[o];
          double* gwr = gw + o * in;
          for (std::size_t i = 0; i < in; ++i) gwr[i] += delta[o] * acts[k][i];
        }
        if (k == 0) break;
        prev_delta.assign(in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
          const double* wr = w + o * in;
          for (std::size_t i = 0; i < in; ++i) prev_delta[i] += wr[i] * delta[o];
        }
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] *= 1.0 - acts[k][i] * acts[k][i];
        delta.swap(prev_delta);
      }
    }
    loss *= inv_n;
    const double reg = alpha * inv_n;
    for (std::size_t k = 0; k < s.depth(); ++k) {
      const std::size_t cnt = s.layers[k + 1] * s.layers[k];
      for (std::size_t i = 0; i < cnt; ++i) {
        const double w = theta[s.w_off[k] + i];
        loss += 0.5 * reg * w * w;
        g[s.w_off[k] + i] += reg * w;
      }
    }
    return loss;
  };
  return obj;
}

// --- training ---

namespace {

void validate_training(const Matrix& x, const std::vector<int>& labels,
                       const FeatureManifest& manifest) {
  if (x.rows() != labels.size()) throw ContractError("row count does not match label count");
  if (x.rows() == 0) throw TrainingError("no training rows");
  if (manifest.size() != x.cols())
    throw ContractError("matrix has " + std::to_string(x.cols()) + " columns but the manifest lists " +
                        std::to_string(manifest.size()));
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (!std::isfinite(x(i, j)))
        throw ValidationError("non-finite value at row " + std::to_string(i) + ", column '" +
                              manifest.names[j] + "'");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1) pos = true;
    else if (y == -1) neg = true;
    else throw ContractError("labels must be +1 or -1");
  }
  if (!pos || !neg) throw TrainingError("training labels contain a single class");
}

double kernel_value(const Hyperparameters& hp, std::span<const double> a, std::span<const double> b) {
  if (hp.kernel == "linear") return dot(a, b);
  double d2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    d2 += t * t;
  }
  return std::exp(-hp.gamma * d2);
}

SvmParams train_svm(const Matrix& xs, const std::vector<int>& labels, const Hyperparameters& hp,
                    TrainMeta& meta) {
  SmoProblem prob;
  prob.size = xs.rows();
  prob.labels.assign(labels.begin(), labels.end());
  prob.C = hp.C;
  prob.tolerance = hp.tolerance;
  prob.cache_bytes = hp.cache_mb << 20;
  prob.kernel = [&](std::size_t i, std::size_t j) { return kernel_value(hp, xs.row(i), xs.row(j)); };
  const SmoResult res = smo_solve(prob);
  meta.converged = res.converged;
  meta.iterations = res.iterations;
  SvmParams p;
  p.bias = res.bias;
  for (std::size_t i = 0; i < xs.rows(); ++i) {
    if (res.alpha[i] <= 0.0) continue;
    p.support.append_row(xs.row(i));
    p.coef.push_back(res.alpha[i] * labels[i]);
  }
  if (p.support.empty()) p.support = Matrix(0, xs.cols());
  return p;
}

LinearParams train_logistic(const Matrix& xs, const std::vector<int>& labels,
                            const Hyperparameters& hp, TrainMeta& meta) {
  const auto obj = logistic_objective(xs, labels, hp.l2);
  LbfgsOptions opt;
  opt.max_iterations = hp.max_iter;
  const auto res = lbfgs_minimize(obj, std::vector<double>(obj.dimension, 0.0), opt);
  meta.converged = res.converged;
  meta.iterations = res.iterations;
  LinearParams p;
  p.weights.assign(res.x.begin(), res.x.end() - 1);
  p.bias = res.x.back();
  return p;
}

MlpParams train_mlp(const Matrix& xs, const std::vector<int>& labels, const Hyperparameters& hp,
                    std::uint64_t seed, TrainMeta& meta) {
  MlpParams p;
  p.layers.push_back(xs.cols());
  for (auto h : hp.hidden) p.layers.push_back(h);
  p.layers.push_back(1);
  const MlpShape shape(p.layers);
  std::vector<double> theta(shape.total, 0.0);
  Rng rng(seed);
  for (std::size_t k = 0; k < shape.depth(); ++k) {
    const double bound = std::sqrt(6.0 / static_cast<double>(shape.layers[k] + shape.layers[k + 1]));
    const std::size_t cnt = shape.layers[k] * shape.layers[k + 1];
    for (std::size_t i = 0; i < cnt; ++i) theta[shape.w_off[k] + i] = rng.uniform(-bound, bound);
    for (std::size_t i = 0; i < shape.layers[k + 1]; ++i)
      theta[shape.b_off[k] + i] = rng.uniform(-bound, bound);
  }
  const auto obj = mlp_objective(xs, labels, p.layers, hp.alpha);
  LbfgsOptions opt;
  opt.max_iterations = hp.max_iter;
  const auto res = lbfgs_minimize(obj, std::move(theta), opt);
  meta.converged = res.converged;
  meta.iterations = res.iterations;
  p.theta = res.x;
  return p;
}

LinearParams train_embedding_linear(const Matrix& xs, const std::vector<int>& labels,
                                    const Hyperparameters& hp, std::uint64_t seed,
                                    TrainMeta& meta) {
  const std::size_t d = xs.cols();
  PerExampleObjective obj;
  obj.dimension = d + 1;
  obj.examples = xs.rows();
  obj.evaluate = [&](std::span<const double> p, std::size_t i, std::span<double> g) {
    const auto row = xs.row(i);
    const double z = dot(p.first(d), row) + p[d];
    const double t = target(labels[i]);
    const double r = sigmoid(z) - t;
    for (std::size_t j = 0; j < d; ++j) g[j] += r * row[j];
    g[d] += r;
    return log_loss(z, t);
  };
  MinibatchOptions opt;
  opt.learning_rate = hp.learning_rate;
  opt.epochs = hp.epochs;
  opt.batch_size = hp.batch_size;
  opt.seed = seed;
  const auto res = minibatch_gd(obj, std::vector<double>(d + 1, 0.0), opt);
  meta.iterations = hp.epochs;
  LinearParams p;
  p.weights.assign(res.params.begin(), res.params.end() - 1);
  p.bias = res.params.back();
  return p;
}

double gini(double pos, double n) {
  if (n <= 0) return 0.0;
  const double p = pos / n;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

TreeParams train_tree(const Matrix& x, const std::vector<int>& labels, const Hyperparameters& hp) {
  TreeParams tree;
  struct Task {
    std::vector<std::size_t> idx;
    std::size_t depth;
    int node;
  };
  std::vector<Task> stack;
  tree.nodes.emplace_back();
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  stack.push_back({std::move(all), 0, 0});
  const std::size_t min_leaf = std::max<std::size_t>(1, hp.min_leaf);

  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    const auto& idx = task.idx;
    const double n = static_cast<double>(idx.size());
    double pos = 0.0;
    for (auto i : idx) pos += labels[i] > 0 ? 1.0 : 0.0;
    {
      TreeNode& node = tree.nodes[task.node];
      node.count = idx.size();
      node.value = pos / n;
      node.impurity = gini(pos, n);
    }
    const double impurity = tree.nodes[task.node].impurity;
    if (impurity == 0.0 || idx.size() < 2 * min_leaf ||
        (hp.max_depth > 0 && task.depth >= hp.max_depth))
      continue;

    int best_f = -1;
    double best_gain = -1e-12, best_thr = 0.0;
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < x.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
      double left_pos = 0.0;
      for (std::size_t k = 1; k < order.size(); ++k) {
        left_pos += labels[order[k - 1]] > 0 ? 1.0 : 0.0;
        const double lo = x(order[k - 1], f), hi = x(order[k], f);
        if (!(lo < hi)) continue;
        if (k < min_leaf || order.size() - k < min_leaf) continue;
        const double nl = static_cast<double>(k), nr = n - nl;
        const double gain =
            impurity - (nl / n) * gini(left_pos, nl) - (nr / n) * gini(pos - left_pos, nr);
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best_thr = mid;
        }
      }
    }
    if (best_f < 0) continue;

    std::vector<std::size_t> left, right;
    for (auto i : idx) (x(i, best_f) <= best_thr ? left : right).push_back(i);
    const int l = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[task.node];
    node.feature = best_f;
    node.threshold = best_thr;
    node.gain = std::max(0.0, best_gain);
    node.left = l;
    node.right = l + 1;
    // Right child first so the left subtree is expanded first.
    stack.push_back({std::move(right), task.depth + 1, l + 1});
    stack.push_back({std::move(left), task.depth + 1, l});
  }
  return tree;
}

}  // namespace

std::size_t TreeParams::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes[i].feature >= 0) {
      stack.push_back({nodes[i].left, d + 1});
      stack.push_back({nodes[i].right, d + 1});
    }
  }
  return best;
}

TrainedModel train(ModelKind kind, const Matrix& x, const std::vector<int>& labels,
                   const FeatureManifest& manifest, const Hyperparameters& hp,
                   std::uint64_t seed) {
  validate_training(x, labels, manifest);
  TrainedModel m;
  m.kind = kind;
  m.hyperparameters = hp;
  m.manifest = manifest;
  m.meta.seed = seed;
  m.meta.rows = x.rows();
  m.scaler = Scaler::fit(x, hp.scaling);
  const Matrix xs = m.scaler.apply(x);
  switch (kind) {
    case ModelKind::svm_rbf: m.params = train_svm(xs, labels, hp, m.meta); break;
    case ModelKind::logistic: m.params = train_logistic(xs, labels, hp, m.meta); break;
    case ModelKind::tree: m.params = train_tree(xs, labels, hp); break;
    case ModelKind::mlp: m.params = train_mlp(xs, labels, hp, seed, m.meta); break;
    case ModelKind::embedding_linear:
      m.params = train_embedding_linear(xs, labels, hp, seed, m.meta);
      break;
  }
  return m;
}

// --- prediction ---

double decision_score(const TrainedModel& m, std::span<const double> row) {
  std::vector<double> xs(row.size());
  m.scaler.apply(row, xs);
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SvmParams>) {
          double s = p.bias;
          for (std::size_t k = 0; k < p.coef.size(); ++k)
            s += p.coef[k] * kernel_value(m.hyperparameters, p.support.row(k), xs);
          return s;
        } else if constexpr (std::is_same_v<P, LinearParams>) {
          return sigmoid(dot(p.weights, xs) + p.bias);
        } else if constexpr (std::is_same_v<P, TreeParams>) {
          int i = 0;
          while (p.nodes[i].feature >= 0)
            i = xs[p.nodes[i].feature] <= p.nodes[i].threshold ? p.nodes[i].left : p.nodes[i].right;
          return p.nodes[i].value;
        } else {
          const MlpShape shape(p.layers);
          std::vector<std::vector<double>> acts;
          return sigmoid(mlp_forward(shape, p.theta, xs, acts));
        }
      },
      m.params);
}

int label_for(const TrainedModel& m, double score) {
  const double threshold = is_probabilistic(m.kind) ? 0.5 : 0.0;
  return score > threshold ? +1 : -1;
}

Prediction predict(const TrainedModel& m, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != m.manifest.size())
    throw ContractError("rows have " + std::to_string(x.cols()) + " columns, model expects " +
                        std::to_string(m.manifest.size()));
  Prediction out;
  out.labels.reserve(x.rows());
  out.scores.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double s = decision_score(m, x.row(i));
    out.scores.push_back(s);
    out.labels.push_back(label_for(m, s));
  }
  return out;
}

Prediction predict(const TrainedModel& m, const Matrix& x, const FeatureManifest& rows_manifest) {
  if (rows_manifest.names != m.manifest.names) {
    std::string msg = "feature manifest mismatch: model expects " +
                      std::to_string(m.manifest.size()) + " features, rows carry " +
                      std::to_string(rows_manifest.size());
    const std::size_t common = std::min(m.manifest.size(), rows_manifest.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (m.manifest.names[i] != rows_manifest.names[i]) {
        msg += "; first difference at position " + std::to_string(i) + ": expected '" +
               m.manifest.names[i] + "', received '" + rows_manifest.names[i] + "'";
        break;
      }
    }
    std::vector<std::string> missing, extra;
    for (const auto& n : m.manifest.names)
      if (!rows_manifest.index_of(n)) missing.push_back(n);
    for (const auto& n : rows_manifest.names)
      if (!m.manifest.index_of(n)) extra.push_back(n);
    if (!missing.empty()) msg += "; missing: " + text::join(missing, ", ");
    if (!extra.empty()) msg += "; unexpected: " + text::join(extra, ", ");
    throw ContractError(msg);
  }
  return predict(m, x);
}

std::vector<double> linear_contributions(const TrainedModel& m, std::span<const double> row) {
  const auto* p = std::get_if<LinearParams>(&m.params);
  if (!p) return {};
  std::vector<double> xs(row.size());
  m.scaler.apply(row, xs);
  for (std::size_t j = 0; j < xs.size(); ++j) xs[j] *= p->weights[j];
  return xs;
}

std::optional<std::string> glossary_mismatch(const TrainedModel& m, std::string_view current) {
  if (m.manifest.glossary_hash.empty() || current.empty() || m.manifest.glossary_hash == current)
    return std::nullopt;
  return "model was trained with glossary " + m.manifest.glossary_hash +
         " but the current glossary is " + std::string(current);
}

// --- persistence ---

namespace {

json matrix_json(const Matrix& x) {
  return json{{"rows", x.rows()}, {"cols", x.cols()}, {"data", x.data()}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw ParseError("matrix data has the wrong length");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = data[i * cols + k];
  return m;
}

json params_json(const TrainedModel& m) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SvmParams>) {
          return {{"support", matrix_json(p.support)}, {"coef", p.coef}, {"bias", p.bias}};
        } else if constexpr (std::is_same_v<P, LinearParams>) {
          return {{"weights", p.weights}, {"bias", p.bias}};
        } else if constexpr (std::is_same_v<P, TreeParams>) {
          json nodes = json::array();
          for (const auto& n : p.nodes)
            nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                             {"right", n.right}, {"value", n.value}, {"count", n.count},
                             {"impurity", n.impurity}, {"gain", n.gain}});
          return {{"nodes", nodes}};
        } else {
          return {{"layers", p.layers}, {"theta", p.theta}};
        }
      },
      m.params);
}

void check_shapes(const TrainedModel& m) {
  const std::size_t d = m.manifest.size();
  if (m.scaler.kind != Scaling::none && (m.scaler.shift.size() != d || m.scaler.scale.size() != d))
    throw ParseError("scaler does not match the manifest width");
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SvmParams>) {
          if (p.support.rows() != p.coef.size() || (p.support.rows() > 0 && p.support.cols() != d))
            throw ParseError("support vectors do not match the manifest");
        } else if constexpr (std::is_same_v<P, LinearParams>) {
          if (p.weights.size() != d) throw ParseError("weight vector does not match the manifest");
        } else if constexpr (std::is_same_v<P, TreeParams>) {
          if (p.nodes.empty()) throw ParseError("tree has no nodes");
          const int n = static_cast<int>(p.nodes.size());
          for (const auto& node : p.nodes)
            if (node.feature >= 0 &&
                (node.feature >= static_cast<int>(d) || node.left <= 0 || node.left >= n ||
                 node.right <= 0 || node.right >= n))
              throw ParseError("tree node references are out of range");
        } else {
          if (p.layers.size() < 2 || p.layers.front() != d || p.layers.back() != 1 ||
              p.theta.size() != mlp_parameter_count(p.layers))
            throw ParseError("network shape does not match the manifest");
        }
      },
      m.params);
}

}  // namespace

void save_model(std::ostream& out, const TrainedModel& m) {
  json manifest = {{"names", m.manifest.names}, {"glossary_hash", m.manifest.glossary_hash}};
  json scaler = {{"kind", std::string(to_string(m.scaler.kind))},
                 {"shift", m.scaler.shift},
                 {"scale", m.scaler.scale}};
  json meta = {{"seed", m.meta.seed},         {"corpus_hash", m.meta.corpus_hash},
               {"date", m.meta.date},         {"rows", m.meta.rows},
               {"converged", m.meta.converged}, {"iterations", m.meta.iterations}};
  json j = {{"format", kModelFormat},
            {"version", kModelVersion},
            {"kind", std::string(to_string(m.kind))},
            {"hyperparameters", hyperparameters_to_json(m.kind, m.hyperparameters)},
            {"manifest", manifest},
            {"scaler", scaler},
            {"params", params_json(m)},
            {"train_meta", meta}};
  out << j.dump(1) << '\n';
}

void save_model(const std::filesystem::path& path, const TrainedModel& m) {
  io::AtomicWriter w(path);
  save_model(w.stream(), m);
  w.commit();
}

TrainedModel load_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != kModelFormat)
      throw ParseError("not a stancekit model file");
    const int version = j.at("version").get<int>();
    if (version != kModelVersion)
      throw VersionError("model file version " + std::to_string(version) + ", expected " +
                         std::to_string(kModelVersion));
    TrainedModel m;
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown model kind");
    m.kind = *kind;
    try {
      m.hyperparameters = hyperparameters_from_json(m.kind, j.at("hyperparameters"));
    } catch (const ConfigError& e) {
      throw ParseError(e.what());
    }
    m.manifest.names = j.at("manifest").at("names").get<std::vector<std::string>>();
    m.manifest.glossary_hash = j.at("manifest").at("glossary_hash").get<std::string>();
    const auto sk = parse_scaling(j.at("scaler").at("kind").get<std::string>());
    if (!sk) throw ParseError("unknown scaler kind");
    m.scaler.kind = *sk;
    m.scaler.shift = j.at("scaler").at("shift").get<std::vector<double>>();
    m.scaler.scale = j.at("scaler").at("scale").get<std::vector<double>>();
    const json& p = j.at("params");
    switch (m.kind) {
      case ModelKind::svm_rbf: {
        SvmParams s;
        s.support = matrix_from(p.at("support"));
        s.coef = p.at("coef").get<std::vector<double>>();
        s.bias = p.at("bias").get<double>();
        m.params = std::move(s);
        break;
      }
      case ModelKind::logistic:
      case ModelKind::embedding_linear: {
        LinearParams l;
        l.weights = p.at("weights").get<std::vector<double>>();
        l.bias = p.at("bias").get<double>();
        m.params = std::move(l);
        break;
      }
      case ModelKind::tree: {
        TreeParams t;
        for (const auto& n : p.at("nodes")) {
          TreeNode node;
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
          node.value = n.at("value").get<double>();
          node.count = n.at("count").get<std::size_t>();
          node.impurity = n.at("impurity").get<double>();
          node.gain = n.at("gain").get<double>();
          t.nodes.push_back(node);
        }
        m.params = std::move(t);
        break;
      }
      case ModelKind::mlp: {
        MlpParams mp;
        mp.layers = p.at("layers").get<std::vector<std::size_t>>();
        mp.theta = p.at("theta").get<std::vector<double>>();
        m.params = std::move(mp);
        break;
      }
    }
    const json& meta = j.at("train_meta");
    m.meta.seed = meta.at("seed").get<std::uint64_t>();
    m.meta.corpus_hash = meta.at("corpus_hash").get<std::string>();
    m.meta.date = meta.at("date").get<std::string>();
    m.meta.rows = meta.at("rows").get<std::size_t>();
    m.meta.converged = meta.at("converged").get<bool>();
    m.meta.iterations = meta.at("iterations").get<std::size_t>();
    check_shapes(m);
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path.string());
  return load_model(in);
}

// --- embeddings ---

Matrix EmbeddingTable::rows(const std::vector<std::string>& ids) const {
  Matrix out(ids.size(), dimension);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = vectors.find(ids[i]);
    if (it == vectors.end()) throw LookupError("no embedding for document '" + ids[i] + "'");
    std::copy(it->second.begin(), it->second.end(), out.row(i).begin());
  }
  return out;
}

EmbeddingTable read_embedding_table(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("empty embedding file", 1);
  const auto head = text::split_ws(line);
  if (head.size() != 4 || head[0] != "#" || head[1] != kEmbeddingFormat ||
      head[3].rfind("dim=", 0) != 0)
    throw ParseError("expected header '# stancekit-embeddings 1 dim=<d>'", 1);
  if (head[2] != std::to_string(kEmbeddingVersion))
    throw VersionError("embedding file version " + head[2] + ", expected " +
                           std::to_string(kEmbeddingVersion),
                       1);
  EmbeddingTable t;
  try {
    t.dimension = std::stoul(head[3].substr(4));
  } catch (const std::exception&) {
    throw ParseError("bad dimension in header", 1);
  }
  if (t.dimension == 0) throw ParseError("dimension must be positive", 1);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto fields = text::split_ws(line);
    if (fields.size() != t.dimension + 1)
      throw ParseError("expected id and " + std::to_string(t.dimension) + " values, found " +
                           std::to_string(fields.size()) + " fields",
                       lineno);
    std::vector<double> v(t.dimension);
    for (std::size_t k = 0; k < t.dimension; ++k) {
      try {
        v[k] = io::parse_double(fields[k + 1]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), lineno);
      }
      if (!std::isfinite(v[k])) throw ValidationError("non-finite embedding value for '" + fields[0] + "'");
    }
    if (!t.vectors.emplace(fields[0], std::move(v)).second)
      throw ParseError("duplicate embedding id '" + fields[0] + "'", lineno);
  }
  return t;
}

EmbeddingTable read_embedding_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open embedding file " + path.string());
  return read_embedding_table(in);
}

void write_embedding_table(std::ostream& out, const EmbeddingTable& t) {
  out << "# " << kEmbeddingFormat << ' ' << kEmbeddingVersion << " dim=" << t.dimension << '\n';
  for (const auto& [id, v] : t.vectors) {
    out << id;
    for (double x : v) out << ' ' << io::format_double(x);
    out << '\n';
  }
}

}  // namespace stancekit

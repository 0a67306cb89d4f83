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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <list>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace stancekit {

// Smooth objective: evaluate() returns the loss and writes the gradient.
struct ObjectiveFunction {
  std::size_t dimension = 0;
  std::function<double(std::span<const double> x, std::span<double> grad)> evaluate;
};

struct LbfgsOptions {
  std::size_t memory = 10;
  double tolerance = 1e-5;  // on the infinity norm of the gradient
  std::size_t max_iterations = 1000;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
  std::size_t max_linesearch = 50;
  std::ostream* trace = nullptr;  // CSV: iter,loss,grad_norm
};

struct LbfgsResult {
  std::vector<double> x;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> loss_history;  // loss after each accepted step, starting at x0
};

// Limited-memory BFGS with a strong-Wolfe line search (bracketing + cubic
// zoom). Throws OptimizerError when the objective returns a non-finite value.
LbfgsResult lbfgs_minimize(const ObjectiveFunction& objective, std::vector<double> x0,
                           const LbfgsOptions& options = {});

// Row cache for a kernel matrix with a byte budget; least recently used rows
// are evicted first. Not thread-safe.
class KernelCache {
 public:
  using RowFn = std::function<void(std::size_t row, std::span<double> out)>;

  KernelCache(std::size_t n, std::size_t budget_bytes, RowFn compute);

  std::span<const double> row(std::size_t i);
  std::size_t cached_rows() const { return lru_.size(); }
  std::size_t capacity_rows() const { return capacity_; }
  std::size_t misses() const { return misses_; }

 private:
  std::size_t n_;
  std::size_t capacity_;
  RowFn compute_;
  std::list<std::size_t> lru_;  // front = most recent
  std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>>
      rows_;
  std::size_t misses_ = 0;
};

struct SmoProblem {
  std::size_t size = 0;
  std::function<double(std::size_t, std::size_t)> kernel;
  std::vector<double> labels;  // each -1 or +1
  double C = 1.0;
  double tolerance = 1e-3;
  std::size_t max_iterations = 0;  // 0: max(10^7, 100 n)
  std::size_t cache_bytes = std::size_t{64} << 20;
};

struct SmoResult {
  std::vector<double> alpha;
  double bias = 0.0;  // decision(x) = sum_i alpha_i y_i K(x_i, x) + bias
  bool converged = false;
  std::size_t iterations = 0;
  double kkt_gap = 0.0;  // maximal violating pair gap at exit
};

// Called after every pair update with the current dual coefficients.
using SmoObserver = std::function<void(std::span<const double> alpha)>;

// Sequential minimal optimization on the soft-margin SVM dual. Each step
// picks the maximal KKT violator and pairs it with the point that maximizes
// the error difference among those that can move the opposite way; stops
// once that gap is below the tolerance.
SmoResult smo_solve(const SmoProblem& problem, const SmoObserver& observer = {});

struct PerExampleObjective {
  std::size_t dimension = 0;
  std::size_t examples = 0;
  // Returns example i's loss and adds its gradient into `grad`.
  std::function<double(std::span<const double> params, std::size_t i, std::span<double> grad)>
      evaluate;
};

struct MinibatchOptions {
  double learning_rate = 1e-4;
  std::size_t epochs = 4;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

struct MinibatchResult {
  std::vector<double> params;
  std::vector<double> epoch_loss;  // mean loss over all examples after each epoch
};

// Plain minibatch gradient descent with a seeded shuffle per epoch.
MinibatchResult minibatch_gd(const PerExampleObjective& objective, std::vector<double> init,
                             const MinibatchOptions& options);

struct GridPoint {
  std::map<std::string, double> values;
  double score = 0.0;
};

struct GridSearchResult {
  GridPoint best;
  std::vector<GridPoint> evaluated;  // in enumeration order
};

// Exhaustive search maximizing `score`; ties keep the first point in
// lexicographic enumeration order of the parameter names.
GridSearchResult grid_search(const std::map<std::string, std::vector<double>>& grid,
                             const std::function<double(const std::map<std::string, double>&)>& score);

}  // namespace stancekit

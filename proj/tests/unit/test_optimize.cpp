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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "stancekit/error.hpp"
#include "stancekit/optimize.hpp"

using namespace stancekit;

namespace {

ObjectiveFunction shifted_quadratic(std::vector<double> c, std::vector<double> weights) {
  ObjectiveFunction f;
  f.dimension = c.size();
  f.evaluate = [c, weights](std::span<const double> x, std::span<double> g) {
    double s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      s += weights[i] * (x[i] - c[i]) * (x[i] - c[i]);
      g[i] = 2 * weights[i] * (x[i] - c[i]);
    }
    return s;
  };
  return f;
}

ObjectiveFunction rosenbrock2() {
  ObjectiveFunction f;
  f.dimension = 2;
  f.evaluate = [](std::span<const double> x, std::span<double> g) {
    const std::vector<double> v(x.begin(), x.end());
    const auto grad = oracle::rosenbrock_grad(v);
    std::copy(grad.begin(), grad.end(), g.begin());
    return oracle::rosenbrock(v);
  };
  return f;
}

std::vector<std::vector<double>> dense_kernel(const SmoProblem& p) {
  std::vector<std::vector<double>> k(p.size, std::vector<double>(p.size));
  for (std::size_t i = 0; i < p.size; ++i)
    for (std::size_t j = 0; j < p.size; ++j) k[i][j] = p.kernel(i, j);
  return k;
}

TEST(Lbfgs, QuadraticReachesCenter) {
  const std::vector<double> c = {3, -1, 0.5, 7, -2};
  for (std::size_t memory : {1u, 3u, 10u}) {
    LbfgsOptions opt;
    opt.memory = memory;
    opt.tolerance = 1e-8;
    const auto r = lbfgs_minimize(shifted_quadratic(c, {1, 2, 4, 8, 16}), {0, 0, 0, 0, 0}, opt);
    EXPECT_TRUE(r.converged);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(r.x[i], c[i], 1e-7);
  }
  // Isotropic quadratic: the first scaled step is exact.
  const auto iso = lbfgs_minimize(shifted_quadratic(c, {1, 1, 1, 1, 1}), {9, 9, 9, 9, 9});
  EXPECT_LE(iso.iterations, c.size() + 2);
}

TEST(Lbfgs, RosenbrockFromStandardStart) {
  LbfgsOptions opt;
  opt.tolerance = 1e-8;
  const auto r = lbfgs_minimize(rosenbrock2(), {-1.2, 1.0}, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
  for (std::size_t i = 1; i < r.loss_history.size(); ++i)
    EXPECT_LE(r.loss_history[i], r.loss_history[i - 1]);
}

TEST(Lbfgs, StartAtMinimizer) {
  const auto r = lbfgs_minimize(shifted_quadratic({1, 2}, {1, 1}), {1, 2});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 1u);
}

TEST(Lbfgs, NonFiniteLossThrows) {
  ObjectiveFunction f;
  f.dimension = 1;
  f.evaluate = [](std::span<const double> x, std::span<double> g) {
    g[0] = -1;
    return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : -x[0];
  };
  EXPECT_THROW(lbfgs_minimize(f, {0.0}), OptimizerError);
}

TEST(KernelCache, EvictsLeastRecentlyUsed) {
  std::size_t computed = 0;
  KernelCache cache(10, 3 * 10 * sizeof(double), [&](std::size_t r, std::span<double> out) {
    ++computed;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<double>(r * 100 + j);
  });
  EXPECT_EQ(cache.capacity_rows(), 3u);
  cache.row(0);
  cache.row(1);
  cache.row(2);
  EXPECT_EQ(cache.row(0)[4], 4.0);  // hit, now most recent
  cache.row(3);                     // evicts 1
  EXPECT_EQ(cache.misses(), 4u);
  cache.row(0);
  cache.row(2);
  EXPECT_EQ(cache.misses(), 4u);
  EXPECT_EQ(cache.row(1)[7], 107.0);
  EXPECT_EQ(cache.misses(), 5u);
  EXPECT_EQ(cache.cached_rows(), 3u);
  EXPECT_EQ(computed, 5u);
}

TEST(Smo, TwoPointLinearKernelAnalytic) {
  const std::vector<double> x = {-1, 1};
  SmoProblem p;
  p.size = 2;
  p.kernel = [&](std::size_t i, std::size_t j) { return x[i] * x[j]; };
  p.labels = {-1, 1};
  p.C = 1e3;
  p.tolerance = 1e-9;
  const auto r = smo_solve(p);
  const auto t = oracle::two_point_svm(1, 1, -1, p.C);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.alpha[0], t.alpha, 1e-9);
  EXPECT_NEAR(r.alpha[1], t.alpha, 1e-9);
  EXPECT_NEAR(r.bias, 0.0, 1e-9);
  // Both points sit on the margin.
  for (std::size_t i = 0; i < 2; ++i) {
    double f = r.bias;
    for (std::size_t j = 0; j < 2; ++j) f += r.alpha[j] * p.labels[j] * p.kernel(j, i);
    EXPECT_NEAR(p.labels[i] * f, 1.0, 1e-9);
  }
}

TEST(Smo, ContradictoryDuplicatesHitBox) {
  SmoProblem p;
  p.size = 2;
  p.kernel = [](std::size_t, std::size_t) { return 0.25; };
  p.labels = {1, -1};
  p.C = 1;
  const auto r = smo_solve(p);
  // Brute force over the feasible line alpha_1 = alpha_2 = a.
  const auto k = dense_kernel(p);
  double best_a = 0, best = -1e300;
  for (int s = 0; s <= 1000; ++s) {
    const double a = s / 1000.0;
    const double v = oracle::svm_dual(k, p.labels, {a, a});
    if (v > best) best = v, best_a = a;
  }
  EXPECT_EQ(best_a, 1.0);
  EXPECT_NEAR(r.alpha[0], best_a, 1e-12);
  EXPECT_NEAR(r.alpha[1], best_a, 1e-12);
}

TEST(Smo, SeparableBlobsFeasibleEveryStepAndKkt) {
  std::mt19937 rng(4);
  std::normal_distribution<double> noise(0, 0.4);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 60; ++i) {
    const double s = i % 2 ? 1.5 : -1.5;
    x.push_back({s + noise(rng), s + noise(rng)});
    y.push_back(i % 2 ? 1 : -1);
  }
  SmoProblem p;
  p.size = x.size();
  p.kernel = [&](std::size_t i, std::size_t j) { return oracle::rbf(x[i], x[j], 0.5); };
  p.labels = y;
  p.C = 10;
  p.tolerance = 1e-4;
  double worst_eq = 0, worst_box = 0;
  const auto r = smo_solve(p, [&](std::span<const double> a) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      s += a[i] * y[i];
      worst_box = std::max({worst_box, -a[i], a[i] - p.C});
    }
    worst_eq = std::max(worst_eq, std::abs(s));
  });
  EXPECT_TRUE(r.converged);
  EXPECT_LE(worst_eq, 1e-8);
  EXPECT_LE(worst_box, 0.0);
  const auto k = dense_kernel(p);
  EXPECT_LE(oracle::kkt_violation(k, y, r.alpha, r.bias, p.C, 1e-9), 2e-4);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = r.bias;
    for (std::size_t j = 0; j < x.size(); ++j) f += r.alpha[j] * y[j] * k[i][j];
    correct += (f > 0) == (y[i] > 0);
  }
  EXPECT_EQ(correct, x.size());
}

TEST(Smo, RejectsSingleClass) {
  SmoProblem p;
  p.size = 2;
  p.kernel = [](std::size_t, std::size_t) { return 1.0; };
  p.labels = {1, 1};
  EXPECT_THROW(smo_solve(p), Error);
}

TEST(Smo, IterationCapReturnsNonConverged) {
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 0; i < 30; ++i) {
    x.push_back(std::sin(i * 1.7));
    y.push_back(i % 3 ? 1 : -1);
  }
  SmoProblem p;
  p.size = x.size();
  p.kernel = [&](std::size_t i, std::size_t j) { return std::exp(-(x[i] - x[j]) * (x[i] - x[j])); };
  p.labels = y;
  p.C = 100;
  p.max_iterations = 2;
  const auto r = smo_solve(p);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.alpha.size(), x.size());
}

PerExampleObjective logistic_1d(const std::vector<double>& x, const std::vector<int>& y) {
  PerExampleObjective obj;
  obj.dimension = 2;
  obj.examples = x.size();
  obj.evaluate = [&x, &y](std::span<const double> p, std::size_t i, std::span<double> g) {
    const double z = p[0] * x[i] + p[1];
    const double m = y[i] * z;
    const double s = -y[i] / (1 + std::exp(m));
    g[0] += s * x[i];
    g[1] += s;
    return std::log1p(std::exp(-m));
  };
  return obj;
}

TEST(Minibatch, SeparableOneDimensional) {
  std::vector<double> x;
  std::vector<int> y;
  for (int i = -10; i <= 10; ++i)
    if (i != 0) {
      x.push_back(i / 10.0 + 0.3);
      y.push_back(i > 0 ? 1 : -1);
    }
  MinibatchOptions opt;
  opt.learning_rate = 0.5;
  opt.epochs = 300;
  opt.batch_size = 4;
  opt.seed = 2;
  const auto r = minibatch_gd(logistic_1d(x, y), {0, 0}, opt);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) correct += ((r.params[0] * x[i] + r.params[1]) > 0) == (y[i] > 0);
  EXPECT_EQ(correct, x.size());
  EXPECT_EQ(r.epoch_loss.size(), opt.epochs);
  EXPECT_EQ(minibatch_gd(logistic_1d(x, y), {0, 0}, opt).params, r.params);
}

TEST(Minibatch, ZeroLearningRateIsIdentity) {
  const std::vector<double> x = {1, -1, 2};
  const std::vector<int> y = {1, -1, 1};
  MinibatchOptions opt;
  opt.learning_rate = 0;
  const auto r = minibatch_gd(logistic_1d(x, y), {0.3, -0.2}, opt);
  EXPECT_EQ(r.params, (std::vector<double>{0.3, -0.2}));
}

TEST(Minibatch, DefaultSettingsDecreaseLossEachEpoch) {
  std::mt19937 rng(8);
  std::normal_distribution<double> n01(0, 1);
  const std::size_t n = 100, d = 8;
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (auto& v : x[i]) s += (v = n01(rng));
    y[i] = s > 0 ? 1 : -1;
  }
  PerExampleObjective obj;
  obj.dimension = d + 1;
  obj.examples = n;
  obj.evaluate = [&](std::span<const double> p, std::size_t i, std::span<double> g) {
    double z = p[d];
    for (std::size_t j = 0; j < d; ++j) z += p[j] * x[i][j];
    const double s = -y[i] / (1 + std::exp(y[i] * z));
    for (std::size_t j = 0; j < d; ++j) g[j] += s * x[i][j];
    g[d] += s;
    return std::log1p(std::exp(-y[i] * z));
  };
  const auto r = minibatch_gd(obj, std::vector<double>(d + 1, 0.0), MinibatchOptions{});
  ASSERT_EQ(r.epoch_loss.size(), 4u);
  for (std::size_t e = 1; e < r.epoch_loss.size(); ++e) EXPECT_LT(r.epoch_loss[e], r.epoch_loss[e - 1]);
  // The first epoch must already improve on the starting loss log(2).
  EXPECT_LT(r.epoch_loss[0], std::log(2.0));
  std::vector<double> params(r.params.begin(), r.params.end());
  const double oracle_loss = oracle::logistic_loss(x, y, params, 0.0);
  EXPECT_NEAR(r.epoch_loss.back(), oracle_loss, 1e-12);
}

TEST(GridSearch, ExhaustiveWithFirstTieKept) {
  const auto r = grid_search({{"C", {1, 10, 100}}, {"gamma", {0.1, 1}}},
                             [](const std::map<std::string, double>& p) {
                               return -std::abs(std::log10(p.at("C")) - 1);
                             });
  EXPECT_EQ(r.evaluated.size(), 6u);
  EXPECT_EQ(r.best.values.at("C"), 10);
  EXPECT_EQ(r.best.values.at("gamma"), 0.1);
  EXPECT_EQ(r.best.score, 0.0);
}

}  // namespace

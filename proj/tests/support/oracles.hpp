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

// Independent reference computations shared by the unit and acceptance
// tests. Nothing here calls into the library code under test except for
// plain data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#ifndef STANCEKIT_TEST_DATA_DIR
#define STANCEKIT_TEST_DATA_DIR "data"
#endif
#ifndef STANCEKIT_TEST_GOLDEN_DIR
#define STANCEKIT_TEST_GOLDEN_DIR "tests/golden"
#endif
#ifndef STANCEKIT_TEST_CONFIG_DIR
#define STANCEKIT_TEST_CONFIG_DIR "configs"
#endif

namespace oracle {

inline std::filesystem::path data_dir() { return STANCEKIT_TEST_DATA_DIR; }
inline std::filesystem::path golden_dir() { return STANCEKIT_TEST_GOLDEN_DIR; }
inline std::filesystem::path config_dir() { return STANCEKIT_TEST_CONFIG_DIR; }
inline std::filesystem::path lexicon_manifest() { return data_dir() / "lexicons" / "manifest.json"; }

// --- metrics, written from the textbook definitions in long double ---

inline double f1(long double tp, long double fp, long double fn) {
  if (tp == 0) return 0.0;
  const long double p = tp / (tp + fp), r = tp / (tp + fn);
  return static_cast<double>(2 * p * r / (p + r));
}

inline double kappa(long double tp, long double fp, long double fn, long double tn) {
  const long double n = tp + fp + fn + tn;
  const long double po = (tp + tn) / n;
  const long double pe = ((tp + fp) / n) * ((tp + fn) / n) + ((fn + tn) / n) * ((fp + tn) / n);
  if (pe == 1) return 0.0;
  return static_cast<double>((po - pe) / (1 - pe));
}

// Expected F1 of predictions independent of the truth, with the given
// positive rates of truth and prediction.
inline double chance_f1(double truth_rate, double predicted_rate) {
  if (truth_rate + predicted_rate == 0) return 0.0;
  return 2 * truth_rate * predicted_rate / (truth_rate + predicted_rate);
}

// --- calculus ---

using Fn = std::function<double(const std::vector<double>&)>;

inline std::vector<double> central_difference(const Fn& f, std::vector<double> x,
                                              double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double step = h * std::max(1.0, std::abs(xi));
    x[i] = xi + step;
    const double up = f(x);
    x[i] = xi - step;
    const double down = f(x);
    x[i] = xi;
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

// max_i |a_i - b_i| / max(1, |b_i|)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  return worst;
}

inline double rosenbrock(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 100 * (x[i + 1] - x[i] * x[i]) * (x[i + 1] - x[i] * x[i]) + (1 - x[i]) * (1 - x[i]);
  return s;
}

inline std::vector<double> rosenbrock_grad(const std::vector<double>& x) {
  std::vector<double> g(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double t = x[i + 1] - x[i] * x[i];
    g[i] += -400 * x[i] * t - 2 * (1 - x[i]);
    g[i + 1] += 200 * t;
  }
  return g;
}

// Mean logistic loss with labels in {-1,+1} plus 0.5*l2*|w|^2; params are
// w (d values) then b. Written directly from the definition.
inline double logistic_loss(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                            const std::vector<double>& params, double l2) {
  const std::size_t d = x.empty() ? 0 : x[0].size();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = params[d];
    for (std::size_t j = 0; j < d; ++j) z += params[j] * x[i][j];
    s += std::log1p(std::exp(-y[i] * z));
  }
  double w2 = 0.0;
  for (std::size_t j = 0; j < d; ++j) w2 += params[j] * params[j];
  return s / static_cast<double>(x.size()) + 0.5 * l2 * w2;
}

// --- SVM ---

inline double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return std::exp(-gamma * d);
}

// Largest pointwise KKT violation of a soft-margin SVM solution, measured on
// y_i f(x_i) with f recomputed from scratch.
inline double kkt_violation(const std::vector<std::vector<double>>& kernel,
                            const std::vector<double>& y, const std::vector<double>& alpha,
                            double bias, double C, double bound_eps = 1e-12) {
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double f = bias;
    for (std::size_t j = 0; j < y.size(); ++j) f += alpha[j] * y[j] * kernel[i][j];
    const double m = y[i] * f;
    double v = 0.0;
    if (alpha[i] <= bound_eps) v = std::max(0.0, 1 - m);
    else if (alpha[i] >= C - bound_eps) v = std::max(0.0, m - 1);
    else v = std::abs(m - 1);
    worst = std::max(worst, v);
  }
  return worst;
}

// The dual of a two-point problem (one per class) has alpha_1 = alpha_2 = a
// maximizing 2a - a^2 (K11 + K22 - 2 K12) / 2 on [0, C].
struct TwoPoint {
  double alpha = 0.0;
  double bias = 0.0;
};

inline TwoPoint two_point_svm(double k11, double k22, double k12, double C) {
  const double eta = k11 + k22 - 2 * k12;
  TwoPoint t;
  t.alpha = std::min(C, 2 / eta);
  // With both points on the margin, f(x1) = 1 and f(x2) = -1 average to the
  // bias below; at the bound the same midpoint is the libsvm convention.
  const double f1_wo_b = t.alpha * (k11 - k12);
  const double f2_wo_b = t.alpha * (k12 - k22);
  t.bias = -(f1_wo_b + f2_wo_b) / 2;
  return t;
}

// Dual objective value sum(alpha) - 0.5 sum_ij a_i a_j y_i y_j K_ij.
inline double svm_dual(const std::vector<std::vector<double>>& kernel, const std::vector<double>& y,
                       const std::vector<double>& alpha) {
  double s = 0.0, q = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += alpha[i];
    for (std::size_t j = 0; j < y.size(); ++j) q += alpha[i] * alpha[j] * y[i] * y[j] * kernel[i][j];
  }
  return s - 0.5 * q;
}

// --- trees ---

inline double gini(double pos, double n) {
  if (n == 0) return 0.0;
  const double p = pos / n;
  return 2 * p * (1 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Every feature and every midpoint between distinct sorted values; ties
// keep the lowest feature index and then the lowest threshold.
inline Split best_gini_split(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                             std::size_t min_leaf) {
  const double n = static_cast<double>(y.size());
  double pos = 0;
  for (int v : y) pos += v > 0;
  const double parent = gini(pos, n);
  Split best;
  for (std::size_t f = 0; f < x[0].size(); ++f) {
    std::vector<double> vals;
    for (const auto& r : x) vals.push_back(r[f]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      const double t = (vals[k] + vals[k + 1]) / 2;
      double nl = 0, pl = 0;
      for (std::size_t i = 0; i < y.size(); ++i)
        if (x[i][f] <= t) {
          ++nl;
          pl += y[i] > 0;
        }
      const double nr = n - nl, pr = pos - pl;
      if (nl < static_cast<double>(min_leaf) || nr < static_cast<double>(min_leaf)) continue;
      const double gain = parent - (nl / n) * gini(pl, nl) - (nr / n) * gini(pr, nr);
      if (gain > best.gain + 1e-12) best = {static_cast<int>(f), t, gain};
    }
  }
  return best;
}

// --- statistics ---

// Type 7 quantile from the definition h = (n-1)p.
inline double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace oracle

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

#include "stancekit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "stancekit/error.hpp"
#include "stancekit/rng.hpp"

namespace stancekit {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

std::string dump(std::span<const double> x) {
  std::ostringstream ss;
  ss.precision(17);
  ss << '[';
  for (std::size_t i = 0; i < x.size() && i < 32; ++i) ss << (i ? ", " : "") << x[i];
  if (x.size() > 32) ss << ", ... (" << x.size() << " values)";
  ss << ']';
  return ss.str();
}

struct Probe {
  double step;
  double f;
  double slope;  // directional derivative
  std::vector<double> x;
  std::vector<double> g;
};

class LineSearch {
 public:
  LineSearch(const ObjectiveFunction& obj, const LbfgsOptions& opt, std::span<const double> x0,
             double f0, std::span<const double> d, double slope0)
      : obj_(obj), opt_(opt), x0_(x0), d_(d), f0_(f0), slope0_(slope0) {}

  // Returns the accepted probe, or nullopt-equivalent (step 0) on failure.
  bool run(double initial_step, Probe& out) {
    Probe prev{0.0, f0_, slope0_, {}, {}};
    double step = initial_step;
    for (std::size_t i = 0; i < opt_.max_linesearch; ++i) {
      Probe cur = eval(step);
      if (cur.f > f0_ + opt_.c1 * step * slope0_ || (i > 0 && cur.f >= prev.f))
        return zoom(prev, cur, out);
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0) return zoom(cur, prev, out);
      prev = std::move(cur);
      step *= 2.0;
    }
    return fallback(out);
  }

 private:
  Probe eval(double step) {
    Probe p;
    p.step = step;
    p.x.resize(x0_.size());
    p.g.resize(x0_.size());
    for (std::size_t i = 0; i < x0_.size(); ++i) p.x[i] = x0_[i] + step * d_[i];
    p.f = obj_.evaluate(p.x, p.g);
    if (!std::isfinite(p.f) ||
        std::any_of(p.g.begin(), p.g.end(), [](double v) { return !std::isfinite(v); }))
      throw OptimizerError("non-finite loss or gradient at step " + std::to_string(step) +
                           "; iterate " + dump(p.x));
    p.slope = dot(p.g, d_);
    ++evals_;
    if (p.f <= f0_ + opt_.c1 * step * slope0_ && (!best_ || p.f < best_->f)) best_ = p;
    return p;
  }

  bool zoom(Probe lo, Probe hi, Probe& out) {
    while (evals_ < opt_.max_linesearch) {
      const double a = lo.step, b = hi.step;
      double step = 0.5 * (a + b);
      const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (a - b);
      const double disc = d1 * d1 - lo.slope * hi.slope;
      if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double denom = hi.slope - lo.slope + 2.0 * d2;
        if (denom != 0.0) {
          double c = b - (b - a) * (hi.slope + d2 - d1) / denom;
          const double lo_b = std::min(a, b), hi_b = std::max(a, b), w = hi_b - lo_b;
          if (std::isfinite(c) && c > lo_b + 0.1 * w && c < hi_b - 0.1 * w) step = c;
        }
      }
      if (std::abs(b - a) < 1e-16 * std::max(1.0, std::abs(a))) break;
      Probe cur = eval(step);
      if (cur.f > f0_ + opt_.c1 * step * slope0_ || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opt_.c2 * slope0_) {
          out = std::move(cur);
          return true;
        }
        if (cur.slope * (hi.step - lo.step) >= 0) hi = lo;
        lo = std::move(cur);
      }
    }
    return fallback(out);
  }

  // Accept the best sufficient-decrease point seen, if any.
  bool fallback(Probe& out) {
    if (!best_ || !(best_->f < f0_)) return false;
    out = *best_;
    return true;
  }

  const ObjectiveFunction& obj_;
  const LbfgsOptions& opt_;
  std::span<const double> x0_;
  std::span<const double> d_;
  double f0_;
  double slope0_;
  std::size_t evals_ = 0;
  std::optional<Probe> best_;
};

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFunction& objective, std::vector<double> x0,
                           const LbfgsOptions& options) {
  const std::size_t n = objective.dimension;
  if (x0.size() != n) throw OptimizerError("starting point has wrong dimension");
  const std::size_t m = std::max<std::size_t>(1, options.memory);

  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(n);
  res.loss = objective.evaluate(res.x, g);
  if (!std::isfinite(res.loss) ||
      std::any_of(g.begin(), g.end(), [](double v) { return !std::isfinite(v); }))
    throw OptimizerError("non-finite loss or gradient at the starting point " + dump(res.x));
  res.grad_norm = norm_inf(g);
  res.loss_history.push_back(res.loss);
  if (options.trace) *options.trace << "iter,loss,grad_norm\n0," << res.loss << ',' << res.grad_norm << '\n';

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> d(n), alpha(m);

  while (res.grad_norm > options.tolerance) {
    if (res.iterations >= options.max_iterations) return res;

    // two-loop recursion: d = -H g
    d = g;
    const std::size_t k = s_hist.size();
    for (std::size_t i = k; i-- > 0;) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], d);
      for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[i] * y_hist[i][j];
    }
    if (k > 0) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : d) v *= gamma;
    }
    for (std::size_t i = 0; i < k; ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], d);
      for (std::size_t j = 0; j < n; ++j) d[j] += s_hist[i][j] * (alpha[i] - beta);
    }
    for (double& v : d) v = -v;

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // Not a descent direction; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      slope = dot(g, d);
    }
    double step0 = 1.0;
    if (s_hist.empty()) step0 = std::min(1.0, 1.0 / std::sqrt(dot(g, g)));

    LineSearch ls(objective, options, res.x, res.loss, d, slope);
    Probe accepted;
    if (!ls.run(step0, accepted)) return res;

    std::vector<double> s(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = accepted.x[j] - res.x[j];
      y[j] = accepted.g[j] - g[j];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (s_hist.size() == m) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    res.x = std::move(accepted.x);
    g = std::move(accepted.g);
    res.loss = accepted.f;
    res.grad_norm = norm_inf(g);
    ++res.iterations;
    res.loss_history.push_back(res.loss);
    if (options.trace)
      *options.trace << res.iterations << ',' << res.loss << ',' << res.grad_norm << '\n';
  }
  res.converged = true;
  return res;
}

// --- kernel cache ---

KernelCache::KernelCache(std::size_t n, std::size_t budget_bytes, RowFn compute)
    : n_(n),
      capacity_(std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(1, n * sizeof(double)))),
      compute_(std::move(compute)) {}

std::span<const double> KernelCache::row(std::size_t i) {
  if (auto it = rows_.find(i); it != rows_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second.second);
    return it->second.first;
  }
  ++misses_;
  std::vector<double> values;
  if (lru_.size() >= capacity_) {
    const std::size_t victim = lru_.back();
    lru_.pop_back();
    auto node = rows_.extract(victim);
    values = std::move(node.mapped().first);
  }
  values.resize(n_);
  compute_(i, values);
  lru_.push_front(i);
  auto [it, _] = rows_.emplace(i, std::make_pair(std::move(values), lru_.begin()));
  return it->second.first;
}

// --- SMO ---

SmoResult smo_solve(const SmoProblem& p, const SmoObserver& observer) {
  const std::size_t n = p.size;
  if (n < 2) throw TrainingError("SMO needs at least two examples");
  if (p.labels.size() != n) throw TrainingError("label count does not match problem size");
  if (!(p.C > 0.0)) throw TrainingError("C must be positive");
  bool pos = false, neg = false;
  for (double y : p.labels) {
    if (y == 1.0) pos = true;
    else if (y == -1.0) neg = true;
    else throw TrainingError("labels must be -1 or +1");
  }
  if (!pos || !neg) throw TrainingError("SMO needs both classes");

  const auto& y = p.labels;
  const double C = p.C;
  // Q_ij = y_i y_j K_ij
  KernelCache cache(n, p.cache_bytes, [&](std::size_t i, std::span<double> out) {
    for (std::size_t t = 0; t < n; ++t) out[t] = y[i] * y[t] * p.kernel(i, t);
  });
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = p.kernel(i, i);

  SmoResult res;
  res.alpha.assign(n, 0.0);
  auto& a = res.alpha;
  std::vector<double> G(n, -1.0);  // gradient of the dual objective, Q a - e
  const std::size_t max_iter =
      p.max_iterations ? p.max_iterations : std::max<std::size_t>(10'000'000, 100 * n);
  constexpr double kTau = 1e-12;

  auto in_up = [&](std::size_t t) { return (y[t] > 0 && a[t] < C) || (y[t] < 0 && a[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && a[t] > 0) || (y[t] < 0 && a[t] < C); };

  while (true) {
    // Maximal violating pair.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    res.kkt_gap = (i == n || j == n) ? 0.0 : gmax - gmin;
    if (res.kkt_gap < p.tolerance) {
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iter) break;
    ++res.iterations;

    auto Qi = cache.row(i);
    const double Qij = Qi[j];
    auto Qi_copy = std::vector<double>(Qi.begin(), Qi.end());  // row j may evict row i
    auto Qj = cache.row(j);

    const double old_ai = a[i], old_aj = a[j];
    if (y[i] != y[j]) {
      double quad = diag[i] + diag[j] + 2.0 * Qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) { a[j] = 0; a[i] = diff; }
      } else {
        if (a[i] < 0) { a[i] = 0; a[j] = -diff; }
      }
      if (diff > 0) {
        if (a[i] > C) { a[i] = C; a[j] = C - diff; }
      } else {
        if (a[j] > C) { a[j] = C; a[i] = C + diff; }
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * Qij;
      if (quad <= 0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) { a[i] = C; a[j] = sum - C; }
      } else {
        if (a[j] < 0) { a[j] = 0; a[i] = sum; }
      }
      if (sum > C) {
        if (a[j] > C) { a[j] = C; a[i] = sum - C; }
      } else {
        if (a[i] < 0) { a[i] = 0; a[j] = sum; }
      }
    }

    const double dai = a[i] - old_ai, daj = a[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) G[t] += Qi_copy[t] * dai + Qj[t] * daj;
    if (observer) observer(a);
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yG = y[t] * G[t];
    if (a[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yG);
      else lb = std::max(lb, yG);
    } else if (a[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yG);
      else lb = std::max(lb, yG);
    } else {
      ++n_free;
      sum_free += yG;
    }
  }
  const double r = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  res.bias = -r;
  return res;
}

// --- minibatch gradient descent ---

MinibatchResult minibatch_gd(const PerExampleObjective& obj, std::vector<double> init,
                             const MinibatchOptions& opt) {
  if (!(opt.learning_rate >= 0.0)) throw OptimizerError("learning rate must be non-negative");
  if (opt.batch_size == 0) throw OptimizerError("batch size must be at least 1");
  if (init.size() != obj.dimension) throw OptimizerError("initial parameters have wrong dimension");

  MinibatchResult res;
  res.params = std::move(init);
  std::vector<double> grad(obj.dimension), scratch(obj.dimension);
  Rng rng(opt.seed);
  std::vector<std::size_t> order(obj.examples);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
      const std::size_t end = std::min(order.size(), start + opt.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) obj.evaluate(res.params, order[k], grad);
      const double scale = opt.learning_rate / static_cast<double>(end - start);
      for (std::size_t j = 0; j < grad.size(); ++j) res.params[j] -= scale * grad[j];
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < obj.examples; ++i) loss += obj.evaluate(res.params, i, scratch);
    loss /= static_cast<double>(std::max<std::size_t>(1, obj.examples));
    if (!std::isfinite(loss))
      throw OptimizerError("minibatch descent diverged at epoch " + std::to_string(epoch + 1) +
                           "; parameters " + dump(res.params));
    res.epoch_loss.push_back(loss);
  }
  return res;
}

// --- grid search ---

GridSearchResult grid_search(
    const std::map<std::string, std::vector<double>>& grid,
    const std::function<double(const std::map<std::string, double>&)>& score) {
  GridSearchResult out;
  std::vector<std::pair<std::string, const std::vector<double>*>> axes;
  for (const auto& [name, values] : grid) {
    if (values.empty()) throw ConfigError("grid axis '" + name + "' is empty");
    axes.emplace_back(name, &values);
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  bool have_best = false;
  while (true) {
    GridPoint pt;
    for (std::size_t k = 0; k < axes.size(); ++k) pt.values[axes[k].first] = (*axes[k].second)[idx[k]];
    pt.score = score(pt.values);
    if (!have_best || pt.score > out.best.score) {
      out.best = pt;
      have_best = true;
    }
    out.evaluated.push_back(std::move(pt));
    std::size_t k = axes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].second->size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (axes.empty()) return out;
  }
}

}  // namespace stancekit

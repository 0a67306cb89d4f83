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

#include "stancekit/explain.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "stancekit/error.hpp"
#include "stancekit/evaluate.hpp"
#include "stancekit/io.hpp"
#include "stancekit/parallel.hpp"
#include "stancekit/rng.hpp"

namespace stancekit {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::pro_kremlin: return "pro_kremlin";
    case Direction::pro_western: return "pro_western";
    case Direction::neutral: return "neutral";
  }
  return "?";
}

ImportanceReport permutation_importance(const TrainedModel& model, const Matrix& rows,
                                        const std::vector<int>& labels,
                                        const FeatureManifest& rows_manifest,
                                        const ImportanceOptions& opt) {
  if (rows.rows() == 0 || rows.rows() != labels.size())
    throw ContractError("importance needs a non-empty set of labeled rows");
  if (opt.repeats == 0) throw ConfigError("repeats must be at least 1");
  const Prediction base = predict(model, rows, rows_manifest);
  const auto base_scores = base.scores;

  ImportanceReport rep;
  rep.baseline_f1 = f1_score(confusion(labels, base.labels));
  rep.repeats = opt.repeats;
  rep.seed = opt.seed;
  rep.features.resize(rows.cols());

  const std::size_t n = rows.rows();
  parallel_for(rows.cols(), opt.jobs, [&](std::size_t j) {
    FeatureImportance& fi = rep.features[j];
    fi.index = j;
    fi.name = rows_manifest.names[j];
    fi.group = rows_manifest.group(j);

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += rows(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (rows(i, j) - mean) * (rows(i, j) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    bool constant = true;
    for (std::size_t i = 1; i < n && constant; ++i) constant = rows(i, j) == rows(0, j);
    if (constant) {
      fi.constant = true;
      fi.note = "constant column; importance defined as 0";
      return;
    }

    Matrix work = rows;
    Rng rng(Rng::mix(opt.seed) ^ (0x9e3779b97f4a7c15ULL * (j + 1)));
    std::vector<double> drops;
    drops.reserve(opt.repeats);
    for (std::size_t r = 0; r < opt.repeats; ++r) {
      std::vector<std::size_t> perm(n);
      if (opt.force_identity) {
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
      } else {
        perm = rng.permutation(n);
      }
      for (std::size_t i = 0; i < n; ++i) work(i, j) = rows(perm[i], j);
      const Prediction p = predict(model, work);
      drops.push_back(rep.baseline_f1 - f1_score(confusion(labels, p.labels)));
    }
    double m = 0.0;
    for (double d : drops) m += d;
    m /= static_cast<double>(drops.size());
    double s = 0.0;
    for (double d : drops) s += (d - m) * (d - m);
    fi.importance = m;
    fi.std = drops.size() > 1 ? std::sqrt(s / static_cast<double>(drops.size() - 1)) : 0.0;

    // Direction probe: raise the column by one standard deviation.
    for (std::size_t i = 0; i < n; ++i) work(i, j) = rows(i, j) + sd;
    const Prediction probe = predict(model, work);
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) shift += probe.scores[i] - base_scores[i];
    shift /= static_cast<double>(n);
    fi.score_shift = shift;
    fi.direction = std::abs(shift) < 1e-12 ? Direction::neutral
                   : shift > 0           ? Direction::pro_kremlin
                                         : Direction::pro_western;
  });
  return rep;
}

RankedImportance rank_importance(const ImportanceReport& report, std::size_t top_k) {
  RankedImportance out;
  for (const auto& f : report.features)
    (f.group == "keyword" ? out.keywords : out.linguistic).push_back(f);
  auto order = [](const FeatureImportance& a, const FeatureImportance& b) {
    const double x = std::abs(a.importance), y = std::abs(b.importance);
    if (x != y) return x > y;
    return a.index < b.index;
  };
  for (auto* section : {&out.keywords, &out.linguistic}) {
    std::stable_sort(section->begin(), section->end(), order);
    if (top_k > 0 && section->size() > top_k) section->resize(top_k);
  }
  return out;
}

void write_importance_csv(std::ostream& out, const ImportanceReport& report,
                          const RankedImportance& ranked) {
  out << "# " << kImportanceFormat << ' ' << kImportanceVersion << " seed=" << report.seed
      << " repeats=" << report.repeats << " baseline_f1=" << io::format_double(report.baseline_f1)
      << '\n';
  out << "feature,group,importance,std,direction\n";
  for (const auto* section : {&ranked.keywords, &ranked.linguistic})
    for (const auto& f : *section)
      out << io::csv_escape(f.name) << ',' << f.group << ','
          << io::format_double(100.0 * f.importance) << ',' << io::format_double(100.0 * f.std)
          << ',' << (f.constant ? std::string("constant") : std::string(to_string(f.direction)))
          << '\n';
}

}  // namespace stancekit

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
#include <iosfwd>
#include <string>
#include <vector>

#include "stancekit/classify.hpp"

namespace stancekit {

enum class Direction { pro_kremlin, pro_western, neutral };
std::string_view to_string(Direction d);

struct ImportanceOptions {
  std::size_t repeats = 20;
  std::uint64_t seed = 0;
  bool force_identity = false;  // replace every shuffle with the identity
  unsigned jobs = 1;
};

struct FeatureImportance {
  std::size_t index = 0;
  std::string name;
  std::string group;
  double importance = 0.0;  // mean F1 drop, as a fraction (0.1 = 10 points)
  double std = 0.0;         // sample standard deviation over repeats
  double score_shift = 0.0; // mean decision-score change under a +1 SD probe
  Direction direction = Direction::neutral;
  bool constant = false;
  std::string note;
};

struct ImportanceReport {
  double baseline_f1 = 0.0;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::vector<FeatureImportance> features;  // manifest order
};

// Shuffles each column `repeats` times and records the drop in F1 relative
// to the unshuffled rows. Each feature draws from its own seeded stream, so
// the result does not depend on the worker count.
ImportanceReport permutation_importance(const TrainedModel& model, const Matrix& rows,
                                        const std::vector<int>& labels,
                                        const FeatureManifest& rows_manifest,
                                        const ImportanceOptions& options = {});

struct RankedImportance {
  std::vector<FeatureImportance> keywords;
  std::vector<FeatureImportance> linguistic;  // every non-keyword feature
};

// Descending by |importance|, ties by manifest index; top_k = 0 keeps all.
RankedImportance rank_importance(const ImportanceReport& report, std::size_t top_k);

inline constexpr std::string_view kImportanceFormat = "stancekit-importance";
inline constexpr int kImportanceVersion = 1;

// Comment header, then feature,group,importance,std,direction with keyword
// rows first. Importance and std are written in percentage points.
void write_importance_csv(std::ostream& out, const ImportanceReport& report,
                          const RankedImportance& ranked);

}  // namespace stancekit

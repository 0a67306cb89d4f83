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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stancekit/corpus.hpp"
#include "stancekit/features.hpp"

namespace stancekit {

enum class GroupKey { date, language, stance, genre };
std::string_view to_string(GroupKey k);
// ConfigError on an unknown key.
GroupKey parse_group_key(std::string_view s);

struct FeatureStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
  std::size_t count = 0;
};

// Quantile by linear interpolation between order statistics
// (h = (n - 1) p). `sorted` must be ascending and non-empty.
double quantile(const std::vector<double>& sorted, double p);
FeatureStats describe_values(std::vector<double> values);

struct DistributionSummary {
  std::vector<std::pair<GroupKey, std::string>> key;  // empty for the global group
  std::vector<FeatureStats> stats;  // aligned with the feature table's manifest
  std::size_t count = 0;

  // "date=2022-03-18;language=en", or "all" for the global group.
  std::string label() const;
};

// Rows of `features` are matched to `docs` by id. One summary per non-empty
// group, ordered by key values.
std::vector<DistributionSummary> summarize(const std::vector<Document>& docs,
                                           const FeatureTable& features,
                                           const std::vector<GroupKey>& group_by,
                                           unsigned jobs = 1);

struct DeltaRow {
  std::string feature;
  double baseline_median = 0.0;
  double comparison_median = 0.0;
  double difference = 0.0;
  double relative_change = 0.0;  // difference / |baseline|; +-inf when the baseline is 0
  bool flagged = false;
};

// Groups are looked up by label(); LookupError when either is missing.
std::vector<DeltaRow> delta_report(const std::vector<DistributionSummary>& summaries,
                                   const FeatureManifest& manifest,
                                   const std::string& baseline, const std::string& comparison,
                                   double threshold = 0.25);

inline constexpr std::string_view kTrendsFormat = "stancekit-trends";
inline constexpr int kTrendsVersion = 1;

// "# stancekit-trends 1 group_by=<keys>" then
// group,feature,count,min,q1,median,q3,max,mean.
void write_trends_csv(std::ostream& out, const std::vector<DistributionSummary>& summaries,
                      const FeatureManifest& manifest, const std::vector<GroupKey>& group_by,
                      std::uint64_t seed = 0);
void write_delta_csv(std::ostream& out, const std::vector<DeltaRow>& rows);

}  // namespace stancekit

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

#include "stancekit/trends.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <unordered_map>

#include "stancekit/error.hpp"
#include "stancekit/io.hpp"
#include "stancekit/parallel.hpp"

namespace stancekit {

std::string_view to_string(GroupKey k) {
  switch (k) {
    case GroupKey::date: return "date";
    case GroupKey::language: return "language";
    case GroupKey::stance: return "stance";
    case GroupKey::genre: return "genre";
  }
  return "?";
}

GroupKey parse_group_key(std::string_view s) {
  for (auto k : {GroupKey::date, GroupKey::language, GroupKey::stance, GroupKey::genre})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown grouping key '" + std::string(s) +
                    "' (expected date, language, stance or genre)");
}

double quantile(const std::vector<double>& sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

FeatureStats describe_values(std::vector<double> v) {
  if (v.empty()) throw ContractError("cannot describe an empty group");
  std::sort(v.begin(), v.end());
  FeatureStats s;
  s.count = v.size();
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q3 = quantile(v, 0.75);
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  return s;
}

std::string DistributionSummary::label() const {
  if (key.empty()) return "all";
  std::string out;
  for (const auto& [k, v] : key) {
    if (!out.empty()) out += ';';
    out += std::string(to_string(k)) + "=" + v;
  }
  return out;
}

namespace {

std::string key_value(const Document& d, GroupKey k) {
  switch (k) {
    case GroupKey::date: return to_string(d.collected_on);
    case GroupKey::language: return std::string(to_string(d.language));
    case GroupKey::genre: return std::string(to_string(d.genre));
    case GroupKey::stance:
      if (!d.stance) throw ValidationError("document '" + d.id + "' has no stance to group by");
      return std::string(to_string(*d.stance));
  }
  return {};
}

}  // namespace

std::vector<DistributionSummary> summarize(const std::vector<Document>& docs,
                                           const FeatureTable& features,
                                           const std::vector<GroupKey>& group_by, unsigned jobs) {
  std::unordered_map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id, &d);

  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < features.ids.size(); ++r) {
    auto it = by_id.find(features.ids[r]);
    if (it == by_id.end())
      throw ValidationError("feature row '" + features.ids[r] + "' has no matching document");
    std::vector<std::string> key;
    for (auto k : group_by) key.push_back(key_value(*it->second, k));
    groups[key].push_back(r);
  }

  std::vector<const std::pair<const std::vector<std::string>, std::vector<std::size_t>>*> items;
  for (const auto& g : groups) items.push_back(&g);
  std::vector<DistributionSummary> out(items.size());
  const std::size_t width = features.manifest.size();
  parallel_for(items.size(), jobs, [&](std::size_t gi) {
    const auto& [key, rows] = *items[gi];
    DistributionSummary& s = out[gi];
    for (std::size_t k = 0; k < group_by.size(); ++k) s.key.emplace_back(group_by[k], key[k]);
    s.count = rows.size();
    s.stats.reserve(width);
    std::vector<double> values(rows.size());
    for (std::size_t j = 0; j < width; ++j) {
      for (std::size_t i = 0; i < rows.size(); ++i) values[i] = features.matrix(rows[i], j);
      s.stats.push_back(describe_values(values));
    }
  });
  return out;
}

std::vector<DeltaRow> delta_report(const std::vector<DistributionSummary>& summaries,
                                   const FeatureManifest& manifest, const std::string& baseline,
                                   const std::string& comparison, double threshold) {
  auto find = [&](const std::string& label) -> const DistributionSummary& {
    for (const auto& s : summaries)
      if (s.label() == label) return s;
    throw LookupError("no group labeled '" + label + "'");
  };
  const auto& a = find(baseline);
  const auto& b = find(comparison);
  std::vector<DeltaRow> rows;
  for (std::size_t j = 0; j < manifest.size(); ++j) {
    DeltaRow r;
    r.feature = manifest.names[j];
    r.baseline_median = a.stats.at(j).median;
    r.comparison_median = b.stats.at(j).median;
    r.difference = r.comparison_median - r.baseline_median;
    if (r.baseline_median != 0.0)
      r.relative_change = r.difference / std::abs(r.baseline_median);
    else if (r.difference != 0.0)
      r.relative_change = std::copysign(std::numeric_limits<double>::infinity(), r.difference);
    // Slack keeps exact boundary ratios such as 1.25x from missing the flag.
    r.flagged = std::abs(r.relative_change) >= threshold - 1e-12;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_trends_csv(std::ostream& out, const std::vector<DistributionSummary>& summaries,
                      const FeatureManifest& manifest, const std::vector<GroupKey>& group_by,
                      std::uint64_t seed) {
  out << "# " << kTrendsFormat << ' ' << kTrendsVersion << " group_by=";
  if (group_by.empty()) out << '-';
  for (std::size_t k = 0; k < group_by.size(); ++k) out << (k ? "," : "") << to_string(group_by[k]);
  out << " seed=" << seed << '\n' << "group,feature,count,min,q1,median,q3,max,mean\n";
  for (const auto& s : summaries)
    for (std::size_t j = 0; j < manifest.size(); ++j) {
      const auto& st = s.stats[j];
      out << io::csv_escape(s.label()) << ',' << io::csv_escape(manifest.names[j]) << ','
          << st.count << ',' << io::format_double(st.min) << ',' << io::format_double(st.q1)
          << ',' << io::format_double(st.median) << ',' << io::format_double(st.q3) << ','
          << io::format_double(st.max) << ',' << io::format_double(st.mean) << '\n';
    }
}

void write_delta_csv(std::ostream& out, const std::vector<DeltaRow>& rows) {
  out << "feature,baseline_median,comparison_median,difference,relative_change,flagged\n";
  for (const auto& r : rows)
    out << io::csv_escape(r.feature) << ',' << io::format_double(r.baseline_median) << ','
        << io::format_double(r.comparison_median) << ',' << io::format_double(r.difference) << ','
        << io::format_double(r.relative_change) << ',' << (r.flagged ? 1 : 0) << '\n';
}

}  // namespace stancekit

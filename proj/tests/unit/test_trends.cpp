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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stancekit/error.hpp"
#include "stancekit/trends.hpp"

using namespace stancekit;

namespace {

Document doc(std::string id, Genre g, const char* date, Language lang = Language::en) {
  Document d;
  d.id = std::move(id);
  d.genre = g;
  d.language = lang;
  d.collected_on = *parse_date(date);
  d.stance = Stance::pro_western;
  return d;
}

FeatureTable table(const std::vector<Document>& docs, std::vector<std::vector<double>> rows,
                   std::vector<std::string> names) {
  FeatureTable t;
  t.manifest.names = std::move(names);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    t.ids.push_back(docs[i].id);
    t.matrix.append_row(rows[i]);
  }
  return t;
}

TEST(Quantiles, MatchOracleOnRandomSamples) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int n = 1; n < 30; ++n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = u(rng);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0, 0.1})
      EXPECT_NEAR(quantile(sorted, p), oracle::quantile7(v, p), 1e-12);
  }
}

TEST(Summaries, FiveValuesByGenre) {
  std::vector<Document> docs;
  std::vector<std::vector<double>> rows;
  const double vals[] = {4, 1, 5, 3, 2};
  for (int i = 0; i < 5; ++i) {
    docs.push_back(doc("n" + std::to_string(i), Genre::newspaper, "2022-03-01"));
    rows.push_back({vals[i]});
  }
  docs.push_back(doc("t0", Genre::telegram, "2022-03-01"));
  rows.push_back({9});
  const auto s = summarize(docs, table(docs, rows, {"x"}), {GroupKey::genre});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].label(), "genre=newspaper");
  EXPECT_EQ(s[0].stats[0].median, 3);
  EXPECT_EQ(s[0].stats[0].q1, 2);
  EXPECT_EQ(s[0].stats[0].q3, 4);
  EXPECT_EQ(s[0].stats[0].mean, 3);
  const auto& one = s[1].stats[0];
  EXPECT_EQ(s[1].count, 1u);
  EXPECT_TRUE(one.min == 9 && one.q1 == 9 && one.median == 9 && one.q3 == 9 && one.max == 9);
  const auto all = summarize(docs, table(docs, rows, {"x"}), {});
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].label(), "all");
  EXPECT_EQ(all[0].count, 6u);
}

TEST(Summaries, MissingFeatureRowIsLookupError) {
  std::vector<Document> docs = {doc("a", Genre::newspaper, "2022-03-01")};
  FeatureTable t;
  t.manifest.names = {"x"};
  t.ids = {"other"};
  t.matrix.append_row(std::vector<double>{1});
  EXPECT_THROW(summarize(docs, t, {GroupKey::date}), Error);
}

TEST(Delta, IdenticalGroupsNotFlagged) {
  std::vector<Document> docs = {doc("a", Genre::newspaper, "2022-03-01"),
                                doc("b", Genre::newspaper, "2022-03-08")};
  const auto t = table(docs, {{0.2, 0.0}, {0.2, 0.0}}, {"x", "y"});
  const auto s = summarize(docs, t, {GroupKey::date});
  const auto d = delta_report(s, t.manifest, "date=2022-03-01", "date=2022-03-08");
  for (const auto& r : d) {
    EXPECT_EQ(r.difference, 0.0);
    EXPECT_FALSE(r.flagged);
  }
}

TEST(Delta, BoundaryRatioFlagged) {
  std::vector<Document> docs = {doc("a", Genre::newspaper, "2022-03-01"),
                                doc("b", Genre::newspaper, "2022-03-08")};
  const auto t = table(docs, {{0.5}, {0.625}}, {"x"});
  const auto s = summarize(docs, t, {GroupKey::date});
  const auto d = delta_report(s, t.manifest, "date=2022-03-01", "date=2022-03-08");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].relative_change, 0.25);
  EXPECT_TRUE(d[0].flagged);
  EXPECT_THROW(delta_report(s, t.manifest, "date=2022-03-01", "date=1999-01-01"), LookupError);
}

TEST(Delta, PlantedSpikeFlaggedOnlyThere) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(0.09, 0.11);
  const char* dates[] = {"2022-02-23", "2022-03-01", "2022-03-08"};
  std::vector<Document> docs;
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 40; ++i) {
      docs.push_back(doc(std::to_string(k) + "-" + std::to_string(i), Genre::newspaper, dates[k]));
      const double spike = k == 2 ? 0.1 : 0.0;
      rows.push_back({u(rng), u(rng) + spike, u(rng)});
    }
  const auto t = table(docs, rows, {"a", "b", "c"});
  const auto s = summarize(docs, t, {GroupKey::date}, 3);
  const auto quiet = delta_report(s, t.manifest, "date=2022-02-23", "date=2022-03-01");
  for (const auto& r : quiet) EXPECT_FALSE(r.flagged) << r.feature;
  const auto spiked = delta_report(s, t.manifest, "date=2022-02-23", "date=2022-03-08");
  EXPECT_FALSE(spiked[0].flagged);
  EXPECT_TRUE(spiked[1].flagged);
  EXPECT_FALSE(spiked[2].flagged);
}

TEST(Delta, ZeroBaselineIsInfinite) {
  std::vector<Document> docs = {doc("a", Genre::newspaper, "2022-03-01"),
                                doc("b", Genre::telegram, "2022-03-01")};
  const auto t = table(docs, {{0.0}, {0.1}}, {"x"});
  const auto s = summarize(docs, t, {GroupKey::genre});
  const auto d = delta_report(s, t.manifest, "genre=newspaper", "genre=telegram");
  EXPECT_TRUE(std::isinf(d[0].relative_change));
  EXPECT_TRUE(d[0].flagged);
}

TEST(Trends, CsvHeaderAndGroupKeys) {
  std::vector<Document> docs = {doc("a", Genre::newspaper, "2022-03-01", Language::uk),
                                doc("b", Genre::newspaper, "2022-03-01", Language::en)};
  const auto t = table(docs, {{1.0}, {2.0}}, {"x"});
  const std::vector<GroupKey> keys = {GroupKey::date, GroupKey::language};
  const auto s = summarize(docs, t, keys);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].label(), "date=2022-03-01;language=en");
  EXPECT_EQ(s[1].label(), "date=2022-03-01;language=uk");
  std::ostringstream out;
  write_trends_csv(out, s, t.manifest, keys, 4);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "# stancekit-trends 1 group_by=date,language seed=4");
  EXPECT_THROW(parse_group_key("weekday"), ConfigError);
}

}  // namespace

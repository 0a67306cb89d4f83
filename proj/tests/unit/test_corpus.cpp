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
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "stancekit/corpus.hpp"
#include "stancekit/error.hpp"

using namespace stancekit;

namespace {

std::string record(const std::string& id, const std::string& text, const std::string& source,
                   const std::string& lang = "en", const std::string& genre = "newspaper") {
  return R"({"id":")" + id + R"(","text":")" + text + R"(","language":")" + lang +
         R"(","genre":")" + genre + R"(","source":")" + source +
         R"(","collected_on":"2022-03-01"})" "\n";
}

const SourceStanceMap& shipped_map() {
  static const SourceStanceMap map = SourceStanceMap::load(oracle::data_dir() / "source_stance.tsv");
  return map;
}

std::vector<Document> balanced(std::size_t per_class, bool two_languages = false) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    Document d;
    d.id = "d" + std::to_string(i);
    d.text = "text " + d.id;
    d.stance = i % 2 ? Stance::pro_kremlin : Stance::pro_western;
    d.language = two_languages && (i / 2) % 2 ? Language::uk : Language::en;
    docs.push_back(d);
  }
  return docs;
}

TEST(Corpus, DuplicateTextKeepsFirst) {
  std::istringstream in(record("a", "Same words.", "BBC") + record("b", "Other words.", "BBC") +
                        record("c", "Same words.", "RT"));
  LoadStats stats;
  const auto docs = parse_corpus(in, &shipped_map(), &stats);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].id, "a");
  EXPECT_EQ(docs[1].id, "b");
  EXPECT_EQ(stats.duplicates_dropped, 1u);
}

TEST(Corpus, SourceMapLabelsRiaNewsProKremlin) {
  std::istringstream in(record("a", "Text.", "Ria news"));
  const auto docs = parse_corpus(in, &shipped_map());
  ASSERT_TRUE(docs[0].stance.has_value());
  EXPECT_EQ(*docs[0].stance, Stance::pro_kremlin);
  EXPECT_EQ(shipped_map().lookup("RIA NEWS"), Stance::pro_kremlin);
}

TEST(Corpus, EmptyTextNamesTheId) {
  std::istringstream in(record("empty-7", "", "BBC"));
  try {
    parse_corpus(in, &shipped_map());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("empty-7"), std::string::npos);
  }
}

TEST(Corpus, UnknownSourceAndMalformedLineAreErrors) {
  std::istringstream unknown(record("a", "Text.", "Nobody Times"));
  EXPECT_THROW(parse_corpus(unknown, &shipped_map()), Error);
  std::istringstream broken(record("a", "Text.", "BBC") + "{not json\n");
  try {
    parse_corpus(broken, &shipped_map());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Corpus, WriteThenParseRoundTripsAndDedupIsIdempotent) {
  std::istringstream in(record("a", "One.", "BBC") + record("b", "Two.", "RT", "ru", "telegram"));
  const auto docs = parse_corpus(in, &shipped_map());
  std::stringstream buf;
  write_corpus(buf, docs, 9);
  LoadStats stats;
  const auto again = parse_corpus(buf, nullptr, &stats);
  ASSERT_EQ(again.size(), docs.size());
  EXPECT_EQ(stats.duplicates_dropped, 0u);
  EXPECT_EQ(corpus_hash(again), corpus_hash(docs));
  EXPECT_EQ(again[1].genre, Genre::telegram);
  EXPECT_EQ(again[1].stance, Stance::pro_kremlin);
}

TEST(Corpus, NewerVersionHeaderRejected) {
  std::istringstream in(R"({"format":"stancekit-corpus","version":99})" "\n" +
                        record("a", "One.", "BBC"));
  EXPECT_THROW(parse_corpus(in, nullptr), VersionError);
}

TEST(Split, HundredDocsFiveFoldsOfTwentyBalanced) {
  const auto docs = balanced(50);
  const auto plan = stratified_kfold(docs, 5, 1);
  ASSERT_EQ(plan.folds.size(), 5u);
  std::map<std::string, Stance> stance;
  for (const auto& d : docs) stance[d.id] = *d.stance;
  std::multiset<std::string> all_test;
  for (const auto& f : plan.folds) {
    ASSERT_EQ(f.test_ids.size(), 20u);
    EXPECT_EQ(f.train_ids.size(), 80u);
    const auto kremlin = std::count_if(f.test_ids.begin(), f.test_ids.end(),
                                       [&](const auto& id) { return stance[id] == Stance::pro_kremlin; });
    EXPECT_EQ(kremlin, 10);
    all_test.insert(f.test_ids.begin(), f.test_ids.end());
  }
  EXPECT_EQ(all_test.size(), 100u);
  EXPECT_EQ(std::set<std::string>(all_test.begin(), all_test.end()).size(), 100u);
}

TEST(Split, FoldSizesForLargeOddCount) {
  // 18229 = 5 * 3645 + 4, so four folds get one extra document.
  std::vector<Document> docs = balanced(9114);
  Document extra;
  extra.id = "extra";
  extra.stance = Stance::pro_western;
  docs.push_back(extra);
  const auto plan = stratified_kfold(docs, 5, 3);
  std::map<std::size_t, int> sizes;
  for (const auto& f : plan.folds) ++sizes[f.test_ids.size()];
  EXPECT_EQ(sizes[3645], 1);
  EXPECT_EQ(sizes[3646], 4);
}

TEST(Split, RatioWithinOneOverFoldSize) {
  std::vector<Document> docs = balanced(40, true);
  for (int i = 0; i < 7; ++i) {
    Document d;
    d.id = "x" + std::to_string(i);
    d.stance = Stance::pro_kremlin;
    docs.push_back(d);
  }
  std::map<std::string, Stance> stance;
  for (const auto& d : docs) stance[d.id] = *d.stance;
  const double global = 47.0 / 87.0;
  for (bool by_lang : {false, true}) {
    const auto plan = stratified_kfold(docs, 4, 11, by_lang);
    for (const auto& f : plan.folds) {
      const double n = static_cast<double>(f.test_ids.size());
      const double k = std::count_if(f.test_ids.begin(), f.test_ids.end(),
                                     [&](const auto& id) { return stance[id] == Stance::pro_kremlin; });
      EXPECT_LE(std::abs(k / n - global), 1.0 / n);
    }
  }
}

TEST(Split, DeterministicForSeedAndSensitiveToIt) {
  const auto docs = balanced(30);
  EXPECT_EQ(stratified_kfold(docs, 5, 7).to_json(), stratified_kfold(docs, 5, 7).to_json());
  EXPECT_NE(stratified_kfold(docs, 5, 7).to_json(), stratified_kfold(docs, 5, 8).to_json());
}

TEST(Split, TooFewMembersOrUnlabeled) {
  EXPECT_THROW(stratified_kfold(balanced(3), 5, 1), StratificationError);
  auto docs = balanced(10);
  docs[4].stance.reset();
  EXPECT_THROW(stratified_kfold(docs, 2, 1), Error);
}

TEST(Split, HoldoutTakesRoundedFractionPerStratum) {
  const auto plan = stratified_holdout(balanced(50), 0.1, 4);
  ASSERT_EQ(plan.folds.size(), 1u);
  EXPECT_EQ(plan.folds[0].test_ids.size(), 10u);
  EXPECT_EQ(plan.folds[0].train_ids.size(), 90u);
}

TEST(Filter, SubsetsPreserveOrder) {
  std::vector<Document> docs = balanced(6, true);
  docs[3].genre = Genre::telegram;
  docs[5].genre = Genre::telegram;
  docs[6].language = Language::fr;
  docs[7].language = Language::fr;

  DocFilter news;
  news.genres = {Genre::newspaper};
  const auto n = filter_subset(docs, news);
  EXPECT_EQ(n.size(), 10u);
  EXPECT_TRUE(std::is_sorted(n.begin(), n.end(), [](const auto& a, const auto& b) {
    return std::stoi(a.id.substr(1)) < std::stoi(b.id.substr(1));
  }));

  DocFilter fr;
  fr.languages = {Language::fr};
  fr.stances = {Stance::pro_kremlin, Stance::pro_western};
  const auto f = filter_subset(docs, fr);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].id, "d6");
  EXPECT_EQ(f[1].id, "d7");

  EXPECT_EQ(filter_subset(docs, DocFilter{}).size(), docs.size());
}

}  // namespace

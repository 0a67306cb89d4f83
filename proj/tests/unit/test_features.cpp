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
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stancekit/error.hpp"
#include "stancekit/features.hpp"

using namespace stancekit;

namespace {

const LexiconSet& lexicons() {
  static const LexiconSet set = load_lexicon_set(oracle::lexicon_manifest());
  return set;
}

const FeatureManifest& full() {
  static const FeatureManifest m = build_manifest(lexicons().glossary);
  return m;
}

double value(const FeatureVector& v, std::string_view name) {
  return v.values.at(*full().index_of(name));
}

Token tok(std::string s, std::string lemma, Pos pos, std::uint16_t morph = 0) {
  return Token{std::move(s), std::move(lemma), pos, morph};
}

// Hand annotation of "The bridge was destroyed because the army was not ready."
AnnotatedDocument bridge() {
  const auto pp = static_cast<std::uint16_t>(Morph::past_participle);
  AnnotatedDocument d;
  d.doc_id = "bridge";
  d.language = Language::en;
  d.sentences = {{tok("The", "the", Pos::DET), tok("bridge", "bridge", Pos::NOUN),
                  tok("was", "be", Pos::AUX), tok("destroyed", "destroy", Pos::VERB, pp),
                  tok("because", "because", Pos::SCONJ), tok("the", "the", Pos::DET),
                  tok("army", "army", Pos::NOUN), tok("was", "be", Pos::AUX),
                  tok("not", "not", Pos::PART), tok("ready", "ready", Pos::ADJ),
                  tok(".", ".", Pos::PUNCT)}};
  return d;
}

AnnotatedDocument concat_self(const AnnotatedDocument& d) {
  AnnotatedDocument out = d;
  out.sentences.insert(out.sentences.end(), d.sentences.begin(), d.sentences.end());
  return out;
}

TEST(Features, BridgeSentenceHandCounts) {
  const auto v = extract_features(bridge(), lexicons(), full());
  ASSERT_EQ(v.token_count, 11u);
  EXPECT_DOUBLE_EQ(value(v, "negations"), 1.0 / 11);
  // One passive auxiliary followed by a past participle ("was destroyed");
  // "was not ready" has no participle.
  EXPECT_DOUBLE_EQ(value(v, "passive_voice"), 1.0 / 11);
  EXPECT_DOUBLE_EQ(value(v, "clause_reason"), 1.0 / 11);
  EXPECT_DOUBLE_EQ(value(v, "clause_concession"), 0.0);
  EXPECT_DOUBLE_EQ(value(v, "avg_sentence_length"), 11.0);
  EXPECT_DOUBLE_EQ(value(v, "verbs_total"), 3.0 / 11);
}

TEST(Features, SingleKeywordToken) {
  AnnotatedDocument d;
  d.language = Language::en;
  d.sentences = {{tok("war", "war", Pos::NOUN)}};
  const auto v = extract_features(d, lexicons(), full());
  EXPECT_DOUBLE_EQ(value(v, "kw:war"), 1.0);
  EXPECT_DOUBLE_EQ(value(v, "avg_sentence_length"), 1.0);
  for (const auto& name : full().names)
    if (name.starts_with("clause_")) EXPECT_EQ(value(v, name), 0.0) << name;
}

TEST(Features, NoHitsGivesZeroListFeatures) {
  AnnotatedDocument d;
  d.language = Language::en;
  d.sentences = {{tok("zzq", "zzq", Pos::NOUN), tok("qqz", "qqz", Pos::NOUN)}};
  const auto v = extract_features(d, lexicons(), full());
  for (std::size_t i = 0; i < full().size(); ++i) {
    const auto& name = full().names[i];
    if (name == "avg_sentence_length") continue;
    const auto group = full().group(i);
    if (group == "surface" && (name == "adverbs" || name == "proper_nouns")) continue;
    if (name == "adjectives" || name == "verbs_total" || name == "action_verbs") continue;
    EXPECT_EQ(v.values[i], 0.0) << name;
  }
}

TEST(Features, SelfConcatenationPreservesEveryValue) {
  const AnnotatedDocument docs[] = {
      bridge(), ingest_annotations(oracle::golden_dir() / "en.conllu").front(),
      ingest_annotations(oracle::golden_dir() / "uk.conllu").front(),
      ingest_annotations(oracle::golden_dir() / "ru.conllu").front()};
  for (const auto& d : docs) {
    const auto a = extract_features(d, lexicons(), full());
    const auto b = extract_features(concat_self(d), lexicons(), full());
    EXPECT_EQ(b.token_count, 2 * a.token_count);
    for (std::size_t i = 0; i < a.values.size(); ++i)
      EXPECT_DOUBLE_EQ(a.values[i], b.values[i]) << full().names[i];
  }
}

TEST(Features, BoundedAndFinite) {
  HeuristicAnnotator ann(lexicons());
  const auto d = ann.annotate_text(
      "Why? Why not! They said the war, the invasion and the sanctions were cruel, but "
      "refugees fled because soldiers had been killed.", Language::en, "x");
  const auto v = extract_features(d, lexicons(), full());
  double emotion_sum = 0;
  for (std::size_t i = 0; i < full().size(); ++i) {
    ASSERT_TRUE(std::isfinite(v.values[i]));
    EXPECT_GE(v.values[i], 0.0);
    if (full().names[i] != "avg_sentence_length") EXPECT_LE(v.values[i], 1.0) << full().names[i];
    if (full().group(i) == "emotion") emotion_sum += v.values[i];
  }
  EXPECT_LE(emotion_sum, 8.0);
}

TEST(Features, ExtraNegationIncreasesRawCount) {
  auto d = bridge();
  const auto before = extract_features(d, lexicons(), full());
  d.sentences[0].insert(d.sentences[0].begin() + 2, tok("never", "never", Pos::ADV));
  const auto after = extract_features(d, lexicons(), full());
  EXPECT_GT(value(after, "negations") * after.token_count,
            value(before, "negations") * before.token_count);
}

TEST(Features, ShuffledManifestPermutesValues) {
  const auto d = ingest_annotations(oracle::golden_dir() / "en.conllu").front();
  const auto base = extract_features(d, lexicons(), full());
  FeatureManifest shuffled = full();
  std::mt19937 rng(5);
  std::shuffle(shuffled.names.begin(), shuffled.names.end(), rng);
  const auto v = extract_features(d, lexicons(), shuffled);
  ASSERT_EQ(v.values.size(), shuffled.size());
  for (std::size_t i = 0; i < shuffled.size(); ++i)
    EXPECT_EQ(v.values[i], base.values[*full().index_of(shuffled.names[i])]);
}

TEST(Features, UncoveredLanguageIsExtractionError) {
  LexiconSet partial;
  partial.glossary = lexicons().glossary;
  partial.languages.emplace(Language::en, lexicons().at(Language::en));
  auto d = bridge();
  d.language = Language::fr;
  EXPECT_THROW(extract_features(d, partial, full()), ExtractionError);
}

TEST(Manifest, ModesAndCounts) {
  const auto ling = feature_mode(full(), FeatureMode::linguistic_only);
  EXPECT_EQ(ling.size(), 43u);
  const auto both = feature_mode(full(), FeatureMode::linguistic_plus_keywords);
  EXPECT_EQ(both.size(), 43u + lexicons().glossary.size());
  EXPECT_EQ(feature_mode(ling, FeatureMode::linguistic_only), ling);
  EXPECT_EQ(feature_mode(both, FeatureMode::linguistic_plus_keywords), both);
  EXPECT_EQ(full().glossary_hash, lexicons().glossary.hash());
  for (std::size_t i = 0; i < 43; ++i) EXPECT_EQ(full().names[i], kLinguisticFeatures[i]);
}

TEST(Manifest, JsonRoundTrip) {
  std::ostringstream out;
  write_manifest(out, full());
  EXPECT_EQ(read_manifest(out.str()), full());
}

TEST(Batch, FailingRowReportedOthersKept) {
  auto bad = bridge();
  bad.doc_id = "bad";
  bad.language.reset();
  auto a = bridge(), c = bridge();
  a.doc_id = "a";
  c.doc_id = "c";
  const auto r = batch_extract({a, bad, c}, lexicons(), full());
  EXPECT_EQ(r.table.ids, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(r.table.matrix.rows(), 2u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].id, "bad");
}

TEST(Batch, EmptyAndDeterministicAcrossJobs) {
  const auto empty = batch_extract({}, lexicons(), full());
  EXPECT_EQ(empty.table.matrix.rows(), 0u);
  std::vector<AnnotatedDocument> docs;
  for (const char* name : {"en.conllu", "uk.conllu", "ru.conllu"})
    for (const auto& d : ingest_annotations(oracle::golden_dir() / name)) docs.push_back(d);
  for (int i = 0; i < 4; ++i) docs.push_back(docs[i % 3]);
  const auto one = batch_extract(docs, lexicons(), full(), 1);
  const auto four = batch_extract(docs, lexicons(), full(), 4);
  EXPECT_EQ(one.table.ids, four.table.ids);
  EXPECT_EQ(one.table.matrix.data(), four.table.matrix.data());
}

TEST(Batch, CsvRoundTrip) {
  auto a = bridge();
  a.doc_id = "a";
  const auto r = batch_extract({a}, lexicons(), full());
  std::stringstream buf;
  write_feature_csv(buf, r.table, 3);
  const auto back = read_feature_csv(buf);
  EXPECT_EQ(back.manifest, r.table.manifest);
  EXPECT_EQ(back.ids, r.table.ids);
  for (std::size_t j = 0; j < full().size(); ++j)
    EXPECT_DOUBLE_EQ(back.matrix(0, j), r.table.matrix(0, j));
}

}  // namespace

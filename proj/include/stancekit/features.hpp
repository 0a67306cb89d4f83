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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stancekit/annotate.hpp"
#include "stancekit/lexicon.hpp"
#include "stancekit/matrix.hpp"

namespace stancekit {

// Canonical order of the linguistic features.
inline constexpr std::array<std::string_view, 43> kLinguisticFeatures = {
    // surface / morphosyntax
    "negations", "adverbs", "avg_sentence_length", "proper_nouns", "passive_voice", "quotes",
    "conjunctions", "but_conjunction", "comparatives", "superlatives", "state_verbs",
    "personal_pronouns", "modal_verbs", "interrogatives",
    // emotion
    "anger", "fear", "anticipation", "trust", "surprise", "sadness", "joy", "disgust",
    "negative", "positive",
    // lexical
    "adjectives", "verbs_total", "action_verbs", "abstract_nouns", "money_symbols",
    "assertive_words", "second_person", "first_person_singular",
    // journalistic dictionaries
    "survey_words", "reporting_words", "discourse_markers", "claim_words", "high_modality",
    // clauses
    "clause_concession", "clause_reason", "clause_purpose", "clause_condition", "clause_time",
    "clause_relative"};

inline constexpr std::string_view kKeywordPrefix = "kw:";
inline constexpr std::string_view kEmbeddingPrefix = "emb_";

// Group tag for a feature name: surface, emotion, lexical, discourse, clause,
// keyword or embedding.
std::string_view feature_group(std::string_view name);

struct FeatureManifest {
  std::vector<std::string> names;
  std::string glossary_hash;

  std::size_t size() const { return names.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::string group(std::size_t i) const { return std::string(feature_group(names[i])); }

  bool operator==(const FeatureManifest&) const = default;
};

// 43 linguistic features followed by one "kw:<id>" slot per glossary entry.
FeatureManifest build_manifest(const KeywordGlossary& glossary);
FeatureManifest embedding_manifest(std::size_t dimension);

enum class FeatureMode { linguistic_only, linguistic_plus_keywords };
std::string_view to_string(FeatureMode m);
std::optional<FeatureMode> parse_feature_mode(std::string_view s);

FeatureManifest feature_mode(const FeatureManifest& manifest, FeatureMode mode);

struct FeatureVector {
  std::vector<double> values;  // aligned with the manifest
  std::size_t token_count = 0;
};

// Precompiles the per-language phrase matchers; immutable and shareable.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const LexiconSet& lexicons);
  ~FeatureExtractor();
  FeatureExtractor(FeatureExtractor&&) noexcept;

  // The document's language must be set and covered by the lexicons.
  FeatureVector extract(const AnnotatedDocument& doc, const FeatureManifest& manifest) const;

 private:
  struct Compiled;
  const LexiconSet& lexicons_;
  std::map<Language, std::unique_ptr<Compiled>> compiled_;
};

FeatureVector extract_features(const AnnotatedDocument& doc, const LexiconSet& lexicons,
                               const FeatureManifest& manifest);

struct RowError {
  std::string id;
  std::string message;
};

struct FeatureTable {
  FeatureManifest manifest;
  std::vector<std::string> ids;
  Matrix matrix;
};

struct BatchResult {
  FeatureTable table;
  std::vector<RowError> errors;
};

// Rows come back in input order; failing documents are skipped and reported.
BatchResult batch_extract(const std::vector<AnnotatedDocument>& docs,
                          const LexiconSet& lexicons, const FeatureManifest& manifest,
                          unsigned jobs = 1);

inline constexpr std::string_view kFeatureFormat = "stancekit-features";
inline constexpr int kFeatureVersion = 1;

// "# stancekit-features 1 glossary=<hash> seed=<seed>", then a header row
// "id,<names...>", then one row per document.
void write_feature_csv(std::ostream& out, const FeatureTable& table, std::uint64_t seed = 0);
FeatureTable read_feature_csv(std::istream& in);
FeatureTable read_feature_csv(const std::filesystem::path& path);

void write_manifest(std::ostream& out, const FeatureManifest& manifest);
FeatureManifest read_manifest(std::string_view json_text);

}  // namespace stancekit

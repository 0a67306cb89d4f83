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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stancekit/corpus.hpp"

namespace stancekit {

using Warnings = std::vector<std::string>;

// A lemma sequence; single words are one-element phrases.
using Phrase = std::vector<std::string>;

enum class Emotion : std::uint8_t {
  anger, fear, anticipation, trust, surprise, sadness, joy, disgust, negative, positive
};
inline constexpr std::size_t kEmotionCount = 10;
std::string_view to_string(Emotion e);
std::optional<Emotion> parse_emotion(std::string_view s);

class EmotionLexicon {
 public:
  using Mask = std::uint16_t;

  void add(const std::string& lemma, Emotion e);
  Mask lookup(std::string_view lemma) const;
  bool has(std::string_view lemma, Emotion e) const {
    return lookup(lemma) & (Mask{1} << static_cast<int>(e));
  }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, Mask, std::less<>>& entries() const { return entries_; }

  bool operator==(const EmotionLexicon&) const = default;

 private:
  std::map<std::string, Mask, std::less<>> entries_;
};

// Three columns: lemma, category, 0/1. Only flag=1 rows are kept.
EmotionLexicon parse_emotion_lexicon(std::string_view tsv, Warnings* warnings = nullptr);
EmotionLexicon load_emotion_lexicon(const std::filesystem::path& path,
                                    Warnings* warnings = nullptr);

// Names every language must provide. Extra lists (determiners, prepositions,
// auxiliaries, other_pronouns, comparatives, superlatives, past_participles,
// abbreviations) feed the heuristic tagger and tokenizer.
inline constexpr std::array<std::string_view, 25> kRequiredWordLists = {
    "negations",           "state_verbs",          "action_verb_markers",
    "abstract_noun_list",  "assertive_words",      "survey_words",
    "reporting_words",     "discourse_markers",    "claim_words",
    "high_modality_words", "modal_verbs",          "personal_pronouns",
    "second_person_forms", "first_singular_forms", "interrogative_words",
    "but_forms",           "coordinating_conjunctions", "passive_auxiliaries",
    "money_words",         "subordinators_concession", "subordinators_reason",
    "subordinators_purpose", "subordinators_condition", "subordinators_time",
    "relative_pronouns"};

class FunctionWordLists {
 public:
  void add(const std::string& list, Phrase phrase);
  const std::vector<Phrase>& list(std::string_view name) const;
  bool contains(std::string_view list, std::string_view lemma) const;
  bool has_list(std::string_view name) const;
  const std::map<std::string, std::vector<Phrase>, std::less<>>& lists() const {
    return lists_;
  }

  bool operator==(const FunctionWordLists& o) const { return lists_ == o.lists_; }

 private:
  std::map<std::string, std::vector<Phrase>, std::less<>> lists_;
  std::map<std::string, std::set<std::string, std::less<>>, std::less<>> singles_;
};

// Two columns: list name, phrase (space-separated lemmas).
FunctionWordLists parse_function_words(std::string_view tsv);

// Suffix-stripping lemmatizer with a form->lemma override table. Words that
// are already known lemmas (anything listed in the language's lexicons) are
// returned unchanged.
class Lemmatizer {
 public:
  struct Rule {
    std::string suffix;
    std::string replacement;
    std::size_t min_length;  // in code points, of the whole form
    std::vector<std::string> unless_endings;
  };

  Lemmatizer() = default;
  explicit Lemmatizer(Language lang);

  void add_override(const std::string& form, const std::string& lemma);
  void add_known(const std::string& lemma);
  // `word` may be any case; the result is lowercase.
  std::string lemma(std::string_view word) const;

  static std::vector<Rule> default_rules(Language lang);

 private:
  std::vector<Rule> rules_;
  std::map<std::string, std::string, std::less<>> overrides_;
  std::set<std::string, std::less<>> known_;
};

enum class StanceHint { kremlin_marker, western_marker, neutral };
std::string_view to_string(StanceHint h);

struct GlossaryEntry {
  std::string id;
  StanceHint hint = StanceHint::neutral;
  std::map<Language, std::vector<Phrase>> forms;

  bool operator==(const GlossaryEntry&) const = default;
};

class KeywordGlossary {
 public:
  const std::vector<GlossaryEntry>& entries() const { return entries_; }
  const GlossaryEntry* find(std::string_view id) const;
  std::size_t size() const { return entries_.size(); }
  // Stable digest over ids, hints and forms; binds feature manifests.
  std::string hash() const;

  void add(GlossaryEntry e);
  bool operator==(const KeywordGlossary& o) const { return entries_ == o.entries_; }

 private:
  std::vector<GlossaryEntry> entries_;  // sorted by id
};

// Four columns: canonical_id, stance_hint, language, phrase. Every entry
// must cover all of `required` languages. Phrases are lowercased and each
// word is passed through the language's lemmatizer when one is given.
KeywordGlossary parse_glossary(std::string_view tsv,
                               const std::map<Language, Lemmatizer>* lemmatizers = nullptr,
                               Warnings* warnings = nullptr,
                               const std::set<Language>& required = {std::begin(kLanguages),
                                                                     std::end(kLanguages)});
KeywordGlossary load_glossary(const std::filesystem::path& path,
                              const std::map<Language, Lemmatizer>* lemmatizers = nullptr,
                              Warnings* warnings = nullptr,
                              const std::set<Language>& required = {std::begin(kLanguages),
                                                                    std::end(kLanguages)});

struct LanguageResources {
  EmotionLexicon emotion;
  FunctionWordLists words;
  Lemmatizer lemmatizer;
};

struct LexiconSet {
  std::map<Language, LanguageResources> languages;
  KeywordGlossary glossary;

  const LanguageResources& at(Language l) const;
  bool covers(Language l) const { return languages.count(l) > 0; }
};

inline constexpr std::string_view kLexiconManifestFormat = "stancekit-lexicons";
inline constexpr int kLexiconManifestVersion = 1;

// JSON manifest:
//   {"format": "stancekit-lexicons", "version": 1, "glossary": "glossary.tsv",
//    "languages": {"en": {"emotion": ..., "function_words": ..., "lemmas": ...}}}
// Paths are relative to the manifest's directory. The glossary must cover
// every language listed in the manifest.
LexiconSet load_lexicon_set(const std::filesystem::path& manifest, Warnings* warnings = nullptr);

enum class Severity { info, warning, error };
std::string_view to_string(Severity s);

struct ValidationItem {
  Severity severity;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationItem> items;

  // True when nothing above info severity was found.
  bool clean() const;
  std::size_t count(Severity s) const;
};

ValidationReport validate_lexicon_set(const LexiconSet& set);

}  // namespace stancekit

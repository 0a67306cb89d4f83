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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stancekit/corpus.hpp"
#include "stancekit/lexicon.hpp"

namespace stancekit {

enum class Pos : std::uint8_t {
  NOUN, PROPN, VERB, AUX, ADJ, ADV, PRON, CONJ, SCONJ, DET, NUM, PUNCT, SYM, PART, INTJ, X
};
std::string_view to_string(Pos p);
std::optional<Pos> parse_pos(std::string_view s);

enum class Morph : std::uint16_t {
  comparative = 1 << 0,
  superlative = 1 << 1,
  past_participle = 1 << 2,
  modal = 1 << 3,
  personal = 1 << 4,
  second_person = 1 << 5,
  first_singular = 1 << 6,
  interrogative = 1 << 7,
};
inline constexpr std::size_t kMorphCount = 8;

struct Token {
  std::string surface;
  std::string lemma;
  Pos pos = Pos::X;
  std::uint16_t morph = 0;

  bool has(Morph m) const { return morph & static_cast<std::uint16_t>(m); }
  void set(Morph m) { morph |= static_cast<std::uint16_t>(m); }
  bool operator==(const Token&) const = default;
};

std::string morph_to_string(std::uint16_t flags);
// Comma-joined flag names or "_"; throws ParseError on an unknown name.
std::uint16_t parse_morph(std::string_view s);

using Sentence = std::vector<Token>;

struct AnnotatedDocument {
  std::string doc_id;
  std::optional<Language> language;
  std::vector<Sentence> sentences;

  std::size_t token_count() const;
  bool operator==(const AnnotatedDocument&) const = default;
};

// Surface tokens grouped into sentences, before tagging.
struct Skeleton {
  std::vector<std::vector<std::string>> sentences;
};

// Built-in per-language abbreviation guard list (lowercase, without the
// final period).
const std::set<std::string, std::less<>>& default_abbreviations(Language lang);

// Sentences end after a token made only of . ! ? or ... ; closing quotes and
// brackets right after the terminator stay in the same sentence. Words in the
// abbreviation list keep their trailing period as part of the token.
// Punctuation and symbols become their own tokens; apostrophes and hyphens
// inside words and separators inside numbers are kept.
Skeleton tokenize_and_segment(std::string_view text, Language language,
                              const std::set<std::string, std::less<>>* extra_abbreviations =
                                  nullptr);

// Deterministic lexicon + suffix-rule tagger. Immutable after construction.
class HeuristicAnnotator {
 public:
  explicit HeuristicAnnotator(const LexiconSet& lexicons);

  AnnotatedDocument annotate(const Skeleton& skeleton, Language language,
                             std::string doc_id = {}) const;
  AnnotatedDocument annotate_text(std::string_view text, Language language,
                                  std::string doc_id = {}) const;
  AnnotatedDocument annotate_document(const Document& doc) const;

 private:
  Token tag(const std::string& surface, bool sentence_initial,
            const LanguageResources& res, Language language) const;

  const LexiconSet& lexicons_;
};

inline constexpr std::string_view kAnnotationFormat = "stancekit-annotations";
inline constexpr int kAnnotationVersion = 1;

// One token per line: surface, lemma, POS, morph flags, sentence-local
// index (1-based), tab-separated. Blank line between sentences. Each document
// starts with "# doc_id = ..." and optionally "# language = ..". A leading
// "# format = stancekit-annotations N" line is version-checked when present.
// A seed, when given, is recorded as "# seed = N" after the format line.
void write_annotations(std::ostream& out, const std::vector<AnnotatedDocument>& docs,
                       std::optional<std::uint64_t> seed = std::nullopt);
std::vector<AnnotatedDocument> parse_annotations(std::istream& in);
std::vector<AnnotatedDocument> ingest_annotations(const std::filesystem::path& path);

}  // namespace stancekit

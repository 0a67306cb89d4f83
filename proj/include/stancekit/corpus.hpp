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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stancekit {

enum class Language { uk, ru, ro, en, fr };
enum class Genre { newspaper, telegram };
enum class Stance { pro_western, pro_kremlin };

inline constexpr Language kLanguages[] = {Language::uk, Language::ru, Language::ro,
                                          Language::en, Language::fr};

std::string_view to_string(Language l);
std::string_view to_string(Genre g);
std::string_view to_string(Stance s);
std::optional<Language> parse_language(std::string_view s);
std::optional<Genre> parse_genre(std::string_view s);
std::optional<Stance> parse_stance(std::string_view s);

// Binary encoding used by every model: pro_kremlin is the positive class.
inline int label_of(Stance s) { return s == Stance::pro_kremlin ? +1 : -1; }
inline Stance stance_of(int label) {
  return label > 0 ? Stance::pro_kremlin : Stance::pro_western;
}

using Date = std::chrono::year_month_day;
std::optional<Date> parse_date(std::string_view iso);
std::string to_string(Date d);

struct Document {
  std::string id;
  std::string text;
  Language language = Language::en;
  Genre genre = Genre::newspaper;
  std::string source;
  std::optional<Stance> stance;
  Date collected_on{};
};

// Outlet/channel name -> stance. Names compare case-insensitively after NFC.
class SourceStanceMap {
 public:
  // Two-column TSV: source, stance. Blank lines and '#' comments skipped.
  static SourceStanceMap load(const std::filesystem::path& path);
  static SourceStanceMap parse(std::string_view tsv);

  void add(std::string_view source, Stance stance);
  std::optional<Stance> lookup(std::string_view source) const;
  std::size_t size() const { return entries_.size(); }

 private:
  static std::string key(std::string_view source);
  std::map<std::string, Stance> entries_;
};

struct LoadStats {
  std::size_t records = 0;
  std::size_t duplicates_dropped = 0;
};

inline constexpr std::string_view kCorpusFormat = "stancekit-corpus";
inline constexpr int kCorpusVersion = 1;

// Line-delimited JSON records. An optional first line
// {"format":"stancekit-corpus","version":N} is checked against kCorpusVersion.
// With a map, every record's stance is taken from its source and an unknown
// source is an error; without one, an explicit "stance" field is kept.
std::vector<Document> parse_corpus(std::istream& in, const SourceStanceMap* map,
                                   LoadStats* stats = nullptr);
std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  const SourceStanceMap* map,
                                  LoadStats* stats = nullptr);
// A seed, when given, is recorded in the header line.
void write_corpus(std::ostream& out, const std::vector<Document>& docs,
                  std::optional<std::uint64_t> seed = std::nullopt);

struct Fold {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

struct SplitPlan {
  std::vector<Fold> folds;
  bool stratify_language = false;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

// Every document must be labeled. Members of each stratum (stance, plus
// language when requested) are shuffled with `seed` and dealt round-robin
// across folds, continuing the dealing position from one stratum to the next.
SplitPlan stratified_kfold(const std::vector<Document>& docs, int k,
                           std::uint64_t seed, bool stratify_language = false);

// Single stratified train/test split; `test_fraction` of each stratum
// (rounded) is held out.
SplitPlan stratified_holdout(const std::vector<Document>& docs, double test_fraction,
                             std::uint64_t seed, bool stratify_language = false);

struct DocFilter {
  std::set<Language> languages;
  std::set<Genre> genres;
  std::set<Stance> stances;

  bool matches(const Document& d) const;
  bool empty() const { return languages.empty() && genres.empty() && stances.empty(); }
};

// Empty sets do not constrain. Order is preserved.
std::vector<Document> filter_subset(const std::vector<Document>& docs,
                                    const DocFilter& filter);

std::string corpus_hash(const std::vector<Document>& docs);

}  // namespace stancekit

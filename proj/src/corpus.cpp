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

#include "stancekit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "stancekit/error.hpp"
#include "stancekit/io.hpp"
#include "stancekit/rng.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

using nlohmann::json;

std::string_view to_string(Language l) {
  switch (l) {
    case Language::uk: return "uk";
    case Language::ru: return "ru";
    case Language::ro: return "ro";
    case Language::en: return "en";
    case Language::fr: return "fr";
  }
  return "?";
}

std::string_view to_string(Genre g) {
  return g == Genre::newspaper ? "newspaper" : "telegram";
}

std::string_view to_string(Stance s) {
  return s == Stance::pro_kremlin ? "pro_kremlin" : "pro_western";
}

std::optional<Language> parse_language(std::string_view s) {
  for (Language l : kLanguages)
    if (to_string(l) == s) return l;
  return std::nullopt;
}

std::optional<Genre> parse_genre(std::string_view s) {
  if (s == "newspaper") return Genre::newspaper;
  if (s == "telegram") return Genre::telegram;
  return std::nullopt;
}

std::optional<Stance> parse_stance(std::string_view s) {
  if (s == "pro_kremlin") return Stance::pro_kremlin;
  if (s == "pro_western") return Stance::pro_western;
  return std::nullopt;
}

std::optional<Date> parse_date(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> int {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (iso[i] < '0' || iso[i] > '9') return -1;
      v = v * 10 + (iso[i] - '0');
    }
    return v;
  };
  int y = num(0, 4), m = num(5, 2), d = num(8, 2);
  if (y < 0 || m < 0 || d < 0) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string to_string(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

// --- SourceStanceMap ---

std::string SourceStanceMap::key(std::string_view source) {
  return text::lower(text::nfc(text::trim(source)));
}

void SourceStanceMap::add(std::string_view source, Stance stance) {
  auto [it, inserted] = entries_.emplace(key(source), stance);
  if (!inserted)
    throw ValidationError("source listed more than once: " + std::string(source));
}

std::optional<Stance> SourceStanceMap::lookup(std::string_view source) const {
  auto it = entries_.find(key(source));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

SourceStanceMap SourceStanceMap::parse(std::string_view tsv) {
  SourceStanceMap map;
  std::size_t lineno = 0;
  for (const auto& raw : text::split(tsv, '\n')) {
    ++lineno;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2) throw ParseError("expected 2 tab-separated columns", lineno);
    auto stance = parse_stance(text::lower(text::trim(cols[1])));
    if (!stance) throw ParseError("unknown stance '" + cols[1] + "'", lineno);
    try {
      map.add(cols[0], *stance);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return map;
}

SourceStanceMap SourceStanceMap::load(const std::filesystem::path& path) {
  return parse(io::read_file(path));
}

// --- corpus file ---

namespace {

std::string required_string(const json& rec, const char* field, std::size_t lineno) {
  auto it = rec.find(field);
  if (it == rec.end()) throw ParseError(std::string("missing field '") + field + "'", lineno);
  if (!it->is_string())
    throw ParseError(std::string("field '") + field + "' must be a string", lineno);
  return it->get<std::string>();
}

}  // namespace

std::vector<Document> parse_corpus(std::istream& in, const SourceStanceMap* map,
                                   LoadStats* stats) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> texts;
  LoadStats local;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), lineno);
    }
    if (!rec.is_object()) throw ParseError("record is not an object", lineno);
    if (rec.contains("format")) {
      if (rec["format"] != kCorpusFormat)
        throw VersionError("not a stancekit corpus header", lineno);
      if (!rec.contains("version") || rec["version"] != kCorpusVersion)
        throw VersionError("corpus format version " + rec.value("version", json()).dump() +
                               ", expected " + std::to_string(kCorpusVersion),
                           lineno);
      continue;
    }
    ++local.records;
    Document d;
    d.id = required_string(rec, "id", lineno);
    std::string raw_text = required_string(rec, "text", lineno);
    auto lang = required_string(rec, "language", lineno);
    auto genre = required_string(rec, "genre", lineno);
    d.source = required_string(rec, "source", lineno);
    auto date = required_string(rec, "collected_on", lineno);

    auto l = parse_language(lang);
    if (!l) throw ParseError("unknown language '" + lang + "'", lineno);
    d.language = *l;
    auto g = parse_genre(genre);
    if (!g) throw ParseError("unknown genre '" + genre + "'", lineno);
    d.genre = *g;
    auto dt = parse_date(date);
    if (!dt) throw ParseError("collected_on is not an ISO-8601 date: '" + date + "'", lineno);
    d.collected_on = *dt;

    d.text = text::trim(text::nfc(raw_text));
    if (d.text.empty())
      throw ValidationError("document '" + d.id + "' has empty text (line " +
                            std::to_string(lineno) + ")");

    if (map) {
      auto s = map->lookup(d.source);
      if (!s)
        throw ValidationError("document '" + d.id + "': unknown source '" + d.source + "'");
      d.stance = s;
    } else if (rec.contains("stance") && !rec["stance"].is_null()) {
      auto st = rec["stance"].is_string() ? parse_stance(rec["stance"].get<std::string>())
                                          : std::nullopt;
      if (!st) throw ParseError("invalid stance " + rec["stance"].dump(), lineno);
      d.stance = st;
    }

    if (!texts.insert(d.text).second) {
      ++local.duplicates_dropped;
      continue;
    }
    if (!ids.insert(d.id).second)
      throw ValidationError("duplicate document id '" + d.id + "'");
    docs.push_back(std::move(d));
  }
  if (stats) *stats = local;
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  const SourceStanceMap* map, LoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open corpus " + path.string());
  return parse_corpus(in, map, stats);
}

void write_corpus(std::ostream& out, const std::vector<Document>& docs,
                  std::optional<std::uint64_t> seed) {
  json header = {{"format", kCorpusFormat}, {"version", kCorpusVersion}};
  if (seed) header["seed"] = *seed;
  out << header.dump() << '\n';
  for (const auto& d : docs) {
    json rec = {{"id", d.id},
                {"text", d.text},
                {"language", to_string(d.language)},
                {"genre", to_string(d.genre)},
                {"source", d.source},
                {"collected_on", to_string(d.collected_on)}};
    if (d.stance) rec["stance"] = to_string(*d.stance);
    out << rec.dump() << '\n';
  }
}

// --- splitting ---

namespace {

using Strata = std::map<std::string, std::vector<std::size_t>>;

Strata build_strata(const std::vector<Document>& docs, bool stratify_language) {
  Strata strata;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    if (!d.stance)
      throw StratificationError("document '" + d.id + "' is unlabeled");
    std::string key(to_string(*d.stance));
    if (stratify_language) key += "/" + std::string(to_string(d.language));
    strata[key].push_back(i);
  }
  return strata;
}

void check_class_sizes(const std::vector<Document>& docs, std::size_t minimum) {
  std::map<Stance, std::size_t> counts;
  for (const auto& d : docs)
    if (d.stance) ++counts[*d.stance];
  if (counts.size() < 2)
    throw StratificationError("stratified split needs both stances present");
  for (auto [s, n] : counts)
    if (n < minimum)
      throw StratificationError("class " + std::string(to_string(s)) + " has " +
                                std::to_string(n) + " members, fewer than " +
                                std::to_string(minimum));
}

std::vector<std::string> ids_in_order(const std::vector<Document>& docs,
                                      const std::vector<std::size_t>& idx) {
  auto sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> out;
  out.reserve(sorted.size());
  for (auto i : sorted) out.push_back(docs[i].id);
  return out;
}

}  // namespace

SplitPlan stratified_kfold(const std::vector<Document>& docs, int k, std::uint64_t seed,
                           bool stratify_language) {
  if (k < 2) throw StratificationError("k must be at least 2");
  auto strata = build_strata(docs, stratify_language);
  check_class_sizes(docs, static_cast<std::size_t>(k));

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
  std::size_t pos = 0;
  for (auto& [key, idx] : strata) {
    rng.shuffle(idx);
    for (auto i : idx) members[pos++ % static_cast<std::size_t>(k)].push_back(i);
  }

  SplitPlan plan;
  plan.seed = seed;
  plan.stratify_language = stratify_language;
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train;
    for (int g = 0; g < k; ++g)
      if (g != f) train.insert(train.end(), members[g].begin(), members[g].end());
    plan.folds.push_back({ids_in_order(docs, train), ids_in_order(docs, members[f])});
  }
  return plan;
}

SplitPlan stratified_holdout(const std::vector<Document>& docs, double test_fraction,
                             std::uint64_t seed, bool stratify_language) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw StratificationError("holdout fraction must lie in (0, 1)");
  auto strata = build_strata(docs, stratify_language);
  check_class_sizes(docs, 2);

  Rng rng(seed);
  std::vector<std::size_t> train, test;
  for (auto& [key, idx] : strata) {
    rng.shuffle(idx);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * idx.size()));
    n_test = std::min(n_test, idx.size() - (idx.size() > 1 ? 1 : 0));
    for (std::size_t j = 0; j < idx.size(); ++j)
      (j < n_test ? test : train).push_back(idx[j]);
  }
  SplitPlan plan;
  plan.seed = seed;
  plan.stratify_language = stratify_language;
  plan.folds.push_back({ids_in_order(docs, train), ids_in_order(docs, test)});
  return plan;
}

std::string SplitPlan::to_json() const {
  json j;
  j["seed"] = seed;
  j["stratify_on"] = stratify_language ? json::array({"stance", "language"})
                                       : json::array({"stance"});
  j["folds"] = json::array();
  for (const auto& f : folds)
    j["folds"].push_back({{"train", f.train_ids}, {"test", f.test_ids}});
  return j.dump();
}

bool DocFilter::matches(const Document& d) const {
  if (!languages.empty() && !languages.count(d.language)) return false;
  if (!genres.empty() && !genres.count(d.genre)) return false;
  if (!stances.empty() && (!d.stance || !stances.count(*d.stance))) return false;
  return true;
}

std::vector<Document> filter_subset(const std::vector<Document>& docs,
                                    const DocFilter& filter) {
  std::vector<Document> out;
  for (const auto& d : docs)
    if (filter.matches(d)) out.push_back(d);
  return out;
}

std::string corpus_hash(const std::vector<Document>& docs) {
  std::uint64_t h = text::fnv1a("");
  for (const auto& d : docs) {
    h = text::fnv1a(d.id, h);
    h = text::fnv1a(d.stance ? to_string(*d.stance) : "-", h);
    h = text::fnv1a(d.text, h);
  }
  return text::hex64(h);
}

}  // namespace stancekit

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

#include "stancekit/features.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "stancekit/error.hpp"
#include "stancekit/io.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

namespace {

enum Feat : std::size_t {
  kNegations, kAdverbs, kAvgSentenceLength, kProperNouns, kPassive, kQuotes, kConjunctions,
  kBut, kComparatives, kSuperlatives, kStateVerbs, kPersonalPronouns, kModalVerbs,
  kInterrogatives,
  kEmotionBase,  // 10 emotion slots in Emotion order
  kAdjectives = kEmotionBase + kEmotionCount, kVerbsTotal, kActionVerbs, kAbstractNouns,
  kMoney, kAssertive, kSecondPerson, kFirstSingular,
  kSurvey, kReporting, kDiscourse, kClaim, kHighModality,
  kClauseConcession, kClauseReason, kClausePurpose, kClauseCondition, kClauseTime,
  kClauseRelative,
  kLinguisticCount
};
static_assert(kLinguisticCount == kLinguisticFeatures.size());

// Longest-match-first, non-overlapping phrase matcher over one sentence.
// A phrase word matches a token when it equals the token's lemma or its
// lowercased surface.
class PhraseMatcher {
 public:
  void add(const Phrase& p, std::size_t label) {
    if (p.empty()) return;
    auto& bucket = by_first_[p.front()];
    bucket.push_back({p, label});
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  }

  template <typename F>
  void match(const std::vector<std::string>& lemmas, const std::vector<std::string>& lowers,
             F&& on_match) const {
    std::size_t i = 0;
    while (i < lemmas.size()) {
      std::size_t len = try_at(lemmas, lowers, i, on_match);
      i += len ? len : 1;
    }
  }

 private:
  template <typename F>
  std::size_t try_at(const std::vector<std::string>& lemmas,
                     const std::vector<std::string>& lowers, std::size_t i, F& on_match) const {
    const std::vector<std::pair<Phrase, std::size_t>>* cands[2] = {nullptr, nullptr};
    if (auto it = by_first_.find(lemmas[i]); it != by_first_.end()) cands[0] = &it->second;
    if (lowers[i] != lemmas[i])
      if (auto it = by_first_.find(lowers[i]); it != by_first_.end()) cands[1] = &it->second;
    const std::pair<Phrase, std::size_t>* best = nullptr;
    for (auto* bucket : cands) {
      if (!bucket) continue;
      for (const auto& cand : *bucket) {
        const auto& p = cand.first;
        if (best && p.size() <= best->first.size()) break;
        if (i + p.size() > lemmas.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < p.size() && ok; ++k)
          ok = p[k] == lemmas[i + k] || p[k] == lowers[i + k];
        if (ok) {
          best = &cand;
          break;
        }
      }
    }
    if (!best) return 0;
    on_match(best->second, i);
    return best->first.size();
  }

  std::unordered_map<std::string, std::vector<std::pair<Phrase, std::size_t>>> by_first_;
};

// Linguistic slots counted via a word list, excluding clauses.
constexpr std::pair<Feat, std::string_view> kListFeatures[] = {
    {kNegations, "negations"},
    {kBut, "but_forms"},
    {kStateVerbs, "state_verbs"},
    {kAbstractNouns, "abstract_noun_list"},
    {kMoney, "money_words"},
    {kAssertive, "assertive_words"},
    {kSurvey, "survey_words"},
    {kReporting, "reporting_words"},
    {kDiscourse, "discourse_markers"},
    {kClaim, "claim_words"},
    {kHighModality, "high_modality_words"},
    {kClauseRelative, "relative_pronouns"},
};

constexpr std::pair<Feat, std::string_view> kClauseLists[] = {
    {kClauseConcession, "subordinators_concession"},
    {kClauseReason, "subordinators_reason"},
    {kClausePurpose, "subordinators_purpose"},
    {kClauseCondition, "subordinators_condition"},
    {kClauseTime, "subordinators_time"},
};

bool is_money_symbol(std::string_view s) {
  return s == "$" || s == "€" || s == "£" || s == "₴" || s == "₽";
}

bool is_opening_quote(std::string_view s) {
  return s == "«" || s == "“" || s == "„" || s == "‘";
}

bool is_straight_quote(std::string_view s) { return s == "\"" || s == "'"; }

}  // namespace

struct FeatureExtractor::Compiled {
  std::vector<std::pair<Feat, PhraseMatcher>> lists;
  PhraseMatcher clauses;  // label = Feat
  PhraseMatcher keywords;  // label = glossary entry index
  const LanguageResources* res = nullptr;
};

std::string_view feature_group(std::string_view name) {
  if (name.starts_with(kKeywordPrefix)) return "keyword";
  if (name.starts_with(kEmbeddingPrefix)) return "embedding";
  auto it = std::find(kLinguisticFeatures.begin(), kLinguisticFeatures.end(), name);
  if (it == kLinguisticFeatures.end()) return "unknown";
  auto i = static_cast<std::size_t>(it - kLinguisticFeatures.begin());
  if (i < kEmotionBase) return "surface";
  if (i < kAdjectives) return "emotion";
  if (i < kSurvey) return "lexical";
  if (i < kClauseConcession) return "discourse";
  return "clause";
}

std::optional<std::size_t> FeatureManifest::index_of(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

FeatureManifest build_manifest(const KeywordGlossary& glossary) {
  FeatureManifest m;
  for (auto n : kLinguisticFeatures) m.names.emplace_back(n);
  for (const auto& e : glossary.entries()) m.names.push_back(std::string(kKeywordPrefix) + e.id);
  m.glossary_hash = glossary.hash();
  return m;
}

FeatureManifest embedding_manifest(std::size_t dimension) {
  FeatureManifest m;
  for (std::size_t i = 0; i < dimension; ++i)
    m.names.push_back(std::string(kEmbeddingPrefix) + std::to_string(i));
  return m;
}

std::string_view to_string(FeatureMode m) {
  return m == FeatureMode::linguistic_only ? "linguistic_only" : "linguistic_plus_keywords";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view s) {
  if (s == "linguistic_only") return FeatureMode::linguistic_only;
  if (s == "linguistic_plus_keywords") return FeatureMode::linguistic_plus_keywords;
  return std::nullopt;
}

FeatureManifest feature_mode(const FeatureManifest& manifest, FeatureMode mode) {
  if (mode == FeatureMode::linguistic_plus_keywords) return manifest;
  FeatureManifest out;
  out.glossary_hash = manifest.glossary_hash;
  for (const auto& n : manifest.names)
    if (!n.starts_with(kKeywordPrefix)) out.names.push_back(n);
  return out;
}

// --- extraction ---

FeatureExtractor::FeatureExtractor(const LexiconSet& lexicons) : lexicons_(lexicons) {
  for (const auto& [lang, res] : lexicons.languages) {
    auto c = std::make_unique<Compiled>();
    c->res = &res;
    for (auto [feat, list] : kListFeatures) {
      PhraseMatcher m;
      for (const auto& p : res.words.list(list)) m.add(p, feat);
      c->lists.emplace_back(feat, std::move(m));
    }
    for (auto [feat, list] : kClauseLists)
      for (const auto& p : res.words.list(list)) c->clauses.add(p, feat);
    const auto& entries = lexicons.glossary.entries();
    for (std::size_t e = 0; e < entries.size(); ++e)
      if (auto it = entries[e].forms.find(lang); it != entries[e].forms.end())
        for (const auto& p : it->second) c->keywords.add(p, e);
    compiled_.emplace(lang, std::move(c));
  }
}

FeatureExtractor::~FeatureExtractor() = default;
FeatureExtractor::FeatureExtractor(FeatureExtractor&&) noexcept = default;

FeatureVector FeatureExtractor::extract(const AnnotatedDocument& doc,
                                        const FeatureManifest& manifest) const {
  if (!doc.language)
    throw ExtractionError("document '" + doc.doc_id + "' has no language");
  auto cit = compiled_.find(*doc.language);
  if (cit == compiled_.end())
    throw ExtractionError("document '" + doc.doc_id + "': no lexicon coverage for language '" +
                          std::string(to_string(*doc.language)) + "'");
  const Compiled& c = *cit->second;
  const auto& words = c.res->words;
  const auto& emotion = c.res->emotion;

  std::array<double, kLinguisticCount> counts{};
  std::vector<double> keyword_counts(lexicons_.glossary.size(), 0.0);
  std::size_t n_tokens = 0;
  std::size_t n_sentences = 0;

  auto in_list = [&](std::string_view list, const Token& t, const std::string& lower) {
    return words.contains(list, t.lemma) || words.contains(list, lower);
  };

  for (const auto& sent : doc.sentences) {
    if (sent.empty()) continue;
    ++n_sentences;
    n_tokens += sent.size();
    std::vector<std::string> lemmas, lowers;
    lemmas.reserve(sent.size());
    lowers.reserve(sent.size());
    for (const auto& t : sent) {
      lemmas.push_back(t.lemma);
      lowers.push_back(text::lower(t.surface));
    }

    std::size_t straight_quotes = 0;
    std::vector<bool> participle_used(sent.size(), false);
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const Token& t = sent[i];
      const std::string& lower = lowers[i];
      switch (t.pos) {
        case Pos::ADV: counts[kAdverbs] += 1; break;
        case Pos::PROPN: counts[kProperNouns] += 1; break;
        case Pos::CONJ: counts[kConjunctions] += 1; break;
        case Pos::ADJ: counts[kAdjectives] += 1; break;
        case Pos::AUX: counts[kVerbsTotal] += 1; break;
        case Pos::VERB:
          counts[kVerbsTotal] += 1;
          if (!in_list("state_verbs", t, lower)) counts[kActionVerbs] += 1;
          break;
        case Pos::SYM:
          if (is_money_symbol(t.surface)) counts[kMoney] += 1;
          break;
        default: break;
      }
      if (t.has(Morph::comparative)) counts[kComparatives] += 1;
      if (t.has(Morph::superlative)) counts[kSuperlatives] += 1;
      if (t.has(Morph::second_person)) counts[kSecondPerson] += 1;
      if (t.has(Morph::first_singular)) counts[kFirstSingular] += 1;
      if (t.has(Morph::personal) || in_list("personal_pronouns", t, lower))
        counts[kPersonalPronouns] += 1;
      if (t.has(Morph::modal) || in_list("modal_verbs", t, lower)) counts[kModalVerbs] += 1;

      if (is_opening_quote(t.surface)) {
        counts[kQuotes] += 1;
      } else if (is_straight_quote(t.surface)) {
        if (straight_quotes++ % 2 == 0) counts[kQuotes] += 1;
      }

      auto mask = emotion.lookup(t.lemma);
      if (!mask && lower != t.lemma) mask = emotion.lookup(lower);
      for (std::size_t e = 0; e < kEmotionCount; ++e)
        if (mask & (1u << e)) counts[kEmotionBase + e] += 1;

      if (in_list("passive_auxiliaries", t, lower)) {
        for (std::size_t j = i + 1; j < sent.size() && j <= i + 3; ++j) {
          if (sent[j].has(Morph::past_participle) && !participle_used[j]) {
            participle_used[j] = true;
            counts[kPassive] += 1;
            break;
          }
        }
      }
    }

    // Interrogatives: a sentence ending in '?' plus one opened by an
    // interrogative word.
    for (std::size_t i = sent.size(); i-- > 0;) {
      const auto& s = sent[i].surface;
      if (is_straight_quote(s) || s == "»" || s == "”" || s == "’" || s == ")") continue;
      if (sent[i].pos == Pos::PUNCT && s.find('?') != std::string::npos)
        counts[kInterrogatives] += 1;
      break;
    }
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (!text::has_alpha(sent[i].surface)) continue;
      if (in_list("interrogative_words", sent[i], lowers[i])) counts[kInterrogatives] += 1;
      break;
    }

    for (const auto& [feat, matcher] : c.lists)
      matcher.match(lemmas, lowers, [&](std::size_t label, std::size_t) { counts[label] += 1; });
    c.clauses.match(lemmas, lowers, [&](std::size_t label, std::size_t) { counts[label] += 1; });
    c.keywords.match(lemmas, lowers,
                     [&](std::size_t entry, std::size_t) { keyword_counts[entry] += 1; });
  }

  if (n_tokens == 0) throw ExtractionError("document '" + doc.doc_id + "' has no tokens");
  const double n = static_cast<double>(n_tokens);
  std::array<double, kLinguisticCount> values{};
  for (std::size_t i = 0; i < kLinguisticCount; ++i) values[i] = counts[i] / n;
  values[kAvgSentenceLength] = n / static_cast<double>(n_sentences);

  FeatureVector fv;
  fv.token_count = n_tokens;
  fv.values.reserve(manifest.size());
  for (const auto& name : manifest.names) {
    if (name.starts_with(kKeywordPrefix)) {
      const auto id = std::string_view(name).substr(kKeywordPrefix.size());
      const auto& entries = lexicons_.glossary.entries();
      auto it = std::lower_bound(entries.begin(), entries.end(), id,
                                 [](const GlossaryEntry& e, std::string_view k) { return e.id < k; });
      if (it == entries.end() || it->id != id)
        throw ContractError("manifest keyword '" + std::string(id) + "' is not in the glossary");
      fv.values.push_back(keyword_counts[static_cast<std::size_t>(it - entries.begin())] / n);
      continue;
    }
    auto it = std::find(kLinguisticFeatures.begin(), kLinguisticFeatures.end(), name);
    if (it == kLinguisticFeatures.end())
      throw ContractError("manifest feature '" + name + "' is not a linguistic feature");
    fv.values.push_back(values[static_cast<std::size_t>(it - kLinguisticFeatures.begin())]);
  }
  return fv;
}

FeatureVector extract_features(const AnnotatedDocument& doc, const LexiconSet& lexicons,
                               const FeatureManifest& manifest) {
  return FeatureExtractor(lexicons).extract(doc, manifest);
}

BatchResult batch_extract(const std::vector<AnnotatedDocument>& docs,
                          const LexiconSet& lexicons, const FeatureManifest& manifest,
                          unsigned jobs) {
  FeatureExtractor extractor(lexicons);
  std::vector<std::optional<FeatureVector>> rows(docs.size());
  std::vector<std::string> errors(docs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < docs.size(); i = next++) {
      try {
        rows[i] = extractor.extract(docs[i], manifest);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(docs.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  BatchResult out;
  out.table.manifest = manifest;
  out.table.matrix = Matrix(0, manifest.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (rows[i]) {
      out.table.ids.push_back(docs[i].doc_id);
      out.table.matrix.append_row(rows[i]->values);
    } else {
      out.errors.push_back({docs[i].doc_id, errors[i]});
    }
  }
  return out;
}

// --- files ---

void write_feature_csv(std::ostream& out, const FeatureTable& table, std::uint64_t seed) {
  out << "# " << kFeatureFormat << ' ' << kFeatureVersion
      << " glossary=" << (table.manifest.glossary_hash.empty() ? "-" : table.manifest.glossary_hash)
      << " seed=" << seed << '\n';
  out << "id";
  for (const auto& n : table.manifest.names) out << ',' << io::csv_escape(n);
  out << '\n';
  for (std::size_t r = 0; r < table.matrix.rows(); ++r) {
    out << io::csv_escape(table.ids[r]);
    for (double v : table.matrix.row(r)) out << ',' << io::format_double(v);
    out << '\n';
  }
}

FeatureTable read_feature_csv(std::istream& in) {
  FeatureTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto parts = text::split_ws(line.substr(1));
      if (parts.size() >= 2 && parts[0] == kFeatureFormat) {
        if (parts[1] != std::to_string(kFeatureVersion))
          throw VersionError("feature file version " + parts[1] + ", expected " +
                                 std::to_string(kFeatureVersion),
                             lineno);
        for (const auto& p : parts)
          if (p.starts_with("glossary=") && p != "glossary=-") t.manifest.glossary_hash = p.substr(9);
      } else if (lineno == 1) {
        throw VersionError("not a stancekit feature file", lineno);
      }
      continue;
    }
    auto cols = io::csv_split(line);
    if (!header_seen) {
      if (cols.empty() || cols[0] != "id") throw ParseError("first column must be 'id'", lineno);
      t.manifest.names.assign(cols.begin() + 1, cols.end());
      t.matrix = Matrix(0, t.manifest.size());
      header_seen = true;
      continue;
    }
    if (cols.size() != t.manifest.size() + 1)
      throw ParseError("expected " + std::to_string(t.manifest.size() + 1) + " columns, found " +
                           std::to_string(cols.size()),
                       lineno);
    std::vector<double> row;
    row.reserve(t.manifest.size());
    try {
      for (std::size_t j = 1; j < cols.size(); ++j) row.push_back(io::parse_double(cols[j]));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    t.ids.push_back(cols[0]);
    t.matrix.append_row(row);
  }
  if (!header_seen) throw ParseError("feature file has no header row");
  return t;
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_feature_csv(in);
}

void write_manifest(std::ostream& out, const FeatureManifest& manifest) {
  nlohmann::json j;
  j["format"] = "stancekit-manifest";
  j["version"] = 1;
  j["glossary_hash"] = manifest.glossary_hash;
  j["features"] = nlohmann::json::array();
  for (std::size_t i = 0; i < manifest.size(); ++i)
    j["features"].push_back({{"name", manifest.names[i]}, {"group", manifest.group(i)}});
  out << j.dump(2) << '\n';
}

FeatureManifest read_manifest(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  if (j.value("format", "") != "stancekit-manifest") throw VersionError("not a manifest file");
  if (j.value("version", 0) != 1) throw VersionError("unsupported manifest version");
  FeatureManifest m;
  m.glossary_hash = j.value("glossary_hash", "");
  for (const auto& f : j.at("features")) m.names.push_back(f.at("name").get<std::string>());
  return m;
}

}  // namespace stancekit

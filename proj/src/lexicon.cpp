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

#include "stancekit/lexicon.hpp"

#include <algorithm>

#include "json.hpp"
#include "stancekit/error.hpp"
#include "stancekit/io.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

namespace {

constexpr std::string_view kEmotionNames[kEmotionCount] = {
    "anger", "fear", "anticipation", "trust", "surprise",
    "sadness", "joy", "disgust", "negative", "positive"};

// Iterates non-blank, non-comment lines, lowercased and NFC-normalized.
template <typename F>
void for_each_row(std::string_view tsv, F&& f) {
  std::size_t lineno = 0;
  for (auto line : text::split(tsv, '\n')) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto cols = text::split(text::lower(text::nfc(line)), '\t');
    for (auto& c : cols) c = text::trim(c);
    f(cols, lineno);
  }
}

Phrase to_phrase(std::string_view s) { return text::split_ws(s); }

}  // namespace

std::string_view to_string(Emotion e) { return kEmotionNames[static_cast<int>(e)]; }

std::optional<Emotion> parse_emotion(std::string_view s) {
  for (std::size_t i = 0; i < kEmotionCount; ++i)
    if (kEmotionNames[i] == s) return static_cast<Emotion>(i);
  return std::nullopt;
}

// --- EmotionLexicon ---

void EmotionLexicon::add(const std::string& lemma, Emotion e) {
  entries_[lemma] |= static_cast<Mask>(Mask{1} << static_cast<int>(e));
}

EmotionLexicon::Mask EmotionLexicon::lookup(std::string_view lemma) const {
  auto it = entries_.find(lemma);
  return it == entries_.end() ? Mask{0} : it->second;
}

EmotionLexicon parse_emotion_lexicon(std::string_view tsv, Warnings* warnings) {
  EmotionLexicon lex;
  std::set<std::pair<std::string, int>> seen;
  std::size_t rows = 0;
  for_each_row(tsv, [&](const std::vector<std::string>& cols, std::size_t lineno) {
    if (cols.size() != 3) throw ParseError("expected 3 tab-separated columns", lineno);
    auto emo = parse_emotion(cols[1]);
    if (!emo) throw ParseError("unknown emotion category '" + cols[1] + "'", lineno);
    if (cols[2] != "0" && cols[2] != "1")
      throw ParseError("association flag must be 0 or 1", lineno);
    if (cols[0].empty()) throw ParseError("empty lemma", lineno);
    if (!seen.emplace(cols[0], static_cast<int>(*emo)).second)
      throw ParseError("duplicate (lemma, category) pair: " + cols[0] + "/" + cols[1], lineno);
    ++rows;
    if (cols[2] == "1") lex.add(cols[0], *emo);
  });
  if (rows == 0 && warnings)
    warnings->push_back("WARNING: emotion lexicon is empty; all emotion features will be 0");
  return lex;
}

EmotionLexicon load_emotion_lexicon(const std::filesystem::path& path, Warnings* warnings) {
  return parse_emotion_lexicon(io::read_file(path), warnings);
}

// --- FunctionWordLists ---

void FunctionWordLists::add(const std::string& list, Phrase phrase) {
  if (phrase.empty()) return;
  auto& v = lists_[list];
  if (std::find(v.begin(), v.end(), phrase) != v.end()) return;
  if (phrase.size() == 1) singles_[list].insert(phrase.front());
  v.push_back(std::move(phrase));
}

const std::vector<Phrase>& FunctionWordLists::list(std::string_view name) const {
  static const std::vector<Phrase> kEmpty;
  auto it = lists_.find(name);
  return it == lists_.end() ? kEmpty : it->second;
}

bool FunctionWordLists::contains(std::string_view list, std::string_view lemma) const {
  auto it = singles_.find(list);
  return it != singles_.end() && it->second.count(lemma) > 0;
}

bool FunctionWordLists::has_list(std::string_view name) const {
  return !list(name).empty();
}

FunctionWordLists parse_function_words(std::string_view tsv) {
  FunctionWordLists lists;
  for_each_row(tsv, [&](const std::vector<std::string>& cols, std::size_t lineno) {
    if (cols.size() != 2) throw ParseError("expected 2 tab-separated columns", lineno);
    if (cols[0].empty() || cols[1].empty()) throw ParseError("empty field", lineno);
    lists.add(cols[0], to_phrase(cols[1]));
  });
  return lists;
}

// --- Lemmatizer ---

std::vector<Lemmatizer::Rule> Lemmatizer::default_rules(Language lang) {
  switch (lang) {
    case Language::en:
      return {{"ies", "y", 5, {}},
              {"sses", "ss", 5, {}},
              {"s", "", 5, {"ss", "us", "is", "ous", "ws", "ics"}}};
    case Language::fr:
      return {{"aux", "al", 5, {}}, {"s", "", 5, {"ss", "us", "is"}}};
    case Language::ro:
      return {{"ului", "", 7, {}}, {"ul", "", 6, {}}};
    case Language::uk:
    case Language::ru:
      // Slavic inflection is left to the override table.
      return {};
  }
  return {};
}

Lemmatizer::Lemmatizer(Language lang) : rules_(default_rules(lang)) {}

void Lemmatizer::add_override(const std::string& form, const std::string& lemma) {
  overrides_[form] = lemma;
}

void Lemmatizer::add_known(const std::string& lemma) { known_.insert(lemma); }

std::string Lemmatizer::lemma(std::string_view word) const {
  std::string w = text::lower(word);
  if (auto it = overrides_.find(w); it != overrides_.end()) return it->second;
  if (known_.count(w)) return w;
  const std::size_t len = text::length(w);
  for (const auto& r : rules_) {
    if (len < r.min_length || !text::ends_with(w, r.suffix)) continue;
    bool blocked = false;
    for (const auto& e : r.unless_endings) blocked |= text::ends_with(w, e);
    if (blocked) continue;
    return w.substr(0, w.size() - r.suffix.size()) + r.replacement;
  }
  return w;
}

// --- KeywordGlossary ---

std::string_view to_string(StanceHint h) {
  switch (h) {
    case StanceHint::kremlin_marker: return "kremlin_marker";
    case StanceHint::western_marker: return "western_marker";
    case StanceHint::neutral: return "neutral";
  }
  return "?";
}

const GlossaryEntry* KeywordGlossary::find(std::string_view id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const GlossaryEntry& e, std::string_view k) { return e.id < k; });
  return it != entries_.end() && it->id == id ? &*it : nullptr;
}

void KeywordGlossary::add(GlossaryEntry e) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), e.id,
                             [](const GlossaryEntry& x, const std::string& k) { return x.id < k; });
  if (it != entries_.end() && it->id == e.id)
    throw ValidationError("duplicate glossary id '" + e.id + "'");
  entries_.insert(it, std::move(e));
}

std::string KeywordGlossary::hash() const {
  std::uint64_t h = text::fnv1a("stancekit-glossary");
  for (const auto& e : entries_) {
    h = text::fnv1a(e.id + "\x1f" + std::string(to_string(e.hint)), h);
    for (const auto& [lang, forms] : e.forms)
      for (const auto& p : forms)
        h = text::fnv1a(std::string(to_string(lang)) + ":" + text::join(p, " ") + "\x1e", h);
  }
  return text::hex64(h);
}

KeywordGlossary parse_glossary(std::string_view tsv,
                               const std::map<Language, Lemmatizer>* lemmatizers,
                               Warnings* warnings, const std::set<Language>& required) {
  std::map<std::string, GlossaryEntry> building;
  for_each_row(tsv, [&](const std::vector<std::string>& cols, std::size_t lineno) {
    if (cols.size() != 4) throw ParseError("expected 4 tab-separated columns", lineno);
    const auto& id = cols[0];
    if (id.empty()) throw ParseError("empty canonical id", lineno);
    StanceHint hint;
    if (cols[1] == "kremlin_marker") hint = StanceHint::kremlin_marker;
    else if (cols[1] == "western_marker") hint = StanceHint::western_marker;
    else if (cols[1] == "neutral") hint = StanceHint::neutral;
    else throw ParseError("unknown stance hint '" + cols[1] + "'", lineno);
    auto lang = parse_language(cols[2]);
    if (!lang) throw ParseError("unknown language '" + cols[2] + "'", lineno);

    Phrase phrase = to_phrase(cols[3]);
    if (phrase.empty()) throw ParseError("empty phrase", lineno);
    if (lemmatizers) {
      if (auto it = lemmatizers->find(*lang); it != lemmatizers->end())
        for (auto& w : phrase) w = it->second.lemma(w);
    }

    auto [it, fresh] = building.try_emplace(id);
    auto& e = it->second;
    if (fresh) {
      e.id = id;
      e.hint = hint;
    } else if (e.hint != hint) {
      throw ParseError("conflicting stance hints for '" + id + "'", lineno);
    }
    auto& forms = e.forms[*lang];
    if (std::find(forms.begin(), forms.end(), phrase) != forms.end()) {
      if (warnings)
        warnings->push_back("glossary line " + std::to_string(lineno) + ": duplicate form '" +
                            cols[3] + "' for " + id + "/" + cols[2] + " ignored");
      return;
    }
    forms.push_back(std::move(phrase));
  });

  std::vector<std::string> gaps;
  for (const auto& [id, e] : building) {
    std::vector<std::string> missing;
    for (Language l : required)
      if (!e.forms.count(l)) missing.emplace_back(to_string(l));
    if (!missing.empty()) gaps.push_back(id + " (missing " + text::join(missing, ",") + ")");
  }
  if (!gaps.empty())
    throw ValidationError("glossary coverage gaps: " + text::join(gaps, "; "));

  KeywordGlossary g;
  for (auto& [id, e] : building) g.add(std::move(e));
  return g;
}

KeywordGlossary load_glossary(const std::filesystem::path& path,
                              const std::map<Language, Lemmatizer>* lemmatizers,
                              Warnings* warnings, const std::set<Language>& required) {
  return parse_glossary(io::read_file(path), lemmatizers, warnings, required);
}

// --- LexiconSet ---

const LanguageResources& LexiconSet::at(Language l) const {
  auto it = languages.find(l);
  if (it == languages.end())
    throw ConfigError("no lexicon resources for language '" + std::string(to_string(l)) + "'");
  return it->second;
}

LexiconSet load_lexicon_set(const std::filesystem::path& manifest, Warnings* warnings) {
  using nlohmann::json;
  json m;
  try {
    m = json::parse(io::read_file(manifest));
  } catch (const json::parse_error& e) {
    throw ParseError("lexicon manifest " + manifest.string() + ": " + e.what());
  }
  if (m.value("format", "") != kLexiconManifestFormat)
    throw VersionError("lexicon manifest: missing or wrong 'format'");
  if (m.value("version", 0) != kLexiconManifestVersion)
    throw VersionError("lexicon manifest version " + m.value("version", json()).dump() +
                       ", expected " + std::to_string(kLexiconManifestVersion));
  if (!m.contains("languages") || !m["languages"].is_object())
    throw ConfigError("lexicon manifest: field 'languages' missing");
  if (!m.contains("glossary") || !m["glossary"].is_string())
    throw ConfigError("lexicon manifest: field 'glossary' missing");

  const auto base = manifest.parent_path();
  LexiconSet set;
  std::map<Language, Lemmatizer> lemmatizers;
  for (const auto& [code, res] : m["languages"].items()) {
    auto lang = parse_language(code);
    if (!lang) throw ConfigError("lexicon manifest: unknown language '" + code + "'");
    auto path_of = [&](const char* field) {
      if (!res.contains(field) || !res[field].is_string())
        throw ConfigError("lexicon manifest: languages." + code + "." + field + " missing");
      return base / res[field].get<std::string>();
    };
    LanguageResources r;
    r.emotion = load_emotion_lexicon(path_of("emotion"), warnings);
    r.words = parse_function_words(io::read_file(path_of("function_words")));
    r.lemmatizer = Lemmatizer(*lang);
    for (const auto& [name, phrases] : r.words.lists())
      for (const auto& p : phrases)
        for (const auto& w : p) r.lemmatizer.add_known(w);
    for (const auto& [lemma, mask] : r.emotion.entries()) r.lemmatizer.add_known(lemma);
    if (res.contains("lemmas")) {
      for_each_row(io::read_file(path_of("lemmas")),
                   [&](const std::vector<std::string>& cols, std::size_t lineno) {
                     if (cols.size() != 2)
                       throw ParseError("lemma table: expected 2 columns", lineno);
                     r.lemmatizer.add_override(cols[0], cols[1]);
                   });
    }
    lemmatizers[*lang] = r.lemmatizer;
    set.languages.emplace(*lang, std::move(r));
  }
  std::set<Language> required;
  for (const auto& [l, r] : set.languages) required.insert(l);
  set.glossary = load_glossary(base / m["glossary"].get<std::string>(), &lemmatizers,
                               warnings, required);
  return set;
}

// --- validation ---

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "?";
}

bool ValidationReport::clean() const {
  return count(Severity::warning) == 0 && count(Severity::error) == 0;
}

std::size_t ValidationReport::count(Severity s) const {
  return static_cast<std::size_t>(std::count_if(
      items.begin(), items.end(), [s](const ValidationItem& i) { return i.severity == s; }));
}

ValidationReport validate_lexicon_set(const LexiconSet& set) {
  ValidationReport report;
  for (const auto& [lang, res] : set.languages) {
    const std::string code(to_string(lang));
    for (auto name : kRequiredWordLists)
      if (!res.words.has_list(name))
        report.items.push_back(
            {Severity::error, "list '" + std::string(name) + "' is empty for language " + code});
    if (res.emotion.size() == 0)
      report.items.push_back({Severity::warning, "emotion lexicon is empty for language " + code});
    report.items.push_back({Severity::info, "emotion lexicon size for " + code + ": " +
                                                std::to_string(res.emotion.size())});
  }
  for (const auto& e : set.glossary.entries())
    for (const auto& [lang, res] : set.languages)
      if (!e.forms.count(lang))
        report.items.push_back({Severity::error, "glossary entry '" + e.id +
                                                     "' has no forms for language " +
                                                     std::string(to_string(lang))});
  report.items.push_back({Severity::info, "glossary entries: " +
                                              std::to_string(set.glossary.size()) + " (hash " +
                                              set.glossary.hash() + ")"});
  return report;
}

}  // namespace stancekit

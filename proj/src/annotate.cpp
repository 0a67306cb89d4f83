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

#include "stancekit/annotate.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "stancekit/error.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

namespace {

constexpr std::string_view kPosNames[] = {"NOUN", "PROPN", "VERB", "AUX",   "ADJ", "ADV",
                                          "PRON", "CONJ",  "SCONJ", "DET",  "NUM", "PUNCT",
                                          "SYM",  "PART",  "INTJ",  "X"};

constexpr std::string_view kMorphNames[kMorphCount] = {
    "comparative", "superlative",   "past_participle", "modal",
    "personal",    "second_person", "first_singular",  "interrogative"};

bool is_apostrophe(char32_t c) { return c == U'\'' || c == U'’' || c == U'ʼ'; }
bool is_hyphen(char32_t c) { return c == U'-' || c == U'‐' || c == U'‑'; }
bool is_word_char(char32_t c) {
  return text::is_alpha(c) || text::is_digit(c) || (u_getCombiningClass(c) > 0);
}

bool is_terminal(std::string_view tok) {
  if (tok.empty()) return false;
  for (char32_t c : text::decode(tok))
    if (c != U'.' && c != U'!' && c != U'?' && c != U'…') return false;
  return true;
}

bool is_closing(std::string_view tok) {
  static const std::set<std::string, std::less<>> kClosing = {
      "\"", "'", "»", "”", "’", ")", "]", "}"};
  return kClosing.count(tok) > 0;
}

// (letter{1,2}.){2,} such as "U.S." or "т.д."
bool is_dotted_abbreviation(const std::vector<char32_t>& cps) {
  std::size_t i = 0, groups = 0;
  while (i < cps.size()) {
    std::size_t letters = 0;
    while (i < cps.size() && text::is_alpha(cps[i])) {
      ++letters;
      ++i;
    }
    if (letters == 0 || letters > 2 || i >= cps.size() || cps[i] != U'.') return false;
    ++i;
    ++groups;
  }
  return groups >= 2;
}

// Splits one whitespace-free chunk into tokens.
void tokenize_chunk(const std::vector<char32_t>& cps,
                    const std::set<std::string, std::less<>>& abbreviations,
                    std::vector<std::string>& out) {
  // Peel leading/trailing punctuation to test the core for a dotted abbreviation.
  std::size_t b = 0, e = cps.size();
  while (b < e && !is_word_char(cps[b])) ++b;
  std::size_t core_end = e;
  while (core_end > b && !is_word_char(cps[core_end - 1]) && cps[core_end - 1] != U'.')
    --core_end;
  if (b < core_end) {
    std::vector<char32_t> core(cps.begin() + b, cps.begin() + core_end);
    if (is_dotted_abbreviation(core)) {
      for (std::size_t i = 0; i < b; ++i) out.push_back(text::encode(cps[i]));
      out.push_back(text::encode(core));
      for (std::size_t i = core_end; i < e; ++i) out.push_back(text::encode(cps[i]));
      return;
    }
  }

  std::size_t i = 0;
  while (i < cps.size()) {
    char32_t c = cps[i];
    if (is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < cps.size()) {
        if (is_word_char(cps[j])) {
          ++j;
        } else if ((is_apostrophe(cps[j]) || is_hyphen(cps[j])) && j + 1 < cps.size() &&
                   text::is_alpha(cps[j - 1]) && text::is_alpha(cps[j + 1])) {
          j += 2;
        } else if ((cps[j] == U'.' || cps[j] == U',') && j + 1 < cps.size() &&
                   text::is_digit(cps[j - 1]) && text::is_digit(cps[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      std::string word = text::encode(std::vector<char32_t>(cps.begin() + i, cps.begin() + j));
      if (j < cps.size() && cps[j] == U'.' && abbreviations.count(text::lower(word))) {
        word += ".";
        ++j;
      }
      out.push_back(std::move(word));
      i = j;
    } else if (c == U'.') {
      std::size_t j = i;
      while (j < cps.size() && cps[j] == U'.') ++j;
      out.push_back(std::string(j - i, '.'));
      i = j;
    } else {
      out.push_back(text::encode(c));
      ++i;
    }
  }
}

struct PosRule {
  std::string_view suffix;
  Pos pos;
  std::uint16_t flags;
  std::size_t min_length;
  std::vector<std::string_view> unless = {};
};

constexpr auto kSup = static_cast<std::uint16_t>(Morph::superlative);
constexpr auto kComp = static_cast<std::uint16_t>(Morph::comparative);
constexpr auto kPP = static_cast<std::uint16_t>(Morph::past_participle);

const std::vector<PosRule>& suffix_rules(Language lang) {
  static const std::map<Language, std::vector<PosRule>> kRules = {
      {Language::en,
       {{"iest", Pos::ADJ, kSup, 6},
        {"est", Pos::ADJ, kSup, 7, {"rest", "test", "vest", "gest", "west", "nest", "dest"}},
        {"ier", Pos::ADJ, kComp, 5, {"dier", "tier", "rier"}},
        {"ly", Pos::ADV, 0, 4, {"mily", "pply", "eply", "taly"}},
        {"ing", Pos::VERB, 0, 5},
        {"ed", Pos::VERB, kPP, 4, {"eed"}},
        {"tion", Pos::NOUN, 0, 5},
        {"sion", Pos::NOUN, 0, 5},
        {"ness", Pos::NOUN, 0, 5},
        {"ment", Pos::NOUN, 0, 6},
        {"ity", Pos::NOUN, 0, 5},
        {"ism", Pos::NOUN, 0, 5},
        {"ous", Pos::ADJ, 0, 5},
        {"ful", Pos::ADJ, 0, 5},
        {"ive", Pos::ADJ, 0, 5},
        {"able", Pos::ADJ, 0, 6},
        {"ible", Pos::ADJ, 0, 6},
        {"ical", Pos::ADJ, 0, 6},
        {"less", Pos::ADJ, 0, 6},
        {"ize", Pos::VERB, 0, 5},
        {"ise", Pos::VERB, 0, 6}}},
      {Language::uk,
       {{"ться", Pos::VERB, 0, 5},
        {"тися", Pos::VERB, 0, 5},
        {"тись", Pos::VERB, 0, 5},
        {"ений", Pos::VERB, kPP, 6},
        {"ена", Pos::VERB, kPP, 6},
        {"ене", Pos::VERB, kPP, 6},
        {"ені", Pos::VERB, kPP, 6},
        {"аний", Pos::VERB, kPP, 6},
        {"ана", Pos::VERB, kPP, 6},
        {"ане", Pos::VERB, kPP, 6},
        {"ані", Pos::VERB, kPP, 6},
        {"іший", Pos::ADJ, kComp, 6},
        {"іша", Pos::ADJ, kComp, 6},
        {"іше", Pos::ADJ, kComp, 6},
        {"ння", Pos::NOUN, 0, 5},
        {"ість", Pos::NOUN, 0, 5},
        {"ство", Pos::NOUN, 0, 5},
        {"ція", Pos::NOUN, 0, 5},
        {"ти", Pos::VERB, 0, 4},
        {"ють", Pos::VERB, 0, 5},
        {"ять", Pos::VERB, 0, 5},
        {"ично", Pos::ADV, 0, 6},
        {"ально", Pos::ADV, 0, 7},
        {"ий", Pos::ADJ, 0, 4},
        {"ій", Pos::ADJ, 0, 4},
        {"ого", Pos::ADJ, 0, 5},
        {"ому", Pos::ADJ, 0, 5},
        {"ими", Pos::ADJ, 0, 5}}},
      {Language::ru,
       {{"ться", Pos::VERB, 0, 5},
        {"тся", Pos::VERB, 0, 5},
        {"ейший", Pos::ADJ, kSup, 7},
        {"айший", Pos::ADJ, kSup, 7},
        {"нный", Pos::VERB, kPP, 6},
        {"нная", Pos::VERB, kPP, 6},
        {"нное", Pos::VERB, kPP, 6},
        {"нные", Pos::VERB, kPP, 6},
        {"нного", Pos::VERB, kPP, 7},
        {"ен", Pos::VERB, kPP, 7},
        {"ена", Pos::VERB, kPP, 7},
        {"ено", Pos::VERB, kPP, 7},
        {"ены", Pos::VERB, kPP, 7},
        {"ан", Pos::VERB, kPP, 7},
        {"ана", Pos::VERB, kPP, 7},
        {"ано", Pos::VERB, kPP, 7},
        {"аны", Pos::VERB, kPP, 7},
        {"ние", Pos::NOUN, 0, 5},
        {"ость", Pos::NOUN, 0, 5},
        {"ство", Pos::NOUN, 0, 5},
        {"ция", Pos::NOUN, 0, 5},
        {"ать", Pos::VERB, 0, 5},
        {"ять", Pos::VERB, 0, 5},
        {"еть", Pos::VERB, 0, 5},
        {"ить", Pos::VERB, 0, 5},
        {"ее", Pos::ADJ, kComp, 6},
        {"ый", Pos::ADJ, 0, 4},
        {"ий", Pos::ADJ, 0, 4},
        {"ой", Pos::ADJ, 0, 4},
        {"ая", Pos::ADJ, 0, 4},
        {"ые", Pos::ADJ, 0, 4},
        {"ого", Pos::ADJ, 0, 5},
        {"его", Pos::ADJ, 0, 5}}},
      {Language::ro,
       {{"ează", Pos::VERB, 0, 6},
        {"ește", Pos::VERB, 0, 6},
        {"mente", Pos::ADV, 0, 7},
        {"ată", Pos::VERB, kPP, 5},
        {"ați", Pos::VERB, kPP, 5},
        {"ate", Pos::VERB, kPP, 5},
        {"at", Pos::VERB, kPP, 5},
        {"ită", Pos::VERB, kPP, 5},
        {"it", Pos::VERB, kPP, 5},
        {"ută", Pos::VERB, kPP, 5},
        {"ut", Pos::VERB, kPP, 5},
        {"ție", Pos::NOUN, 0, 5},
        {"tate", Pos::NOUN, 0, 6},
        {"ului", Pos::NOUN, 0, 6},
        {"ul", Pos::NOUN, 0, 5},
        {"ească", Pos::ADJ, 0, 6},
        {"esc", Pos::ADJ, 0, 5},
        {"ică", Pos::ADJ, 0, 5},
        {"abil", Pos::ADJ, 0, 6},
        {"oasă", Pos::ADJ, 0, 6},
        {"os", Pos::ADJ, 0, 5}}},
      {Language::fr,
       {{"ement", Pos::ADV, 0, 7, {"nement", "gement", "tement"}},
        {"amment", Pos::ADV, 0, 7},
        {"emment", Pos::ADV, 0, 7},
        {"ées", Pos::VERB, kPP, 5},
        {"ée", Pos::VERB, kPP, 4},
        {"és", Pos::VERB, kPP, 4},
        {"é", Pos::VERB, kPP, 4},
        {"tion", Pos::NOUN, 0, 5},
        {"sion", Pos::NOUN, 0, 5},
        {"ité", Pos::NOUN, 0, 5},
        {"isme", Pos::NOUN, 0, 6},
        {"ment", Pos::NOUN, 0, 6},
        {"aient", Pos::VERB, 0, 6},
        {"ait", Pos::VERB, 0, 5},
        {"er", Pos::VERB, 0, 4, {"ier", "eur"}},
        {"euse", Pos::ADJ, 0, 6},
        {"eux", Pos::ADJ, 0, 5},
        {"ique", Pos::ADJ, 0, 6},
        {"able", Pos::ADJ, 0, 6},
        {"ible", Pos::ADJ, 0, 6},
        {"ive", Pos::ADJ, 0, 5}}},
  };
  return kRules.at(lang);
}

const PosRule* match_suffix(std::string_view lower, Language lang) {
  const std::size_t len = text::length(lower);
  for (const auto& r : suffix_rules(lang)) {
    if (len < r.min_length || !text::ends_with(lower, r.suffix)) continue;
    bool blocked = false;
    for (auto u : r.unless) blocked |= text::ends_with(lower, u);
    if (!blocked) return &r;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Pos p) { return kPosNames[static_cast<int>(p)]; }

std::optional<Pos> parse_pos(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kPosNames); ++i)
    if (kPosNames[i] == s) return static_cast<Pos>(i);
  return std::nullopt;
}

std::string morph_to_string(std::uint16_t flags) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < kMorphCount; ++i)
    if (flags & (1u << i)) names.emplace_back(kMorphNames[i]);
  return names.empty() ? "_" : text::join(names, ",");
}

std::uint16_t parse_morph(std::string_view s) {
  if (s == "_" || s.empty()) return 0;
  std::uint16_t flags = 0;
  for (const auto& name : text::split(s, ',')) {
    auto it = std::find(std::begin(kMorphNames), std::end(kMorphNames), name);
    if (it == std::end(kMorphNames)) throw ParseError("unknown morph flag '" + name + "'");
    flags |= static_cast<std::uint16_t>(1u << (it - std::begin(kMorphNames)));
  }
  return flags;
}

std::size_t AnnotatedDocument::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

const std::set<std::string, std::less<>>& default_abbreviations(Language lang) {
  static const std::map<Language, std::set<std::string, std::less<>>> kAbbrev = {
      {Language::en,
       {"mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "gen", "col", "lt", "sgt", "gov",
        "sen", "rep", "vs", "etc", "no", "approx", "jan", "feb", "mar", "apr", "aug", "sept",
        "oct", "nov", "dec", "inc", "corp", "ltd"}},
      {Language::uk, {"вул", "м", "р", "ст", "ім", "млн", "млрд", "тис", "грн", "пр", "проф"}},
      {Language::ru, {"г", "ул", "им", "млн", "млрд", "тыс", "руб", "проф", "ст", "пр"}},
      {Language::ro, {"dl", "dna", "nr", "str", "prof", "dr", "mil", "mld", "lei", "etc"}},
      {Language::fr, {"m", "mme", "mlle", "dr", "st", "etc", "av", "bd", "mds"}},
  };
  return kAbbrev.at(lang);
}

Skeleton tokenize_and_segment(std::string_view input, Language language,
                              const std::set<std::string, std::less<>>* extra) {
  std::set<std::string, std::less<>> abbreviations = default_abbreviations(language);
  if (extra) abbreviations.insert(extra->begin(), extra->end());

  std::vector<std::string> tokens;
  std::vector<char32_t> chunk;
  auto flush = [&] {
    if (!chunk.empty()) tokenize_chunk(chunk, abbreviations, tokens);
    chunk.clear();
  };
  for (char32_t c : text::decode(input)) {
    if (text::is_space(c)) flush();
    else chunk.push_back(c);
  }
  flush();

  Skeleton sk;
  std::vector<std::string> current;
  bool closing = false;
  bool any_alpha = false;
  for (auto& tok : tokens) {
    if (closing && !is_terminal(tok) && !is_closing(tok)) {
      sk.sentences.push_back(std::move(current));
      current.clear();
      closing = false;
    }
    any_alpha |= text::has_alpha(tok);
    if (is_terminal(tok)) closing = true;
    current.push_back(std::move(tok));
  }
  if (!current.empty()) sk.sentences.push_back(std::move(current));
  if (!any_alpha) throw AnnotationError("text has no alphabetic tokens");
  return sk;
}

// --- tagger ---

HeuristicAnnotator::HeuristicAnnotator(const LexiconSet& lexicons) : lexicons_(lexicons) {}

Token HeuristicAnnotator::tag(const std::string& surface, bool sentence_initial,
                              const LanguageResources& res, Language language) const {
  Token t;
  t.surface = surface;
  const auto cps = text::decode(surface);
  bool alpha = false, digit = false, sym = false;
  for (char32_t c : cps) {
    alpha |= text::is_alpha(c);
    digit |= text::is_digit(c);
    sym |= text::is_symbol(c);
  }
  if (!alpha && !digit) {
    t.lemma = text::lower(surface);
    t.pos = sym ? Pos::SYM : Pos::PUNCT;
    return t;
  }
  if (!alpha) {
    t.lemma = surface;
    t.pos = Pos::NUM;
    return t;
  }

  const std::string lower = text::lower(surface);
  t.lemma = res.lemmatizer.lemma(surface);
  const auto& w = res.words;
  auto in = [&](std::string_view list) {
    return w.contains(list, t.lemma) || w.contains(list, lower);
  };

  if (in("modal_verbs")) t.set(Morph::modal);
  if (in("personal_pronouns")) t.set(Morph::personal);
  if (in("second_person_forms")) t.set(Morph::second_person);
  if (in("first_singular_forms")) t.set(Morph::first_singular);
  if (in("interrogative_words")) t.set(Morph::interrogative);
  if (in("comparatives")) t.set(Morph::comparative);
  if (in("superlatives")) t.set(Morph::superlative);
  if (in("past_participles")) t.set(Morph::past_participle);

  // 1. closed-class and dictionary lookups
  static const std::pair<std::string_view, Pos> kClosed[] = {
      {"coordinating_conjunctions", Pos::CONJ}, {"but_forms", Pos::CONJ},
      {"personal_pronouns", Pos::PRON},         {"second_person_forms", Pos::PRON},
      {"first_singular_forms", Pos::PRON},      {"other_pronouns", Pos::PRON},
      {"relative_pronouns", Pos::PRON},         {"subordinators_concession", Pos::SCONJ},
      {"subordinators_reason", Pos::SCONJ},     {"subordinators_purpose", Pos::SCONJ},
      {"subordinators_condition", Pos::SCONJ},  {"subordinators_time", Pos::SCONJ},
      {"determiners", Pos::DET},                {"modal_verbs", Pos::AUX},
      {"passive_auxiliaries", Pos::AUX},        {"auxiliaries", Pos::AUX},
      {"negations", Pos::PART},                 {"prepositions", Pos::X},
      {"interrogative_words", Pos::ADV},        {"comparatives", Pos::ADJ},
      {"superlatives", Pos::ADJ},               {"past_participles", Pos::VERB},
      {"state_verbs", Pos::VERB},               {"action_verb_markers", Pos::VERB},
  };
  for (const auto& [list, pos] : kClosed) {
    if (in(list)) {
      t.pos = pos;
      // Dictionary verbs keep the participle flag their ending implies.
      if (pos == Pos::VERB)
        if (const PosRule* r = match_suffix(lower, language); r && r->pos == Pos::VERB)
          t.morph |= r->flags;
      return t;
    }
  }
  // 2. suffix rules
  if (const PosRule* r = match_suffix(lower, language)) {
    t.pos = r->pos;
    t.morph |= r->flags;
    return t;
  }
  // 3. capitalized inside a sentence
  if (!sentence_initial && text::starts_upper(surface)) {
    t.pos = Pos::PROPN;
    return t;
  }
  // 4. fallback
  t.pos = Pos::NOUN;
  return t;
}

AnnotatedDocument HeuristicAnnotator::annotate(const Skeleton& skeleton, Language language,
                                               std::string doc_id) const {
  if (!lexicons_.covers(language))
    throw ConfigError("no lexicons loaded for language '" + std::string(to_string(language)) +
                      "'");
  const auto& res = lexicons_.at(language);
  for (auto list : {"personal_pronouns", "coordinating_conjunctions", "determiners",
                    "modal_verbs", "passive_auxiliaries"})
    if (!res.words.has_list(list))
      throw ConfigError("closed-class list '" + std::string(list) + "' missing for language " +
                        std::string(to_string(language)));

  AnnotatedDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.language = language;
  for (const auto& sent : skeleton.sentences) {
    Sentence out;
    bool seen_word = false;
    for (const auto& surface : sent) {
      const bool initial = !seen_word;
      if (text::has_alpha(surface)) seen_word = true;
      out.push_back(tag(surface, initial, res, language));
    }
    doc.sentences.push_back(std::move(out));
  }
  return doc;
}

AnnotatedDocument HeuristicAnnotator::annotate_text(std::string_view input, Language language,
                                                    std::string doc_id) const {
  std::set<std::string, std::less<>> extra;
  if (lexicons_.covers(language))
    for (const auto& p : lexicons_.at(language).words.list("abbreviations"))
      if (p.size() == 1) extra.insert(p.front());
  return annotate(tokenize_and_segment(input, language, &extra), language, std::move(doc_id));
}

AnnotatedDocument HeuristicAnnotator::annotate_document(const Document& doc) const {
  try {
    return annotate_text(doc.text, doc.language, doc.id);
  } catch (const AnnotationError& e) {
    throw AnnotationError("document '" + doc.id + "': " + e.what());
  }
}

// --- annotation files ---

void write_annotations(std::ostream& out, const std::vector<AnnotatedDocument>& docs,
                       std::optional<std::uint64_t> seed) {
  out << "# format = " << kAnnotationFormat << ' ' << kAnnotationVersion << '\n';
  if (seed) out << "# seed = " << *seed << '\n';
  for (const auto& d : docs) {
    out << "# doc_id = " << d.doc_id << '\n';
    if (d.language) out << "# language = " << to_string(*d.language) << '\n';
    for (const auto& s : d.sentences) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& t = s[i];
        out << t.surface << '\t' << t.lemma << '\t' << to_string(t.pos) << '\t'
            << morph_to_string(t.morph) << '\t' << (i + 1) << '\n';
      }
      out << '\n';
    }
  }
}

std::vector<AnnotatedDocument> parse_annotations(std::istream& in) {
  std::vector<AnnotatedDocument> docs;
  Sentence current;
  std::string line;
  std::size_t lineno = 0;
  auto close_sentence = [&] {
    if (current.empty()) return;
    if (docs.empty()) throw ParseError("token line before any '# doc_id =' header", lineno);
    docs.back().sentences.push_back(std::move(current));
    current.clear();
  };
  auto header_value = [](const std::string& l, std::string_view key) -> std::optional<std::string> {
    // "# key = value"
    if (l.size() < 2 || l[0] != '#') return std::nullopt;
    auto body = text::trim(std::string_view(l).substr(1));
    auto eq = body.find('=');
    if (eq == std::string::npos) return std::nullopt;
    if (text::trim(std::string_view(body).substr(0, eq)) != key) return std::nullopt;
    return text::trim(std::string_view(body).substr(eq + 1));
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      close_sentence();
      continue;
    }
    if (line[0] == '#') {
      if (auto v = header_value(line, "format")) {
        auto parts = text::split_ws(*v);
        if (parts.size() != 2 || parts[0] != kAnnotationFormat)
          throw VersionError("not a stancekit annotation file", lineno);
        if (parts[1] != std::to_string(kAnnotationVersion))
          throw VersionError("annotation format version " + parts[1] + ", expected " +
                                 std::to_string(kAnnotationVersion),
                             lineno);
      } else if (auto id = header_value(line, "doc_id")) {
        close_sentence();
        docs.push_back({});
        docs.back().doc_id = *id;
      } else if (auto lang = header_value(line, "language")) {
        if (docs.empty()) throw ParseError("'# language' before '# doc_id'", lineno);
        auto l = parse_language(*lang);
        if (!l) throw ParseError("unknown language '" + *lang + "'", lineno);
        docs.back().language = l;
      }
      continue;
    }
    auto cols = text::split(line, '\t');
    if (cols.size() != 5)
      throw ParseError("expected 5 tab-separated columns, found " + std::to_string(cols.size()),
                       lineno);
    Token t;
    t.surface = cols[0];
    if (t.surface.empty()) throw ParseError("empty surface form", lineno);
    t.lemma = text::lower(cols[1].empty() ? cols[0] : cols[1]);
    auto pos = parse_pos(cols[2]);
    if (!pos) throw ParseError("unknown POS tag '" + cols[2] + "'", lineno);
    t.pos = *pos;
    try {
      t.morph = parse_morph(cols[3]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    if (cols[4].empty() || !std::all_of(cols[4].begin(), cols[4].end(), ::isdigit))
      throw ParseError("token index must be a positive integer", lineno);
    current.push_back(std::move(t));
  }
  close_sentence();
  for (const auto& d : docs)
    if (d.sentences.empty())
      throw ParseError("document '" + d.doc_id + "' has no tokens");
  return docs;
}

std::vector<AnnotatedDocument> ingest_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_annotations(in);
}

}  // namespace stancekit

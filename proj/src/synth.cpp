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

#include "stancekit/synth.hpp"

#include <array>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <unordered_set>

#include "stancekit/error.hpp"
#include "stancekit/rng.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

namespace {

struct Vocabulary {
  std::vector<std::string> subjects, verbs, objects, times;
  std::string reason, concession, purpose, condition, when, protect, amid;
  std::vector<std::string> western_kw, kremlin_kw;
  std::vector<std::string> fillers;  // class-neutral extra sentences
};

const Vocabulary& vocabulary(Language l) {
  static const Vocabulary en{
      {"the army", "the government", "officials", "the president", "local residents", "the troops",
       "the ministry", "experts", "the city council", "soldiers"},
      {"attacked", "captured", "discussed", "visited", "defended", "evacuated", "announced",
       "shelled", "inspected", "supported"},
      {"the bridge", "the village", "the airport", "the border", "the new plan", "the region",
       "the power plant", "the convoy", "the talks", "the hospital"},
      {"on monday", "yesterday", "this week", "at night", "earlier today"},
      "because", "although", "in order to", "if", "when", "protect", "amid",
      {"the invasion", "war crimes", "sanctions", "refugees", "the occupiers", "looting",
       "the victims"},
      {"the special operation", "denazification", "the Kiev regime", "nazis", "russophobia",
       "the militia", "foreign agents"},
      {"Prices rose again in the capital.", "The weather was cold and dry.",
       "Schools reopened in several towns.", "Trains ran with long delays.",
       "Many people feared a long war.", "Residents hoped for peace."}};
  static const Vocabulary uk{
      {"армія", "уряд", "чиновники", "президент", "місцеві жителі", "військові", "міністерство",
       "експерти", "міська рада", "солдати"},
      {"атакували", "захопили", "обговорили", "відвідали", "захистили", "евакуювали",
       "оголосили", "обстріляли", "перевірили", "підтримали"},
      {"міст", "село", "аеропорт", "кордон", "новий план", "регіон", "електростанцію", "колону",
       "переговори", "лікарню"},
      {"у понеділок", "вчора", "цього тижня", "вночі", "сьогодні"},
      "тому що", "хоча", "щоб", "якщо", "коли", "захистити", "на тлі",
      {"вторгнення", "воєнних злочинів", "санкцій", "біженців", "окупантів", "мародерство",
       "загиблих"},
      {"спецоперації", "денацифікації", "київський режим", "неонацисти", "русофобія",
       "ополчення", "іноземний агент"},
      {"Ціни знову зросли у столиці.", "Погода була холодна і суха.",
       "Школи відкрилися в кількох містах.", "Потяги їхали із затримками.",
       "Люди боялися довгої війни.", "Жителі сподівалися на мир."}};
  static const Vocabulary ru{
      {"армия", "правительство", "чиновники", "президент", "местные жители", "военные",
       "министерство", "эксперты", "городской совет", "солдаты"},
      {"атаковали", "захватили", "обсудили", "посетили", "защитили", "эвакуировали",
       "объявили", "обстреляли", "проверили", "поддержали"},
      {"мост", "село", "аэропорт", "границу", "новый план", "регион", "электростанцию", "колонну",
       "переговоры", "больницу"},
      {"в понедельник", "вчера", "на этой неделе", "ночью", "сегодня"},
      "потому что", "хотя", "чтобы", "если", "когда", "защитить", "на фоне",
      {"вторжения", "военных преступлений", "санкций", "беженцев", "оккупантов", "мародерство",
       "погибших"},
      {"спецоперации", "денацификации", "киевского режима", "неонацистов", "русофобии",
       "ополченцев", "иноагент"},
      {"Цены снова выросли в столице.", "Погода была холодной и сухой.",
       "Школы открылись в нескольких городах.", "Поезда шли с задержками.",
       "Люди боялись долгой войны.", "Жители надеялись на мир."}};
  switch (l) {
    case Language::en: return en;
    case Language::uk: return uk;
    case Language::ru: return ru;
    default: break;
  }
  throw ConfigError("the synthetic generator supports en, uk and ru only");
}

// Sources consistent with data/source_stance.tsv.
std::string source_for(Language l, Genre g, Stance s, Rng& rng) {
  static const std::array<const char*, 2> en_w{"BBC", "Reuters"}, en_k{"Russia Today", "RT"},
      uk_w{"Ukrainska Pravda", "Liga.net"}, uk_k{"Strana.ua", "Vesti.ua"},
      ru_w{"Raintv", "Raintv"}, ru_k{"Ria news", "Interfax"}, tg_w{"Spravdi", "InformNapalm"},
      tg_k{"Rybar", "Siloviki"};
  const bool west = s == Stance::pro_western;
  const std::array<const char*, 2>* pick;
  if (g == Genre::telegram) pick = west ? &tg_w : &tg_k;
  else if (l == Language::en) pick = west ? &en_w : &en_k;
  else if (l == Language::uk) pick = west ? &uk_w : &uk_k;
  else pick = west ? &ru_w : &ru_k;
  return (*pick)[rng.below(2)];
}

template <typename T>
const T& choose(const std::vector<T>& v, Rng& rng) {
  return v[rng.below(v.size())];
}

std::string capitalize(const std::string& s) {
  auto cps = text::decode(s);
  if (cps.empty()) return s;
  const std::string first = text::upper(text::encode(cps[0]));
  return first + s.substr(text::encode(cps[0]).size());
}

std::string clause(const Vocabulary& v, int kind, Rng& rng) {
  const std::string core = choose(v.subjects, rng) + " " + choose(v.verbs, rng) + " " +
                           choose(v.objects, rng);
  switch (kind) {
    case 0: return v.reason + " " + core;
    case 1: return v.concession + " " + core;
    case 2: return v.purpose + " " + v.protect + " " + choose(v.objects, rng);
    case 3: return v.condition + " " + core;
    default: return v.when + " " + core;
  }
}

std::string sentence(const Vocabulary& v, Stance s, const SynthOptions& o, Rng& rng) {
  if (rng.bernoulli(0.15)) return choose(v.fillers, rng);
  std::string out = choose(v.subjects, rng) + " " + choose(v.verbs, rng) + " " +
                    choose(v.objects, rng);
  if (rng.bernoulli(0.4)) out += " " + choose(v.times, rng);

  const bool kremlin = s == Stance::pro_kremlin;
  // Clause choice: the class-typical type (reason for pro-Kremlin,
  // concession for pro-Western) is boosted; the other three are shared.
  const double typical = o.clause_shift, atypical = o.clause_shift / 6.0, shared = 0.08;
  const double r = rng.uniform();
  const int own = kremlin ? 0 : 1, other = kremlin ? 1 : 0;
  int kind = -1;
  if (r < typical) kind = own;
  else if (r < typical + atypical) kind = other;
  else if (r < typical + atypical + shared) kind = 2;
  else if (r < typical + atypical + 2 * shared) kind = 3;
  else if (r < typical + atypical + 3 * shared) kind = 4;
  if (kind >= 0) out += ", " + clause(v, kind, rng);

  const auto& own_kw = kremlin ? v.kremlin_kw : v.western_kw;
  const auto& other_kw = kremlin ? v.western_kw : v.kremlin_kw;
  if (rng.bernoulli(o.keyword_rate)) out += " " + v.amid + " " + choose(own_kw, rng);
  else if (rng.bernoulli(o.confusion_rate)) out += " " + v.amid + " " + choose(other_kw, rng);
  return capitalize(out) + ".";
}

}  // namespace

std::vector<Document> synthesize_corpus(const SynthOptions& o) {
  if (o.languages.empty()) throw ConfigError("no languages requested");
  const bool news = o.genre == Genre::newspaper;
  const int lo = o.min_sentences > 0 ? o.min_sentences : (news ? 15 : 1);
  const int hi = o.max_sentences > 0 ? o.max_sentences : (news ? 30 : 2);
  if (hi < lo) throw ConfigError("max_sentences is below min_sentences");
  std::vector<Date> dates = o.dates;
  if (dates.empty()) {
    using namespace std::chrono;
    dates = {2022y / February / 23, 2022y / March / 1, 2022y / March / 8, 2022y / March / 18,
             2022y / April / 4};
  }

  Rng rng(o.seed);
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  const std::size_t n_kremlin =
      static_cast<std::size_t>(std::llround(o.pro_kremlin_share * static_cast<double>(o.documents)));
  for (std::size_t i = 0; i < o.documents; ++i) {
    Document d;
    d.language = o.languages[i % o.languages.size()];
    d.genre = o.genre;
    // Interleave classes so any prefix of the corpus stays roughly balanced.
    const bool kremlin = (i * n_kremlin) / std::max<std::size_t>(1, o.documents) !=
                         ((i + 1) * n_kremlin) / std::max<std::size_t>(1, o.documents);
    d.stance = kremlin ? Stance::pro_kremlin : Stance::pro_western;
    d.source = source_for(d.language, d.genre, *d.stance, rng);
    d.collected_on = dates[rng.below(dates.size())];
    char id[64];
    std::snprintf(id, sizeof id, "%s-%s-%c-%05zu", o.id_prefix.c_str(),
                  std::string(to_string(d.language)).c_str(), news ? 'n' : 't', i);
    d.id = id;
    const Vocabulary& v = vocabulary(d.language);
    for (int attempt = 0;; ++attempt) {
      const int count = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
      std::string body;
      for (int k = 0; k < count; ++k) body += (k ? " " : "") + sentence(v, *d.stance, o, rng);
      if (seen.insert(body).second) {
        d.text = std::move(body);
        break;
      }
      if (attempt > 1000) throw ConfigError("could not generate enough distinct documents");
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace stancekit

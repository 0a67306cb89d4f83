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

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "stancekit/annotate.hpp"
#include "stancekit/error.hpp"

using namespace stancekit;

namespace {

const LexiconSet& lexicons() {
  static const LexiconSet set = load_lexicon_set(oracle::lexicon_manifest());
  return set;
}

std::size_t count_tokens(const Skeleton& s) {
  std::size_t n = 0;
  for (const auto& sent : s.sentences) n += sent.size();
  return n;
}

// Non-space characters in order; token concatenation must reproduce them.
std::string squeeze(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

TEST(Tokenize, TwoTerminalPeriodsMakeTwoSentences) {
  const auto s = tokenize_and_segment("Це війна. Це правда.", Language::uk);
  ASSERT_EQ(s.sentences.size(), 2u);
  EXPECT_EQ(count_tokens(s), 6u);
  EXPECT_EQ(s.sentences[0], (std::vector<std::string>{"Це", "війна", "."}));
}

TEST(Tokenize, AbbreviationDoesNotEndSentence) {
  const auto s = tokenize_and_segment("Mr. Smith left.", Language::en);
  ASSERT_EQ(s.sentences.size(), 1u);
  EXPECT_EQ(s.sentences[0], (std::vector<std::string>{"Mr.", "Smith", "left", "."}));
}

TEST(Tokenize, CurrencySymbolSplit) {
  const auto s = tokenize_and_segment("$5 million", Language::en);
  ASSERT_EQ(s.sentences.size(), 1u);
  EXPECT_EQ(s.sentences[0], (std::vector<std::string>{"$", "5", "million"}));
}

TEST(Tokenize, ConservesNonSpaceCharacters) {
  for (const std::string text :
       {"«Це – війна», сказав він. Чому?!", "It's 3,500 km... Really? Yes!  (He said.)",
        "Mr. Smith's co-worker paid €12.50 today."}) {
    const auto s = tokenize_and_segment(text, Language::en);
    std::string joined;
    for (const auto& sent : s.sentences)
      for (const auto& t : sent) joined += t;
    EXPECT_EQ(joined, squeeze(text)) << text;
  }
}

TEST(Tokenize, ClosingQuoteStaysWithSentence) {
  const auto s = tokenize_and_segment("He said \"stop.\" Then left.", Language::en);
  ASSERT_EQ(s.sentences.size(), 2u);
  EXPECT_EQ(s.sentences[0].back(), "\"");
}

TEST(Annotate, SuffixAndCapitalizationRules) {
  const HeuristicAnnotator a(lexicons());
  const auto doc = a.annotate_text("They moved quickly to Kyiv and the strongest won.", Language::en);
  ASSERT_EQ(doc.sentences.size(), 1u);
  const auto& s = doc.sentences[0];
  auto find = [&](std::string_view w) -> const Token& {
    for (const auto& t : s)
      if (t.surface == w) return t;
    throw std::runtime_error("missing token");
  };
  EXPECT_EQ(find("quickly").pos, Pos::ADV);
  EXPECT_EQ(find("Kyiv").pos, Pos::PROPN);
  EXPECT_EQ(find("strongest").pos, Pos::ADJ);
  EXPECT_TRUE(find("strongest").has(Morph::superlative));
  EXPECT_EQ(find("They").pos, Pos::PRON);
  EXPECT_EQ(find(".").pos, Pos::PUNCT);
  for (const auto& t : s) EXPECT_EQ(t.lemma, squeeze(t.lemma));
}

TEST(Annotate, ClosedClassBeatsSuffixRules) {
  // Every personal pronoun in the list keeps PRON even when a suffix rule
  // (for instance en "-ly" or ru "-ться") would otherwise apply.
  const HeuristicAnnotator a(lexicons());
  for (Language lang : {Language::en, Language::uk, Language::ru}) {
    for (const auto& phrase : lexicons().at(lang).words.list("personal_pronouns")) {
      if (phrase.size() != 1) continue;
      const auto doc = a.annotate_text("x " + phrase[0] + " x", lang);
      EXPECT_EQ(doc.sentences[0][1].pos, Pos::PRON) << phrase[0];
    }
  }
}

TEST(Annotate, DeterministicAndLowercaseLemmas) {
  const HeuristicAnnotator a(lexicons());
  const std::string text = "Росія заявила, що війна почнеться. Чому?";
  const auto x = a.annotate_text(text, Language::uk, "d");
  EXPECT_EQ(x, a.annotate_text(text, Language::uk, "d"));
  for (const auto& s : x.sentences)
    for (const auto& t : s) EXPECT_FALSE(t.lemma.empty());
  EXPECT_EQ(x.sentences[0][0].lemma, "росія");
}

TEST(Annotate, NoAlphabeticTokensIsAnError) {
  const HeuristicAnnotator a(lexicons());
  EXPECT_THROW(a.annotate_text("... 12 !", Language::en), AnnotationError);
}

TEST(Annotate, MissingLanguageIsAnError) {
  LexiconSet partial;
  partial.languages.emplace(Language::en, lexicons().at(Language::en));
  const HeuristicAnnotator a(partial);
  EXPECT_THROW(a.annotate_text("Привіт.", Language::uk), Error);
}

TEST(Ingest, WellFormedTwoSentenceBlock) {
  std::istringstream in(
      "# doc_id = a\n"
      "Це\tце\tPRON\t_\t1\nвійна\tвійна\tNOUN\t_\t2\n.\t.\tPUNCT\t_\t3\n\n"
      "Ми\tми\tPRON\tpersonal\t1\n.\t.\tPUNCT\t_\t2\n");
  const auto docs = parse_annotations(in);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].doc_id, "a");
  ASSERT_EQ(docs[0].sentences.size(), 2u);
  EXPECT_TRUE(docs[0].sentences[1][0].has(Morph::personal));
  EXPECT_EQ(docs[0].token_count(), 5u);
}

TEST(Ingest, ColumnCountMismatchReportsLine) {
  std::istringstream in("# doc_id = a\nЦе\tце\tPRON\t_\t1\nвійна\tвійна\tNOUN\n");
  try {
    parse_annotations(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Ingest, UnknownPosOrMorphRejected) {
  std::istringstream pos("# doc_id = a\nx\tx\tBOGUS\t_\t1\n");
  EXPECT_THROW(parse_annotations(pos), ParseError);
  std::istringstream morph("# doc_id = a\nx\tx\tNOUN\tplural\t1\n");
  EXPECT_THROW(parse_annotations(morph), ParseError);
}

TEST(Ingest, RoundTripOfBuiltInAnnotation) {
  const HeuristicAnnotator a(lexicons());
  std::vector<AnnotatedDocument> docs = {
      a.annotate_text("The bridge was destroyed because the army was not ready.", Language::en, "e"),
      a.annotate_text("Это война. Почему она началась?", Language::ru, "r")};
  std::stringstream buf;
  write_annotations(buf, docs, 5);
  EXPECT_EQ(parse_annotations(buf), docs);
}

TEST(Ingest, GoldenFilesParse) {
  for (const char* name : {"en.conllu", "uk.conllu", "ru.conllu"}) {
    const auto docs = ingest_annotations(oracle::golden_dir() / name);
    ASSERT_FALSE(docs.empty()) << name;
    EXPECT_EQ(docs[0].sentences.size(), 3u) << name;
  }
}

}  // namespace

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
#include <string>
#include <vector>

#include "stancekit/corpus.hpp"

namespace stancekit {

// Generator for labeled test corpora in English, Ukrainian and Russian.
// Each sentence is assembled from fixed templates; the class shifts the
// odds of glossary keywords and of reason vs concession clauses.
struct SynthOptions {
  std::size_t documents = 1000;
  std::vector<Language> languages = {Language::en, Language::uk, Language::ru};
  Genre genre = Genre::newspaper;
  int min_sentences = 0;  // 0: 15 for newspapers, 1 for telegram
  int max_sentences = 0;  // 0: 30 for newspapers, 2 for telegram
  double keyword_rate = 0.25;   // chance a sentence carries a class keyword
  double clause_shift = 0.5;    // class-typical clause rate (opposite class gets a sixth)
  double confusion_rate = 0.05; // chance a sentence carries the other class's keyword
  double pro_kremlin_share = 0.5;
  std::vector<Date> dates;  // empty: five collection dates from Feb to Apr 2022
  std::string id_prefix = "syn";
  std::uint64_t seed = 0;
};

// Documents come out with explicit stances and sources that agree with the
// shipped source table. Texts are unique.
std::vector<Document> synthesize_corpus(const SynthOptions& options);

}  // namespace stancekit

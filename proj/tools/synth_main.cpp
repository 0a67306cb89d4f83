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

// Writes a synthetic labeled corpus in the stancekit-corpus format.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "stancekit/error.hpp"
#include "stancekit/io.hpp"
#include "stancekit/synth.hpp"

int main(int argc, char** argv) {
  using namespace stancekit;
  CLI::App app{"Generate a synthetic stance corpus (stancekit-corpus version 1)"};
  SynthOptions o;
  std::string genre = "newspaper", out;
  std::vector<std::string> langs = {"en", "uk", "ru"};
  app.add_option("-n,--documents", o.documents, "Number of documents")->capture_default_str();
  app.add_option("--genre", genre, "newspaper or telegram")->capture_default_str();
  app.add_option("--languages", langs, "Languages (en, uk, ru)")->delimiter(',');
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--keyword-rate", o.keyword_rate, "Per-sentence class keyword chance")
      ->capture_default_str();
  app.add_option("--clause-shift", o.clause_shift, "Class-typical clause rate")
      ->capture_default_str();
  app.add_option("--min-sentences", o.min_sentences, "Sentences per document, lower bound");
  app.add_option("--max-sentences", o.max_sentences, "Sentences per document, upper bound");
  app.add_option("--id-prefix", o.id_prefix, "Document id prefix")->capture_default_str();
  app.add_option("-o,--output", out, "Output path (stdout when omitted)");
  CLI11_PARSE(app, argc, argv);
  try {
    auto g = parse_genre(genre);
    if (!g) throw ConfigError("unknown genre '" + genre + "'");
    o.genre = *g;
    o.languages.clear();
    for (const auto& s : langs) {
      auto l = parse_language(s);
      if (!l) throw ConfigError("unknown language '" + s + "'");
      o.languages.push_back(*l);
    }
    const auto docs = synthesize_corpus(o);
    if (out.empty()) {
      write_corpus(std::cout, docs, o.seed);
    } else {
      io::AtomicWriter w(out);
      write_corpus(w.stream(), docs, o.seed);
      w.commit();
    }
  } catch (const Error& e) {
    std::cerr << "stancekit-synth: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

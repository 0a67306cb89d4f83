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

#include "stancekit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"
#include "stancekit/annotate.hpp"
#include "stancekit/classify.hpp"
#include "stancekit/corpus.hpp"
#include "stancekit/error.hpp"
#include "stancekit/evaluate.hpp"
#include "stancekit/explain.hpp"
#include "stancekit/features.hpp"
#include "stancekit/io.hpp"
#include "stancekit/lexicon.hpp"
#include "stancekit/parallel.hpp"
#include "stancekit/text.hpp"
#include "stancekit/trends.hpp"

#ifndef STANCEKIT_DEFAULT_RESOURCES
#define STANCEKIT_DEFAULT_RESOURCES ""
#endif

namespace stancekit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ContractError*>(&e) || dynamic_cast<const LookupError*>(&e))
    return kContract;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const AnnotationError*>(&e) ||
      dynamic_cast<const StratificationError*>(&e) || dynamic_cast<const ExtractionError*>(&e))
    return kParse;
  return kInternal;
}

namespace {

// Thrown for argument problems found after CLI11 parsing succeeded.
struct UsageError : Error {
  using Error::Error;
};

inline constexpr std::string_view kPredictionFormat = "stancekit-predictions";
inline constexpr int kPredictionVersion = 1;
inline constexpr std::string_view kSummaryFormat = "stancekit-summary";
inline constexpr int kSummaryVersion = 1;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned jobs = 1;
  std::string config;
  std::string resources;
  bool quiet = false;
};

struct Context {
  Globals g;
  std::ostream& out;
  std::ostream& err;

  void note(const std::string& msg) const {
    if (!g.quiet) err << msg << '\n';
  }
  void warn(const std::string& msg) const { err << "warning: " << msg << '\n'; }
};

// Resource lookup: explicit flag, then the --config "resources" block, then
// --resources, then the environment, then the build-time data directory.
struct Resolver {
  fs::path dir;
  std::optional<fs::path> lexicons, sources, embeddings;

  static Resolver make(const Globals& g) {
    Resolver r;
    if (!g.resources.empty()) r.dir = g.resources;
    else if (const char* env = std::getenv(kResourceEnv); env && *env) r.dir = env;
    else r.dir = STANCEKIT_DEFAULT_RESOURCES;
    if (!g.config.empty()) {
      json j;
      try {
        j = json::parse(io::read_file(g.config));
      } catch (const json::exception& e) {
        throw ConfigError("config " + g.config + ": " + e.what());
      }
      const fs::path base = fs::path(g.config).parent_path();
      if (j.is_object() && j.contains("resources") && j["resources"].is_object()) {
        for (const auto& [k, v] : j["resources"].items()) {
          if (!v.is_string()) continue;
          fs::path p = v.get<std::string>();
          if (p.is_relative()) p = base / p;
          if (k == "lexicons") r.lexicons = p;
          else if (k == "sources") r.sources = p;
          else if (k == "embeddings") r.embeddings = p;
        }
      }
    }
    return r;
  }

  fs::path lexicon_manifest(const std::string& flag) const {
    if (!flag.empty()) return flag;
    if (lexicons) return *lexicons;
    return dir / "lexicons" / "manifest.json";
  }
  fs::path source_map(const std::string& flag) const {
    if (!flag.empty()) return flag;
    if (sources) return *sources;
    return dir / "source_stance.tsv";
  }
};

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw UsageError(what + " not found: " + p.string());
}

void require_output(const std::string& p) {
  if (p.empty() || p == "-") return;
  const fs::path parent = fs::path(p).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw UsageError("output directory does not exist: " + parent.string());
}

// Writes to stdout for "" or "-", otherwise atomically to the file.
void emit(Context& ctx, const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(ctx.out);
    return;
  }
  io::AtomicWriter w(path);
  fn(w.stream());
  w.commit();
}

LexiconSet load_lexicons(Context& ctx, const fs::path& manifest) {
  require_file(manifest, "lexicon manifest");
  Warnings warnings;
  LexiconSet set = load_lexicon_set(manifest, &warnings);
  for (const auto& w : warnings) ctx.warn(w);
  return set;
}

std::vector<Document> load_docs(Context& ctx, const fs::path& path,
                                const SourceStanceMap* map = nullptr) {
  require_file(path, "corpus");
  LoadStats stats;
  auto docs = load_corpus(path, map, &stats);
  if (stats.duplicates_dropped)
    ctx.note("dropped " + std::to_string(stats.duplicates_dropped) + " duplicate texts");
  return docs;
}

std::optional<EmbeddingTable> load_embeddings(const std::string& flag, const Resolver& r) {
  fs::path p = flag;
  if (p.empty() && r.embeddings) p = *r.embeddings;
  if (p.empty()) return std::nullopt;
  require_file(p, "embedding table");
  return read_embedding_table(p);
}

// Feature rows aligned with a document list.
struct Rows {
  std::vector<Document> docs;
  FeatureTable table;
};

// Either reads a precomputed feature table (every document must have a
// row) or annotates and extracts with the built-in pipeline.
Rows feature_rows(Context& ctx, std::vector<Document> docs, const std::string& features_path,
                  const LexiconSet* lex) {
  Rows r;
  if (!features_path.empty()) {
    require_file(features_path, "feature table");
    FeatureTable all = read_feature_csv(fs::path(features_path));
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < all.ids.size(); ++i) index.emplace(all.ids[i], i);
    std::vector<std::size_t> pick;
    for (const auto& d : docs) {
      auto it = index.find(d.id);
      if (it == index.end())
        throw LookupError("document '" + d.id + "' has no row in " + features_path);
      pick.push_back(it->second);
    }
    r.table.manifest = all.manifest;
    r.table.matrix = Matrix(pick.size(), all.manifest.size());
    for (std::size_t i = 0; i < pick.size(); ++i) {
      r.table.ids.push_back(all.ids[pick[i]]);
      for (std::size_t j = 0; j < all.manifest.size(); ++j)
        r.table.matrix(i, j) = all.matrix(pick[i], j);
    }
    r.docs = std::move(docs);
    return r;
  }
  Dataset ds = build_dataset(docs, *lex, ctx.g.jobs);
  for (const auto& e : ds.dropped) ctx.warn("skipped '" + e.id + "': " + e.message);
  r.docs = std::move(ds.docs);
  r.table = std::move(ds.features);
  return r;
}

// Columns of `table` named by `names`. A missing name is a manifest
// contract violation, reported with the model's diagnostic.
Matrix select_columns(const FeatureTable& table, const FeatureManifest& wanted) {
  std::vector<std::size_t> cols;
  for (const auto& n : wanted.names) {
    auto idx = table.manifest.index_of(n);
    if (!idx) {
      std::vector<std::string> missing;
      for (const auto& m : wanted.names)
        if (!table.manifest.index_of(m)) missing.push_back(m);
      throw ContractError("feature manifest mismatch: rows lack " +
                          std::to_string(missing.size()) + " model features (" +
                          text::join(missing, ", ") + ")");
    }
    cols.push_back(*idx);
  }
  return table.matrix.select_cols(cols);
}

std::vector<int> labels_of(const std::vector<Document>& docs) {
  std::vector<int> y;
  y.reserve(docs.size());
  for (const auto& d : docs) {
    if (!d.stance) throw ValidationError("document '" + d.id + "' is unlabeled");
    y.push_back(label_of(*d.stance));
  }
  return y;
}

// SOURCE_DATE_EPOCH pins timestamps for reproducible builds and tests.
std::chrono::system_clock::time_point now() {
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) {
    try {
      return std::chrono::system_clock::time_point(std::chrono::seconds(std::stoll(e)));
    } catch (const std::exception&) {
      throw UsageError("SOURCE_DATE_EPOCH is not an integer");
    }
  }
  return std::chrono::system_clock::now();
}

std::string format_time(std::chrono::system_clock::time_point t, const char* fmt) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

Hyperparameters hyperparameters_arg(ModelKind kind, const std::string& arg) {
  if (arg.empty()) return default_hyperparameters(kind);
  std::string text = arg;
  if (!arg.empty() && arg.front() != '{') {
    require_file(arg, "hyperparameter file");
    text = io::read_file(arg);
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("hyperparameters: ") + e.what());
  }
  return hyperparameters_from_json(kind, j);
}

ModelKind model_arg(const std::string& s) {
  auto k = parse_model_kind(s);
  if (!k) throw UsageError("unknown model kind '" + s + "'");
  return *k;
}

FeatureMode mode_arg(const std::string& s) {
  auto m = parse_feature_mode(s);
  if (!m) throw UsageError("unknown feature mode '" + s + "'");
  return *m;
}

// Design matrix for a model kind: embedding rows or selected feature columns.
struct Design {
  Matrix x;
  FeatureManifest manifest;
};

Design design_for_training(ModelKind kind, FeatureMode mode, const Rows& rows,
                           const EmbeddingTable* emb) {
  Design d;
  if (kind == ModelKind::embedding_linear) {
    if (!emb) throw UsageError("embedding_linear needs --embeddings");
    d.x = emb->rows(rows.table.ids);
    d.manifest = embedding_manifest(emb->dimension);
    return d;
  }
  d.manifest = feature_mode(rows.table.manifest, mode);
  d.x = select_columns(rows.table, d.manifest);
  return d;
}

Design design_for_model(const TrainedModel& model, const Rows& rows, const EmbeddingTable* emb) {
  Design d;
  if (model.kind == ModelKind::embedding_linear) {
    if (!emb) throw UsageError("embedding_linear needs --embeddings");
    d.x = emb->rows(rows.table.ids);
    d.manifest = embedding_manifest(emb->dimension);
    if (d.manifest.names != model.manifest.names) {
      predict(model, d.x, d.manifest);  // throws the detailed ContractError
    }
    return d;
  }
  d.manifest = model.manifest;
  d.x = select_columns(rows.table, model.manifest);
  return d;
}

void check_glossary(Context& ctx, const TrainedModel& model, const LexiconSet& lex,
                    bool allow) {
  if (auto msg = glossary_mismatch(model, lex.glossary.hash())) {
    if (!allow) throw ContractError(*msg + " (pass --allow-glossary-mismatch to continue)");
    ctx.warn(*msg);
  }
}

std::string top_contributions(const TrainedModel& model, std::span<const double> row,
                              std::size_t k) {
  const auto c = linear_contributions(model, row);
  std::vector<std::size_t> order(c.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(c[a]) > std::abs(c[b]); });
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i)
    parts.push_back(model.manifest.names[order[i]] + "=" + io::format_double(c[order[i]]));
  return text::join(parts, ";");
}

void write_summary(std::ostream& os, const std::vector<ExperimentReport>& reports,
                   std::uint64_t seed) {
  os << "# " << kSummaryFormat << ' ' << kSummaryVersion << " seed=" << seed << '\n';
  write_summary_csv(os, reports);
}

// --- subcommands ---

struct IngestArgs {
  std::string input, output, sources;
  bool keep_labels = false;
};

int cmd_ingest(Context& ctx, const IngestArgs& a) {
  require_output(a.output);
  std::optional<SourceStanceMap> map;
  if (!a.keep_labels) {
    const fs::path p = Resolver::make(ctx.g).source_map(a.sources);
    require_file(p, "source map");
    map = SourceStanceMap::load(p);
  }
  auto docs = load_docs(ctx, a.input, map ? &*map : nullptr);
  emit(ctx, a.output, [&](std::ostream& os) { write_corpus(os, docs, ctx.g.seed); });
  ctx.note("ingested " + std::to_string(docs.size()) + " documents");
  return kOk;
}

struct AnnotateArgs {
  std::string input, output, lexicons;
};

int cmd_annotate(Context& ctx, const AnnotateArgs& a) {
  require_output(a.output);
  const LexiconSet lex = load_lexicons(ctx, Resolver::make(ctx.g).lexicon_manifest(a.lexicons));
  const auto docs = load_docs(ctx, a.input);
  const HeuristicAnnotator annotator(lex);
  std::vector<AnnotatedDocument> annotated(docs.size());
  parallel_for(docs.size(), ctx.g.jobs,
               [&](std::size_t i) { annotated[i] = annotator.annotate_document(docs[i]); });
  emit(ctx, a.output, [&](std::ostream& os) { write_annotations(os, annotated, ctx.g.seed); });
  ctx.note("annotated " + std::to_string(docs.size()) + " documents");
  return kOk;
}

struct FeaturizeArgs {
  std::string annotations, corpus, output, lexicons;
  bool strict = false;
};

int cmd_featurize(Context& ctx, const FeaturizeArgs& a) {
  require_output(a.output);
  if (a.annotations.empty() == a.corpus.empty())
    throw UsageError("give exactly one of --annotations or --corpus");
  const LexiconSet lex = load_lexicons(ctx, Resolver::make(ctx.g).lexicon_manifest(a.lexicons));
  std::vector<AnnotatedDocument> docs;
  if (!a.annotations.empty()) {
    require_file(a.annotations, "annotation file");
    docs = ingest_annotations(a.annotations);
  } else {
    const auto corpus = load_docs(ctx, a.corpus);
    const HeuristicAnnotator annotator(lex);
    docs.resize(corpus.size());
    parallel_for(corpus.size(), ctx.g.jobs,
                 [&](std::size_t i) { docs[i] = annotator.annotate_document(corpus[i]); });
  }
  auto batch = batch_extract(docs, lex, build_manifest(lex.glossary), ctx.g.jobs);
  for (const auto& e : batch.errors) ctx.warn("skipped '" + e.id + "': " + e.message);
  if (a.strict && !batch.errors.empty())
    throw ExtractionError(std::to_string(batch.errors.size()) + " documents failed extraction");
  emit(ctx, a.output, [&](std::ostream& os) { write_feature_csv(os, batch.table, ctx.g.seed); });
  ctx.note("featurized " + std::to_string(batch.table.ids.size()) + " documents");
  return kOk;
}

struct TrainArgs {
  std::string corpus, features, output, lexicons, embeddings, model = "svm_rbf",
                                                              mode = "linguistic_only", hp;
};

int cmd_train(Context& ctx, const TrainArgs& a) {
  require_output(a.output);
  const ModelKind kind = model_arg(a.model);
  const FeatureMode mode = mode_arg(a.mode);
  const Hyperparameters hp = hyperparameters_arg(kind, a.hp);
  const Resolver res = Resolver::make(ctx.g);
  auto emb = load_embeddings(a.embeddings, res);
  auto docs = load_docs(ctx, a.corpus);
  std::optional<LexiconSet> lex;
  if (a.features.empty() && kind != ModelKind::embedding_linear)
    lex = load_lexicons(ctx, res.lexicon_manifest(a.lexicons));
  Rows rows;
  if (kind == ModelKind::embedding_linear) {
    rows.docs = docs;
    for (const auto& d : docs) rows.table.ids.push_back(d.id);
  } else {
    rows = feature_rows(ctx, std::move(docs), a.features, lex ? &*lex : nullptr);
  }
  const Design d = design_for_training(kind, mode, rows, emb ? &*emb : nullptr);
  TrainedModel model = train(kind, d.x, labels_of(rows.docs), d.manifest, hp, ctx.g.seed);
  model.meta.corpus_hash = corpus_hash(rows.docs);
  model.meta.date = format_time(now(), "%Y-%m-%d");
  if (!model.meta.converged) ctx.warn("training did not converge");
  emit(ctx, a.output, [&](std::ostream& os) { save_model(os, model); });
  ctx.note("trained " + std::string(to_string(kind)) + " on " + std::to_string(d.x.rows()) +
           " documents");
  return kOk;
}

struct PredictArgs {
  std::string model, corpus, features, output, lexicons, embeddings;
  bool allow_mismatch = false;
  std::size_t top = 5;
};

int cmd_predict(Context& ctx, const PredictArgs& a) {
  require_output(a.output);
  require_file(a.model, "model");
  const TrainedModel model = load_model(fs::path(a.model));
  const Resolver res = Resolver::make(ctx.g);
  auto emb = load_embeddings(a.embeddings, res);
  auto docs = load_docs(ctx, a.corpus);
  Rows rows;
  if (model.kind == ModelKind::embedding_linear) {
    rows.docs = docs;
    for (const auto& d : docs) rows.table.ids.push_back(d.id);
  } else {
    const LexiconSet lex = load_lexicons(ctx, res.lexicon_manifest(a.lexicons));
    check_glossary(ctx, model, lex, a.allow_mismatch);
    rows = feature_rows(ctx, std::move(docs), a.features, &lex);
    if (!a.features.empty() && !rows.table.manifest.glossary_hash.empty() &&
        rows.table.manifest.glossary_hash != model.manifest.glossary_hash &&
        !model.manifest.glossary_hash.empty()) {
      const std::string msg = "feature table was built with glossary " +
                              rows.table.manifest.glossary_hash + " but the model expects " +
                              model.manifest.glossary_hash;
      if (!a.allow_mismatch) throw ContractError(msg + " (pass --allow-glossary-mismatch)");
      ctx.warn(msg);
    }
  }
  const Design d = design_for_model(model, rows, emb ? &*emb : nullptr);
  const Prediction p = predict(model, d.x, d.manifest);
  const bool linear = std::holds_alternative<LinearParams>(model.params);
  emit(ctx, a.output, [&](std::ostream& os) {
    os << "# " << kPredictionFormat << ' ' << kPredictionVersion << " seed=" << ctx.g.seed
       << " model=" << to_string(model.kind) << '\n';
    os << "id,stance,score" << (linear ? ",top_features" : "") << '\n';
    for (std::size_t i = 0; i < rows.docs.size(); ++i) {
      os << io::csv_escape(rows.docs[i].id) << ',' << to_string(stance_of(p.labels[i])) << ','
         << io::format_double(p.scores[i]);
      if (linear) os << ',' << io::csv_escape(top_contributions(model, d.x.row(i), a.top));
      os << '\n';
    }
  });
  ctx.note("predicted " + std::to_string(rows.docs.size()) + " documents");
  return kOk;
}

struct ExperimentArgs {
  std::string config, output_dir = "runs", embeddings, corpus;
};

// Config paths must exist; the diagnostic names the config field.
void check_config_path(const std::optional<fs::path>& p, const std::string& field) {
  if (p && !fs::is_regular_file(*p))
    throw ConfigError("config field 'resources." + field + "': file not found: " + p->string());
}

ExperimentReport run_configured(Context& ctx, ExperimentConfig cfg, const std::string& emb_flag) {
  if (ctx.g.seed_given) cfg.seed = ctx.g.seed;
  check_config_path(cfg.corpus, "corpus");
  check_config_path(cfg.sources, "sources");
  check_config_path(cfg.lexicons, "lexicons");
  check_config_path(cfg.embeddings, "embeddings");
  if (!cfg.corpus) throw ConfigError("config field 'resources.corpus': required field is missing");
  Resolver res = Resolver::make(ctx.g);
  const fs::path lex_path = cfg.lexicons ? *cfg.lexicons : res.lexicon_manifest("");
  std::optional<EmbeddingTable> emb;
  if (!emb_flag.empty()) emb = load_embeddings(emb_flag, res);
  else if (cfg.embeddings) emb = read_embedding_table(*cfg.embeddings);
  if (cfg.model == ModelKind::embedding_linear && !emb)
    throw ConfigError("config field 'resources.embeddings': required for embedding_linear");
  std::optional<SourceStanceMap> map;
  if (cfg.sources) map = SourceStanceMap::load(*cfg.sources);
  const LexiconSet lex = load_lexicons(ctx, lex_path);
  const auto docs = load_docs(ctx, *cfg.corpus, map ? &*map : nullptr);
  return run_experiment(cfg, docs, lex, emb ? &*emb : nullptr, ctx.g.jobs);
}

int cmd_experiment(Context& ctx, const ExperimentArgs& a) {
  const std::string cfg_path = !a.config.empty() ? a.config : ctx.g.config;
  if (cfg_path.empty()) throw UsageError("experiment needs a config (--config)");
  require_file(cfg_path, "config");
  if (!fs::is_directory(a.output_dir)) fs::create_directories(a.output_dir);
  ExperimentConfig cfg = load_experiment_config(cfg_path);
  if (!a.corpus.empty()) {
    require_file(a.corpus, "corpus");
    cfg.corpus = a.corpus;
  }
  const ExperimentReport rep = run_configured(ctx, cfg, a.embeddings);
  const std::uint64_t seed = rep.config.seed;

  const std::string run_name =
      rep.config.name + "-" + format_time(now(), "%Y%m%dT%H%M%SZ") + "-seed" + std::to_string(seed);
  const fs::path final_dir = fs::path(a.output_dir) / run_name;
  const fs::path temp_dir = fs::path(a.output_dir) / ("." + run_name + ".partial");
  fs::remove_all(temp_dir);
  fs::create_directories(temp_dir);
  try {
    json report = rep.to_json();
    report["seed"] = seed;
    io::write_file_atomic(temp_dir / "report.json", report.dump(2) + "\n");
    std::ostringstream summary, preds, breakdown;
    write_summary(summary, {rep}, seed);
    preds << "# " << kPredictionFormat << ' ' << kPredictionVersion << " seed=" << seed << '\n';
    write_predictions_csv(preds, rep);
    write_breakdown_csv(breakdown, per_language_breakdown(rep));
    io::write_file_atomic(temp_dir / "summary.csv", summary.str());
    io::write_file_atomic(temp_dir / "predictions.csv", preds.str());
    io::write_file_atomic(temp_dir / "breakdown.csv", breakdown.str());
    if (fs::exists(final_dir)) fs::remove_all(final_dir);
    fs::rename(temp_dir, final_dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(temp_dir, ec);
    throw;
  }
  ctx.out << final_dir.string() << '\n';
  ctx.note(rep.config.name + ": F1=" + io::format_double(rep.f1) +
           " kappa=" + io::format_double(rep.kappa));
  return kOk;
}

struct XvalArgs {
  std::string corpus, output, lexicons, sources, embeddings, model = "svm_rbf",
                                                             mode = "linguistic_only", hp;
  int k = 5;
  bool no_language_strata = false;
};

int cmd_xval(Context& ctx, const XvalArgs& a) {
  require_output(a.output);
  ExperimentConfig cfg;
  cfg.name = "xval";
  cfg.protocol = Protocol::kfold;
  cfg.k = a.k;
  cfg.seed = ctx.g.seed;
  cfg.stratify_language = !a.no_language_strata;
  cfg.model = model_arg(a.model);
  cfg.features = mode_arg(a.mode);
  cfg.hyperparameters = hyperparameters_arg(cfg.model, a.hp);
  cfg.corpus = a.corpus;
  require_file(a.corpus, "corpus");
  if (!a.sources.empty()) cfg.sources = a.sources;
  if (!a.lexicons.empty()) cfg.lexicons = a.lexicons;
  ctx.g.seed_given = true;
  const ExperimentReport rep = run_configured(ctx, cfg, a.embeddings);
  emit(ctx, a.output, [&](std::ostream& os) { write_summary(os, {rep}, cfg.seed); });
  ctx.note("F1=" + io::format_double(rep.f1) + " kappa=" + io::format_double(rep.kappa) +
           " mean_F1=" + io::format_double(rep.mean_f1));
  return kOk;
}

struct ImportanceArgs {
  std::string model, corpus, features, output, lexicons, embeddings;
  std::size_t repeats = 20, top_k = 10;
  bool allow_mismatch = false;
};

int cmd_importance(Context& ctx, const ImportanceArgs& a) {
  require_output(a.output);
  require_file(a.model, "model");
  const TrainedModel model = load_model(fs::path(a.model));
  const Resolver res = Resolver::make(ctx.g);
  auto emb = load_embeddings(a.embeddings, res);
  auto docs = load_docs(ctx, a.corpus);
  Rows rows;
  if (model.kind == ModelKind::embedding_linear) {
    rows.docs = docs;
    for (const auto& d : docs) rows.table.ids.push_back(d.id);
  } else {
    const LexiconSet lex = load_lexicons(ctx, res.lexicon_manifest(a.lexicons));
    check_glossary(ctx, model, lex, a.allow_mismatch);
    rows = feature_rows(ctx, std::move(docs), a.features, &lex);
  }
  const Design d = design_for_model(model, rows, emb ? &*emb : nullptr);
  ImportanceOptions opts;
  opts.repeats = a.repeats;
  opts.seed = ctx.g.seed;
  opts.jobs = ctx.g.jobs;
  const ImportanceReport rep =
      permutation_importance(model, d.x, labels_of(rows.docs), d.manifest, opts);
  const RankedImportance ranked = rank_importance(rep, a.top_k);
  emit(ctx, a.output, [&](std::ostream& os) { write_importance_csv(os, rep, ranked); });
  ctx.note("baseline F1=" + io::format_double(rep.baseline_f1));
  return kOk;
}

struct TrendsArgs {
  std::string corpus, features, output, group_by = "date", baseline, comparison, delta_output;
  double threshold = 0.25;
};

int cmd_trends(Context& ctx, const TrendsArgs& a) {
  require_output(a.output);
  require_output(a.delta_output);
  std::vector<GroupKey> keys;
  for (const auto& k : text::split(a.group_by, ','))
    if (!text::trim(k).empty()) keys.push_back(parse_group_key(text::trim(k)));
  if (a.baseline.empty() != a.comparison.empty())
    throw UsageError("--baseline and --comparison go together");
  const auto docs = load_docs(ctx, a.corpus);
  require_file(a.features, "feature table");
  const FeatureTable table = read_feature_csv(fs::path(a.features));
  const auto summaries = summarize(docs, table, keys, ctx.g.jobs);
  emit(ctx, a.output, [&](std::ostream& os) {
    write_trends_csv(os, summaries, table.manifest, keys, ctx.g.seed);
  });
  if (!a.baseline.empty()) {
    const auto rows = delta_report(summaries, table.manifest, a.baseline, a.comparison, a.threshold);
    const std::string path = a.delta_output.empty() ? "-" : a.delta_output;
    if (path == "-" && (a.output.empty() || a.output == "-")) ctx.out << '\n';
    emit(ctx, path, [&](std::ostream& os) {
      os << "# stancekit-delta 1 seed=" << ctx.g.seed << " threshold=" << io::format_double(a.threshold) << '\n';
      write_delta_csv(os, rows);
    });
    std::size_t flagged = 0;
    for (const auto& r : rows) flagged += r.flagged;
    ctx.note(std::to_string(flagged) + " features flagged between " + a.baseline + " and " +
             a.comparison);
  }
  return kOk;
}

struct ValidateArgs {
  std::string lexicons;
};

int cmd_validate(Context& ctx, const ValidateArgs& a) {
  const LexiconSet lex = load_lexicons(ctx, Resolver::make(ctx.g).lexicon_manifest(a.lexicons));
  const ValidationReport rep = validate_lexicon_set(lex);
  for (const auto& item : rep.items)
    if (item.severity != Severity::info || !ctx.g.quiet)
      ctx.out << to_string(item.severity) << ": " << item.message << '\n';
  ctx.out << "glossary " << lex.glossary.hash() << ": " << lex.glossary.size() << " entries, "
          << rep.count(Severity::error) << " errors, " << rep.count(Severity::warning)
          << " warnings\n";
  return rep.count(Severity::error) ? kParse : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stancekit: interpretable stance classification for news and Telegram texts"};
  app.name(args.empty() ? "stancekit" : fs::path(args[0]).filename().string());
  app.require_subcommand(1, 1);
  app.footer(
      "File formats: stancekit-corpus 1, stancekit-annotations 1, stancekit-features 1,\n"
      "stancekit-model 1, stancekit-embeddings 1, stancekit-lexicons 1, stancekit-predictions 1,\n"
      "stancekit-importance 1, stancekit-trends 1, stancekit-summary 1.\n"
      "Exit codes: 0 success, 1 usage, 2 input parse, 3 contract or hash mismatch, 4 internal.\n"
      "Resources default to $" + std::string(kResourceEnv) + " (lexicons/manifest.json, "
      "source_stance.tsv).");

  Context ctx{{}, out, err};
  Globals& g = ctx.g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for every random choice")
                       ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker thread cap")->capture_default_str()->check(
      CLI::Range(1u, 1024u));
  app.add_option("--config", g.config, "Experiment config JSON; its resources block also "
                                      "supplies default paths");
  app.add_option("--resources", g.resources, "Resource directory (overrides $" +
                                                 std::string(kResourceEnv) + ")");
  app.add_flag("--quiet", g.quiet, "Suppress progress notes on stderr");

  std::function<int()> action;

  IngestArgs ia;
  auto* ingest = app.add_subcommand(
      "ingest", "Validate, normalize and label a raw corpus.\n"
                "Reads JSON lines (id, text, language, genre, source, collected_on); "
                "writes stancekit-corpus 1.");
  ingest->add_option("-i,--input", ia.input, "Raw corpus")->required();
  ingest->add_option("-o,--output", ia.output, "Output corpus (stdout when omitted)");
  ingest->add_option("--sources", ia.sources, "Source-to-stance TSV");
  ingest->add_flag("--keep-labels", ia.keep_labels,
                   "Keep explicit stance fields instead of mapping sources");
  ingest->callback([&] { action = [&] { return cmd_ingest(ctx, ia); }; });

  AnnotateArgs aa;
  auto* annotate = app.add_subcommand(
      "annotate", "Tokenize, segment and tag documents with the built-in annotator.\n"
                  "Reads stancekit-corpus 1 and stancekit-lexicons 1; writes "
                  "stancekit-annotations 1.");
  annotate->add_option("-i,--input", aa.input, "Corpus")->required();
  annotate->add_option("-o,--output", aa.output, "Annotation file (stdout when omitted)");
  annotate->add_option("--lexicons", aa.lexicons, "Lexicon manifest");
  annotate->callback([&] { action = [&] { return cmd_annotate(ctx, aa); }; });

  FeaturizeArgs fa;
  auto* featurize = app.add_subcommand(
      "featurize", "Extract length-normalized features.\n"
                   "Reads stancekit-annotations 1 (from any tagger) or stancekit-corpus 1; "
                   "writes stancekit-features 1.");
  featurize->add_option("--annotations", fa.annotations, "Annotation file");
  featurize->add_option("--corpus", fa.corpus, "Corpus, annotated on the fly");
  featurize->add_option("-o,--output", fa.output, "Feature CSV (stdout when omitted)");
  featurize->add_option("--lexicons", fa.lexicons, "Lexicon manifest");
  featurize->add_flag("--strict", fa.strict, "Fail when any document cannot be featurized");
  featurize->callback([&] { action = [&] { return cmd_featurize(ctx, fa); }; });

  TrainArgs ta;
  auto* trainc = app.add_subcommand(
      "train", "Train one model on a labeled corpus.\n"
               "Reads stancekit-corpus 1, optionally stancekit-features 1 or "
               "stancekit-embeddings 1; writes stancekit-model 1.");
  trainc->add_option("--corpus", ta.corpus, "Labeled corpus")->required();
  trainc->add_option("--features", ta.features, "Precomputed feature CSV");
  trainc->add_option("--model", ta.model,
                     "svm_rbf, logistic, tree, mlp or embedding_linear")->capture_default_str();
  trainc->add_option("--feature-mode", ta.mode, "linguistic_only or linguistic_plus_keywords")
      ->capture_default_str();
  trainc->add_option("--hyperparameters", ta.hp, "JSON object or path to a JSON file");
  trainc->add_option("--embeddings", ta.embeddings, "Embedding table");
  trainc->add_option("--lexicons", ta.lexicons, "Lexicon manifest");
  trainc->add_option("-o,--output", ta.output, "Model file")->required();
  trainc->callback([&] { action = [&] { return cmd_train(ctx, ta); }; });

  PredictArgs pa;
  auto* predictc = app.add_subcommand(
      "predict", "Label documents with a trained model.\n"
                 "Reads stancekit-model 1 and stancekit-corpus 1; writes "
                 "stancekit-predictions 1 (id, stance, score, top_features for linear models).");
  predictc->add_option("--model", pa.model, "Model file")->required();
  predictc->add_option("--corpus", pa.corpus, "Corpus")->required();
  predictc->add_option("--features", pa.features, "Precomputed feature CSV");
  predictc->add_option("--embeddings", pa.embeddings, "Embedding table");
  predictc->add_option("--lexicons", pa.lexicons, "Lexicon manifest");
  predictc->add_option("--top", pa.top, "Contributions listed per document")
      ->capture_default_str();
  predictc->add_flag("--allow-glossary-mismatch", pa.allow_mismatch,
                     "Continue with a warning when the glossary hash differs");
  predictc->add_option("-o,--output", pa.output, "Prediction CSV")->required();
  predictc->callback([&] { action = [&] { return cmd_predict(ctx, pa); }; });

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand(
      "experiment", "Run a configured experiment and write a run directory.\n"
                    "Reads an experiment config JSON; writes report.json, summary.csv "
                    "(stancekit-summary 1), predictions.csv and breakdown.csv.");
  experiment->add_option("config", ea.config, "Experiment config (or global --config)");
  experiment->add_option("-o,--output-dir", ea.output_dir, "Parent of the run directory")
      ->capture_default_str();
  experiment->add_option("--embeddings", ea.embeddings, "Embedding table override");
  experiment->add_option("--corpus", ea.corpus, "Corpus override for resources.corpus");
  experiment->callback([&] { action = [&] { return cmd_experiment(ctx, ea); }; });

  XvalArgs xa;
  auto* xval = app.add_subcommand(
      "xval", "Stratified k-fold cross-validation on one corpus.\n"
              "Reads stancekit-corpus 1; writes stancekit-summary 1.");
  xval->add_option("--corpus", xa.corpus, "Labeled corpus")->required();
  xval->add_option("-k,--folds", xa.k, "Number of folds")->capture_default_str();
  xval->add_option("--model", xa.model, "Model kind")->capture_default_str();
  xval->add_option("--feature-mode", xa.mode, "Feature mode")->capture_default_str();
  xval->add_option("--hyperparameters", xa.hp, "JSON object or path to a JSON file");
  xval->add_option("--sources", xa.sources, "Relabel documents from this source map");
  xval->add_option("--lexicons", xa.lexicons, "Lexicon manifest");
  xval->add_option("--embeddings", xa.embeddings, "Embedding table");
  xval->add_flag("--no-language-strata", xa.no_language_strata,
                 "Stratify by stance only");
  xval->add_option("-o,--output", xa.output, "Summary CSV (stdout when omitted)");
  xval->callback([&] { action = [&] { return cmd_xval(ctx, xa); }; });

  ImportanceArgs ma;
  auto* importance = app.add_subcommand(
      "importance", "Permutation importance on labeled held-out documents.\n"
                    "Reads stancekit-model 1 and stancekit-corpus 1; writes "
                    "stancekit-importance 1 (percentage points).");
  importance->add_option("--model", ma.model, "Model file")->required();
  importance->add_option("--corpus", ma.corpus, "Labeled held-out corpus")->required();
  importance->add_option("--features", ma.features, "Precomputed feature CSV");
  importance->add_option("--embeddings", ma.embeddings, "Embedding table");
  importance->add_option("--lexicons", ma.lexicons, "Lexicon manifest");
  importance->add_option("--repeats", ma.repeats, "Shuffles per feature")->capture_default_str();
  importance->add_option("--top-k", ma.top_k, "Rows per group")->capture_default_str();
  importance->add_flag("--allow-glossary-mismatch", ma.allow_mismatch,
                       "Continue with a warning when the glossary hash differs");
  importance->add_option("-o,--output", ma.output, "Importance CSV (stdout when omitted)");
  importance->callback([&] { action = [&] { return cmd_importance(ctx, ma); }; });

  TrendsArgs ra;
  auto* trends = app.add_subcommand(
      "trends", "Boxplot statistics of features per group.\n"
                "Reads stancekit-corpus 1 and stancekit-features 1; writes stancekit-trends 1.");
  trends->add_option("--corpus", ra.corpus, "Corpus with dates and labels")->required();
  trends->add_option("--features", ra.features, "Feature CSV")->required();
  trends->add_option("--group-by", ra.group_by, "Comma list of date, language, stance, genre")
      ->capture_default_str();
  trends->add_option("--baseline", ra.baseline, "Group label for the delta report");
  trends->add_option("--comparison", ra.comparison, "Group label for the delta report");
  trends->add_option("--threshold", ra.threshold, "Relative median change that flags a feature")
      ->capture_default_str();
  trends->add_option("--delta-output", ra.delta_output, "Delta CSV (stdout when omitted)");
  trends->add_option("-o,--output", ra.output, "Trends CSV (stdout when omitted)");
  trends->callback([&] { action = [&] { return cmd_trends(ctx, ra); }; });

  ValidateArgs va;
  auto* validate = app.add_subcommand(
      "validate-lexicons", "Check a lexicon set for coverage and consistency.\n"
                           "Reads stancekit-lexicons 1. Exit code 2 when errors are found.");
  validate->add_option("--lexicons", va.lexicons, "Lexicon manifest");
  validate->callback([&] { action = [&] { return cmd_validate(ctx, va); }; });

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help requests surface as CallForHelp from the subcommand.
    err << app.get_name() << ": " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    return action();
  } catch (const UsageError& e) {
    err << app.get_name() << ": " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << app.get_name() << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << app.get_name() << ": internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace stancekit::cli

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

#include "stancekit/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "stancekit/annotate.hpp"
#include "stancekit/error.hpp"
#include "stancekit/io.hpp"
#include "stancekit/parallel.hpp"

namespace stancekit {

using nlohmann::json;

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth > 0) (predicted > 0 ? tp : fn) += 1;
  else (predicted > 0 ? fp : tn) += 1;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw ContractError("label vectors differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

double f1_score(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw MetricError("F1 of an empty confusion matrix");
  if (cm.tp == 0) return 0.0;
  const double tp = static_cast<double>(cm.tp);
  const double p = tp / static_cast<double>(cm.tp + cm.fp);
  const double r = tp / static_cast<double>(cm.tp + cm.fn);
  return 2.0 * p * r / (p + r);
}

double cohens_kappa(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw MetricError("kappa of an empty confusion matrix");
  const double n = static_cast<double>(cm.total());
  const double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn), tn = static_cast<double>(cm.tn);
  const double po = (tp + tn) / n;
  const double pe = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n);
  if (pe == 1.0) return 0.0;
  return (po - pe) / (1.0 - pe);
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw MetricError("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

// --- dataset ---

Dataset build_dataset(const std::vector<Document>& docs, const LexiconSet& lexicons,
                      unsigned jobs) {
  const HeuristicAnnotator annotator(lexicons);
  std::vector<std::optional<AnnotatedDocument>> annotated(docs.size());
  std::vector<std::string> failures(docs.size());
  parallel_for(docs.size(), jobs, [&](std::size_t i) {
    try {
      annotated[i] = annotator.annotate_document(docs[i]);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });
  Dataset out;
  std::vector<AnnotatedDocument> ok;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (annotated[i]) {
      index.emplace(docs[i].id, i);
      ok.push_back(std::move(*annotated[i]));
    } else {
      out.dropped.push_back({docs[i].id, failures[i]});
    }
  }
  auto batch = batch_extract(ok, lexicons, build_manifest(lexicons.glossary), jobs);
  for (auto& e : batch.errors) out.dropped.push_back(std::move(e));
  out.features = std::move(batch.table);
  for (const auto& id : out.features.ids) out.docs.push_back(docs[index.at(id)]);
  return out;
}

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::kfold: return "kfold";
    case Protocol::holdout: return "holdout";
    case Protocol::transfer: return "transfer";
  }
  return "?";
}

// --- config ---

namespace {

json filter_json(const DocFilter& f) {
  json j = json::object();
  if (!f.languages.empty()) {
    j["languages"] = json::array();
    for (auto l : f.languages) j["languages"].push_back(std::string(to_string(l)));
  }
  if (!f.genres.empty()) {
    j["genres"] = json::array();
    for (auto g : f.genres) j["genres"].push_back(std::string(to_string(g)));
  }
  if (!f.stances.empty()) {
    j["stances"] = json::array();
    for (auto s : f.stances) j["stances"].push_back(std::string(to_string(s)));
  }
  return j;
}

std::string describe(const DocFilter& f) {
  const json j = filter_json(f);
  return j.empty() ? "{}" : j.dump();
}

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw ConfigError("config field '" + field + "': " + msg);
}

template <typename T, typename Parse>
std::set<T> parse_set(const json& j, const std::string& field, Parse parse) {
  if (!j.is_array()) field_error(field, "expected a list of strings");
  std::set<T> out;
  for (const auto& v : j) {
    if (!v.is_string()) field_error(field, "expected a list of strings");
    auto x = parse(v.get<std::string>());
    if (!x) field_error(field, "unknown value '" + v.get<std::string>() + "'");
    out.insert(*x);
  }
  return out;
}

DocFilter parse_filter(const json& j, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object");
  DocFilter f;
  for (const auto& [key, value] : j.items()) {
    if (key == "languages")
      f.languages = parse_set<Language>(value, field + ".languages", parse_language);
    else if (key == "genres")
      f.genres = parse_set<Genre>(value, field + ".genres", parse_genre);
    else if (key == "stances")
      f.stances = parse_set<Stance>(value, field + ".stances", parse_stance);
    else
      field_error(field + "." + key, "unknown field");
  }
  return f;
}

}  // namespace

json ExperimentConfig::to_json() const {
  json j = {{"name", name},
            {"protocol", std::string(stancekit::to_string(protocol))},
            {"seed", seed},
            {"stratify_language", stratify_language},
            {"train", filter_json(train)},
            {"model",
             {{"kind", std::string(stancekit::to_string(model))},
              {"hyperparameters", hyperparameters_to_json(model, hyperparameters)}}},
            {"features", std::string(stancekit::to_string(features))}};
  if (protocol == Protocol::kfold) j["k"] = k;
  if (protocol == Protocol::holdout) j["holdout_fraction"] = holdout_fraction;
  if (protocol == Protocol::transfer) {
    j["test"] = filter_json(test);
    j["test_fraction"] = test_fraction;
  }
  return j;
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("experiment config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  auto req = [&](const char* key) -> const json& {
    if (!j.contains(key)) field_error(key, "required field is missing");
    return j.at(key);
  };
  auto str = [&](const json& v, const std::string& field) {
    if (!v.is_string()) field_error(field, "expected a string");
    return v.get<std::string>();
  };
  auto path = [&](const json& v, const std::string& field) {
    std::filesystem::path p = str(v, field);
    if (p.empty()) field_error(field, "path is empty");
    return p.is_absolute() || base.empty() ? p : base / p;
  };

  cfg.name = str(req("name"), "name");
  if (cfg.name.empty()) field_error("name", "must not be empty");
  const std::string protocol = str(req("protocol"), "protocol");
  if (protocol == "kfold") cfg.protocol = Protocol::kfold;
  else if (protocol == "holdout") cfg.protocol = Protocol::holdout;
  else if (protocol == "transfer") cfg.protocol = Protocol::transfer;
  else field_error("protocol", "expected kfold, holdout or transfer, got '" + protocol + "'");
  cfg.train = parse_filter(req("train"), "train");

  const json& model = req("model");
  if (!model.is_object() || !model.contains("kind")) field_error("model.kind", "required field is missing");
  const std::string kind = str(model.at("kind"), "model.kind");
  auto mk = parse_model_kind(kind);
  if (!mk) field_error("model.kind", "unknown model kind '" + kind + "'");
  cfg.model = *mk;
  for (const auto& [key, _] : model.items())
    if (key != "kind" && key != "hyperparameters") field_error("model." + key, "unknown field");
  try {
    cfg.hyperparameters = hyperparameters_from_json(
        cfg.model, model.contains("hyperparameters") ? model.at("hyperparameters") : json());
  } catch (const ConfigError& e) {
    field_error("model.hyperparameters", e.what());
  }

  for (const auto& [key, value] : j.items()) {
    if (key == "name" || key == "protocol" || key == "train" || key == "model") continue;
    if (key == "k") {
      if (!value.is_number_integer() || value.get<int>() < 2) field_error("k", "expected an integer >= 2");
      cfg.k = value.get<int>();
    } else if (key == "holdout_fraction" || key == "test_fraction") {
      if (!value.is_number()) field_error(key, "expected a number");
      const double f = value.get<double>();
      if (!(f > 0.0 && f <= 1.0)) field_error(key, "must lie in (0, 1]");
      (key == "holdout_fraction" ? cfg.holdout_fraction : cfg.test_fraction) = f;
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) field_error("seed", "expected a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "stratify_language") {
      if (!value.is_boolean()) field_error(key, "expected true or false");
      cfg.stratify_language = value.get<bool>();
    } else if (key == "test") {
      cfg.test = parse_filter(value, "test");
    } else if (key == "features") {
      auto m = parse_feature_mode(str(value, "features"));
      if (!m) field_error("features", "expected linguistic_only or linguistic_plus_keywords");
      cfg.features = *m;
    } else if (key == "resources") {
      if (!value.is_object()) field_error("resources", "expected an object");
      for (const auto& [rk, rv] : value.items()) {
        const std::string field = "resources." + rk;
        if (rk == "corpus") cfg.corpus = path(rv, field);
        else if (rk == "sources") cfg.sources = path(rv, field);
        else if (rk == "lexicons") cfg.lexicons = path(rv, field);
        else if (rk == "embeddings") cfg.embeddings = path(rv, field);
        else field_error(field, "unknown field");
      }
    } else {
      field_error(key, "unknown field");
    }
  }
  if (cfg.protocol == Protocol::transfer && !j.contains("test"))
    field_error("test", "required for the transfer protocol");
  if (cfg.protocol != Protocol::transfer && j.contains("test"))
    field_error("test", "only valid with the transfer protocol");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_experiment_config(text, path.parent_path());
}

// --- runner ---

namespace {

struct FoldPlan {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

std::vector<std::size_t> rows_for(const std::vector<std::string>& ids,
                                  const std::unordered_map<std::string, std::size_t>& row_of) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(row_of.at(id));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FoldPlan> plan_folds(const ExperimentConfig& cfg, const Dataset& data) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < data.docs.size(); ++i) row_of.emplace(data.docs[i].id, i);

  std::vector<Document> train_docs;
  for (const auto& d : data.docs)
    if (d.stance && cfg.train.matches(d)) train_docs.push_back(d);
  if (train_docs.empty())
    throw ConfigError("train filter " + describe(cfg.train) + " selects no labeled documents");

  std::vector<FoldPlan> plans;
  if (cfg.protocol == Protocol::transfer) {
    std::vector<Document> test_docs;
    for (const auto& d : data.docs)
      if (d.stance && cfg.test.matches(d)) test_docs.push_back(d);
    if (test_docs.empty())
      throw ConfigError("test filter " + describe(cfg.test) + " selects no labeled documents");
    std::unordered_set<std::string> train_ids;
    for (const auto& d : train_docs) train_ids.insert(d.id);
    std::size_t overlap = 0;
    for (const auto& d : test_docs) overlap += train_ids.count(d.id);
    if (overlap > 0)
      throw ConfigError("train filter " + describe(cfg.train) + " and test filter " +
                        describe(cfg.test) + " overlap on " + std::to_string(overlap) +
                        " documents");
    std::vector<std::string> test_ids;
    if (cfg.test_fraction < 1.0) {
      test_ids = stratified_holdout(test_docs, cfg.test_fraction, cfg.seed, cfg.stratify_language)
                     .folds.at(0)
                     .test_ids;
    } else {
      for (const auto& d : test_docs) test_ids.push_back(d.id);
    }
    std::vector<std::string> tr;
    for (const auto& d : train_docs) tr.push_back(d.id);
    plans.push_back({rows_for(tr, row_of), rows_for(test_ids, row_of)});
    return plans;
  }

  const SplitPlan split = cfg.protocol == Protocol::kfold
                              ? stratified_kfold(train_docs, cfg.k, cfg.seed, cfg.stratify_language)
                              : stratified_holdout(train_docs, cfg.holdout_fraction, cfg.seed,
                                                   cfg.stratify_language);
  for (const auto& f : split.folds)
    plans.push_back({rows_for(f.train_ids, row_of), rows_for(f.test_ids, row_of)});
  return plans;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& data,
                                const EmbeddingTable* embeddings, unsigned jobs) {
  if (data.docs.size() != data.features.matrix.rows())
    throw ContractError("dataset documents and feature rows differ in count");

  Matrix x;
  FeatureManifest manifest;
  if (cfg.model == ModelKind::embedding_linear) {
    if (!embeddings) throw ConfigError("config field 'resources.embeddings': required for embedding_linear");
    x = embeddings->rows(data.features.ids);
    manifest = embedding_manifest(embeddings->dimension);
  } else {
    manifest = feature_mode(data.features.manifest, cfg.features);
    std::vector<std::size_t> cols;
    for (const auto& n : manifest.names) {
      auto idx = data.features.manifest.index_of(n);
      if (!idx) throw ContractError("feature table lacks column '" + n + "'");
      cols.push_back(*idx);
    }
    x = data.features.matrix.select_cols(cols);
  }
  std::vector<int> labels(data.docs.size(), 0);
  for (std::size_t i = 0; i < data.docs.size(); ++i)
    if (data.docs[i].stance) labels[i] = label_of(*data.docs[i].stance);

  const auto plans = plan_folds(cfg, data);
  std::vector<FoldResult> results(plans.size());
  std::vector<std::vector<DocPrediction>> preds(plans.size());
  // Folds run concurrently; each fold trains single-threaded.
  parallel_for(plans.size(), jobs, [&](std::size_t f) {
    const auto& plan = plans[f];
    std::vector<int> ytr, yte;
    for (auto r : plan.train_rows) ytr.push_back(labels[r]);
    for (auto r : plan.test_rows) yte.push_back(labels[r]);
    const TrainedModel model =
        train(cfg.model, x.select_rows(plan.train_rows), ytr, manifest, cfg.hyperparameters,
              cfg.seed + f);
    const Prediction p = predict(model, x.select_rows(plan.test_rows));
    FoldResult& res = results[f];
    res.fold = f;
    res.train_size = plan.train_rows.size();
    res.test_size = plan.test_rows.size();
    res.cm = confusion(yte, p.labels);
    res.f1 = f1_score(res.cm);
    res.kappa = cohens_kappa(res.cm);
    res.converged = model.meta.converged;
    for (std::size_t k = 0; k < plan.test_rows.size(); ++k) {
      const auto& d = data.docs[plan.test_rows[k]];
      preds[f].push_back({d.id, d.language, d.genre, f, yte[k], p.labels[k], p.scores[k]});
    }
  });

  ExperimentReport rep;
  rep.config = cfg;
  rep.folds = std::move(results);
  for (const auto& r : rep.folds) {
    rep.aggregate += r.cm;
    rep.mean_f1 += r.f1;
    rep.mean_kappa += r.kappa;
  }
  rep.mean_f1 /= static_cast<double>(rep.folds.size());
  rep.mean_kappa /= static_cast<double>(rep.folds.size());
  rep.f1 = f1_score(rep.aggregate);
  rep.kappa = cohens_kappa(rep.aggregate);
  for (std::size_t f = 1; f < rep.folds.size(); ++f) {
    const auto& a = rep.folds[f];
    const auto& b = rep.folds[rep.best_fold];
    if (a.kappa > b.kappa || (a.kappa == b.kappa && a.f1 > b.f1)) rep.best_fold = f;
  }
  for (auto& p : preds)
    for (auto& d : p) rep.predictions.push_back(std::move(d));
  rep.corpus_hash = corpus_hash(data.docs);
  rep.glossary_hash = data.features.manifest.glossary_hash;
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::vector<Document>& corpus,
                                const LexiconSet& lexicons, const EmbeddingTable* embeddings,
                                unsigned jobs) {
  // Only documents some filter can reach are annotated.
  std::vector<Document> selected;
  for (const auto& d : corpus)
    if (cfg.train.matches(d) || (cfg.protocol == Protocol::transfer && cfg.test.matches(d)))
      selected.push_back(d);
  const Dataset data = build_dataset(selected, lexicons, jobs);
  return run_experiment(cfg, data, embeddings, jobs);
}

namespace {

json cm_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

}  // namespace

std::vector<LanguageRow> per_language_breakdown(const ExperimentReport& report) {
  std::map<Language, ConfusionMatrix> by_lang;
  for (const auto& p : report.predictions) by_lang[p.language].add(p.truth, p.predicted);
  std::vector<LanguageRow> rows;
  for (const auto& [lang, cm] : by_lang) rows.push_back({lang, cm, f1_score(cm), cohens_kappa(cm)});
  return rows;
}

json ExperimentReport::to_json() const {
  json folds_j = json::array();
  for (const auto& f : folds)
    folds_j.push_back({{"fold", f.fold},
                       {"train_size", f.train_size},
                       {"test_size", f.test_size},
                       {"confusion", cm_json(f.cm)},
                       {"f1", f.f1},
                       {"kappa", f.kappa},
                       {"converged", f.converged}});
  json langs = json::array();
  for (const auto& r : per_language_breakdown(*this))
    langs.push_back({{"language", std::string(to_string(r.language))},
                     {"confusion", cm_json(r.cm)},
                     {"f1", r.f1},
                     {"kappa", r.kappa}});
  return {{"format", "stancekit-report"},
          {"version", 1},
          {"config", config.to_json()},
          {"folds", folds_j},
          {"aggregate", {{"confusion", cm_json(aggregate)}, {"f1", f1}, {"kappa", kappa}}},
          {"mean", {{"f1", mean_f1}, {"kappa", mean_kappa}}},
          {"best_fold", {{"fold", best_fold}, {"f1", folds.at(best_fold).f1},
                         {"kappa", folds.at(best_fold).kappa},
                         {"confusion", cm_json(folds.at(best_fold).cm)}}},
          {"per_language", langs},
          {"hashes", {{"corpus", corpus_hash}, {"glossary", glossary_hash}}}};
}

void write_summary_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  out << "algorithm,kappa,F1,FP,FN,experiment,summary\n";
  for (const auto& r : reports) {
    const auto& b = r.folds.at(r.best_fold);
    const std::string algo(to_string(r.config.model));
    out << algo << ',' << io::format_double(b.kappa) << ',' << io::format_double(b.f1) << ','
        << b.cm.fp << ',' << b.cm.fn << ',' << io::csv_escape(r.config.name) << ",best_fold\n";
    out << algo << ',' << io::format_double(r.kappa) << ',' << io::format_double(r.f1) << ','
        << r.aggregate.fp << ',' << r.aggregate.fn << ',' << io::csv_escape(r.config.name)
        << ",aggregate\n";
  }
}

void write_predictions_csv(std::ostream& out, const ExperimentReport& report) {
  out << "id,language,genre,fold,truth,predicted,score\n";
  for (const auto& p : report.predictions)
    out << io::csv_escape(p.id) << ',' << to_string(p.language) << ',' << to_string(p.genre) << ','
        << p.fold << ',' << to_string(stance_of(p.truth)) << ','
        << to_string(stance_of(p.predicted)) << ',' << io::format_double(p.score) << '\n';
}

void write_breakdown_csv(std::ostream& out, const std::vector<LanguageRow>& rows) {
  out << "language,tp,fp,fn,tn,F1,kappa\n";
  for (const auto& r : rows)
    out << to_string(r.language) << ',' << r.cm.tp << ',' << r.cm.fp << ',' << r.cm.fn << ','
        << r.cm.tn << ',' << io::format_double(r.f1) << ',' << io::format_double(r.kappa) << '\n';
}

}  // namespace stancekit

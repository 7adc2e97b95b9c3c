// Copyright 2026 The SaladBench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>

#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/gradient.hpp"
#include "core/metrics.hpp"
#include "core/random.hpp"
#include "json.hpp"

namespace saladbench {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json defaults() {
  return Json::parse(R"({
  "command": "",
  "seed": 0,
  "out": "out",
  "dataset": {
    "path": "",
    "format": "tsv",
    "task": "single",
    "labels": [],
    "default_label": null,
    "validation": null,
    "holdout": 0.3
  },
  "provider": {
    "kind": "embedded",
    "location": null,
    "saliency": null,
    "supports_saliency": false
  },
  "transforms": "all",
  "transform": {
    "r": 0.5,
    "side": null,
    "shuffle_seeds": 5,
    "max_shuffle_attempts": 100
  },
  "train": {
    "epochs": 3,
    "batch_size": 8,
    "learning_rate": 0.5,
    "dim": 32,
    "init_scale": 0.1,
    "loss": "cross_entropy",
    "label_smoothing": 0.1,
    "focal_gamma": 2.0
  },
  "calibration": {
    "bins": 10
  },
  "mitigation": {
    "strategy": "invalid_class",
    "transforms": "all",
    "entropy_weight": 0.1,
    "penalize_invalid_entropy": false,
    "threshold": null,
    "augment_fraction": 0.5,
    "accuracy_tolerance": 0.03,
    "grid_step": 0.001,
    "dev_fraction": 0.2,
    "transfer": false,
    "transfer_transforms": null
  },
  "pbsmt": {
    "action": "train",
    "label": null,
    "models": null,
    "iterations": 10,
    "min_pairs": 50,
    "max_phrase_len": 3,
    "decoder": {
      "tm": 1.0,
      "lm": 0.5,
      "distortion": -0.3,
      "length": -0.1,
      "beam_size": 50,
      "distortion_limit": 3,
      "max_phrase_len": 3,
      "options_per_phrase": 20
    }
  },
  "report": {
    "input": null
  }
})");
}

// Fields that take either a comma-separated string or an array of names.
const std::set<std::string> kListFields = {"transforms", "mitigation.transforms",
                                           "mitigation.transfer_transforms"};

Json merge(const Json& def, const nlohmann::json& user, const std::string& path) {
  if (def.is_object()) {
    if (!user.is_object()) throw ConfigError(fmt::format("config '{}' must be an object", path));
    Json out = def;
    for (const auto& [key, value] : user.items()) {
      const std::string sub = path.empty() ? key : path + "." + key;
      if (!def.contains(key)) throw ConfigError(fmt::format("unknown config key '{}'", sub));
      out[key] = merge(def[key], value, sub);
    }
    return out;
  }
  if (kListFields.count(path)) {
    if (user.is_null() || user.is_string()) return Json(user);
    if (user.is_array() && std::all_of(user.begin(), user.end(), [](const auto& v) { return v.is_string(); })) {
      return Json(user);
    }
    throw ConfigError(fmt::format("config '{}' must be a string or a list of names", path));
  }
  if (def.is_null() || user.is_null()) {
    if (user.is_null() && !def.is_null()) {
      throw ConfigError(fmt::format("config '{}' cannot be null", path));
    }
    return Json(user);
  }
  if (def.is_number_integer()) {
    if (!user.is_number_integer()) throw ConfigError(fmt::format("config '{}' must be an integer", path));
    if (def.is_number_unsigned() && user.get<int64_t>() < 0) {
      throw ConfigError(fmt::format("config '{}' must be >= 0", path));
    }
    return def.is_number_unsigned() ? Json(user.get<uint64_t>()) : Json(user.get<int64_t>());
  }
  if (def.is_number_float()) {
    if (!user.is_number()) throw ConfigError(fmt::format("config '{}' must be a number", path));
    return Json(user.get<double>());
  }
  if (def.is_boolean() && !user.is_boolean()) throw ConfigError(fmt::format("config '{}' must be a boolean", path));
  if (def.is_string() && !user.is_string()) throw ConfigError(fmt::format("config '{}' must be a string", path));
  if (def.is_array() && !user.is_array()) throw ConfigError(fmt::format("config '{}' must be a list", path));
  return Json(user);
}

std::vector<TransformKind> kinds_of(const Json& v) {
  if (v.is_string()) return parse_transform_list(v.get<std::string>());
  std::vector<TransformKind> out;
  for (const auto& name : v) out.push_back(parse_transform_kind(name.get<std::string>()));
  if (out.empty()) throw ConfigError("empty transform list");
  return out;
}

std::optional<std::string> opt_string(const Json& v) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw ConfigError("expected a string");
  return v.get<std::string>();
}

// Typed view of a resolved config.
struct Run {
  Json resolved;
  std::string command;
  uint64_t seed = 0;
  fs::path out;
  std::string hash;

  std::string dataset_path;
  FileFormat format = FileFormat::kTsv;
  TaskKind task = TaskKind::kSingle;
  LabelSet labels;
  std::optional<std::string> validation_path;
  double holdout = 0.3;

  ProviderKind provider = ProviderKind::kEmbedded;
  std::optional<std::string> provider_location;
  std::optional<std::string> saliency_path;
  bool supports_saliency = false;

  std::vector<TransformKind> transforms;
  double r = 0.5;
  std::optional<Side> side;
  int shuffle_seeds = 5;
  int max_shuffle_attempts = 100;

  TrainConfig train;
  LossConfig loss;
  int bins = 10;

  ExperimentConfig experiment;

  std::string pbsmt_action;
  std::optional<int> pbsmt_label;
  std::optional<std::string> pbsmt_models;

  std::optional<std::string> report_input;
};

Run parse_run(const std::string& config_json) {
  nlohmann::json user;
  try {
    user = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  Run run;
  run.resolved = merge(defaults(), user, "");
  const Json& c = run.resolved;
  run.hash = config_hash(c.dump());

  run.command = c["command"].get<std::string>();
  if (std::find(std::begin(kCommands), std::end(kCommands), run.command) == std::end(kCommands)) {
    throw ConfigError(fmt::format("unknown command '{}'", run.command));
  }
  run.seed = c["seed"].get<uint64_t>();
  run.out = c["out"].get<std::string>();
  if (run.out.empty()) throw ConfigError("output directory must not be empty");

  const Json& d = c["dataset"];
  run.dataset_path = d["path"].get<std::string>();
  run.format = parse_file_format(d["format"].get<std::string>());
  run.task = parse_task_kind(d["task"].get<std::string>());
  std::vector<std::string> names;
  for (const auto& n : d["labels"]) {
    if (!n.is_string()) throw ConfigError("dataset.labels must be a list of names");
    names.push_back(n.get<std::string>());
  }
  std::optional<int> default_label;
  if (auto name = opt_string(d["default_label"])) {
    auto it = std::find(names.begin(), names.end(), *name);
    if (it == names.end()) throw ConfigError(fmt::format("default label '{}' is not a label", *name));
    default_label = static_cast<int>(it - names.begin());
  }
  if (run.command != "report") {
    if (run.dataset_path.empty()) throw ConfigError("dataset.path is required");
    if (names.size() < 2) throw ConfigError("dataset.labels needs at least two names");
    run.labels = LabelSet(names, default_label);
  }
  run.validation_path = opt_string(d["validation"]);
  run.holdout = d["holdout"].get<double>();
  if (!(run.holdout >= 0.0 && run.holdout < 1.0)) throw ConfigError("dataset.holdout must lie in [0, 1)");

  const Json& p = c["provider"];
  run.provider = parse_provider_kind(p["kind"].get<std::string>());
  run.provider_location = opt_string(p["location"]);
  run.saliency_path = opt_string(p["saliency"]);
  run.supports_saliency = p["supports_saliency"].get<bool>();
  if (run.provider != ProviderKind::kEmbedded && !run.provider_location) {
    throw ConfigError("provider.location is required for replay and http providers");
  }

  run.transforms = kinds_of(c["transforms"]);
  const Json& t = c["transform"];
  run.r = t["r"].get<double>();
  if (!(run.r > 0.0 && run.r < 1.0)) throw ConfigError("transform.r must lie in (0, 1)");
  if (auto s = opt_string(t["side"])) {
    if (*s == "a") run.side = Side::kA;
    else if (*s == "b") run.side = Side::kB;
    else throw ConfigError("transform.side must be 'a' or 'b'");
  }
  run.shuffle_seeds = t["shuffle_seeds"].get<int>();
  if (run.shuffle_seeds < 1) throw ConfigError("transform.shuffle_seeds must be >= 1");
  run.max_shuffle_attempts = t["max_shuffle_attempts"].get<int>();
  if (run.max_shuffle_attempts < 1) throw ConfigError("transform.max_shuffle_attempts must be >= 1");

  const Json& tr = c["train"];
  run.train.epochs = tr["epochs"].get<int>();
  run.train.batch_size = tr["batch_size"].get<int>();
  run.train.learning_rate = tr["learning_rate"].get<double>();
  const int64_t dim = tr["dim"].get<int64_t>();
  if (dim <= 0) throw ConfigError("train.dim must be positive");
  run.train.dim = static_cast<size_t>(dim);
  run.train.init_scale = tr["init_scale"].get<double>();
  run.train.seed = derive_seed(run.seed, "train");
  run.train.validate();
  run.loss.kind = parse_loss_kind(tr["loss"].get<std::string>());
  if (run.loss.kind == LossKind::kEntropic) {
    throw ConfigError("the entropic loss needs invalid examples; use the mitigate command");
  }
  run.loss.label_smoothing = tr["label_smoothing"].get<double>();
  run.loss.focal_gamma = tr["focal_gamma"].get<double>();
  run.loss.validate();

  run.bins = c["calibration"]["bins"].get<int>();
  if (run.bins < 1) throw ConfigError("calibration.bins must be >= 1");

  const Json& m = c["mitigation"];
  MitigationConfig& mc = run.experiment.mitigation;
  mc.strategy = parse_strategy(m["strategy"].get<std::string>());
  mc.transforms = kinds_of(m["transforms"]);
  mc.entropy_weight = m["entropy_weight"].get<double>();
  mc.penalize_invalid_entropy = m["penalize_invalid_entropy"].get<bool>();
  if (!m["threshold"].is_null()) {
    if (!m["threshold"].is_number()) throw ConfigError("mitigation.threshold must be a number");
    mc.threshold = m["threshold"].get<double>();
  }
  mc.augment_fraction = m["augment_fraction"].get<double>();
  mc.accuracy_tolerance = m["accuracy_tolerance"].get<double>();
  mc.grid_step = m["grid_step"].get<double>();
  mc.seed = run.seed;
  mc.validate();
  run.experiment.train = run.train;
  run.experiment.dev_fraction = m["dev_fraction"].get<double>();
  if (!(run.experiment.dev_fraction > 0.0 && run.experiment.dev_fraction < 1.0)) {
    throw ConfigError("mitigation.dev_fraction must lie in (0, 1)");
  }
  run.experiment.transfer = m["transfer"].get<bool>();
  if (!m["transfer_transforms"].is_null()) run.experiment.transfer_kinds = kinds_of(m["transfer_transforms"]);

  const Json& pb = c["pbsmt"];
  run.pbsmt_action = pb["action"].get<std::string>();
  if (run.pbsmt_action != "train" && run.pbsmt_action != "generate") {
    throw ConfigError("pbsmt.action must be 'train' or 'generate'");
  }
  if (!pb["label"].is_null()) {
    if (pb["label"].is_number_integer()) {
      run.pbsmt_label = pb["label"].get<int>();
    } else if (pb["label"].is_string()) {
      run.pbsmt_label = run.labels.index_of(pb["label"].get<std::string>());
      if (!run.pbsmt_label) throw ConfigError("pbsmt.label names no label");
    } else {
      throw ConfigError("pbsmt.label must be a label index or name");
    }
    if (*run.pbsmt_label < 0 || *run.pbsmt_label >= run.labels.n_classes()) {
      throw ConfigError("pbsmt.label out of range");
    }
  }
  run.pbsmt_models = opt_string(pb["models"]);
  pbsmt::TrainOptions& po = run.experiment.pbsmt;
  po.iterations = pb["iterations"].get<int>();
  if (po.iterations < 1) throw ConfigError("pbsmt.iterations must be >= 1");
  po.min_pairs = pb["min_pairs"].get<size_t>();
  po.max_phrase_len = pb["max_phrase_len"].get<size_t>();
  const Json& dw = pb["decoder"];
  pbsmt::DecoderWeights& w = run.experiment.decoder;
  w.tm = dw["tm"].get<double>();
  w.lm = dw["lm"].get<double>();
  w.distortion = dw["distortion"].get<double>();
  w.length = dw["length"].get<double>();
  w.beam_size = dw["beam_size"].get<int>();
  w.distortion_limit = dw["distortion_limit"].get<int>();
  w.max_phrase_len = dw["max_phrase_len"].get<int>();
  w.options_per_phrase = dw["options_per_phrase"].get<int>();
  w.validate();

  run.report_input = opt_string(c["report"]["input"]);
  if (run.command == "report" && !run.report_input) throw ConfigError("report.input is required");
  return run;
}

// ---------------------------------------------------------------------------
// Output

class Outputs {
 public:
  explicit Outputs(const Run& run) : run_(run) { fs::create_directories(run.out); }

  fs::path path(const std::string& rel) const { return run_.out / rel; }

  void write(const std::string& rel, const std::string& content) {
    const fs::path p = path(rel);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot write " + p.string());
    f << content;
    if (!f) throw DataError("write failed: " + p.string());
    record(rel);
  }

  void record(const std::string& rel) { artifacts_.push_back(rel); }
  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  const Run& run_;
  std::vector<std::string> artifacts_;
};

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

void stamp(Json& j, const Run& run) {
  j["config_hash"] = run.hash;
  j["seed"] = run.seed;
}

// ---------------------------------------------------------------------------
// Data, providers and generators

struct Data {
  Dataset full;
  Dataset train;
  Dataset eval;
};

Data load_data(const Run& run) {
  Data d;
  d.full = load_dataset(run.dataset_path, run.format, run.labels, run.task);
  if (d.full.empty()) throw DataError("dataset '" + run.dataset_path + "' has no usable rows");
  if (run.validation_path) {
    d.train = d.full;
    d.eval = load_dataset(*run.validation_path, run.format, run.labels, run.task);
  } else if (run.holdout > 0.0) {
    std::tie(d.train, d.eval) = split_holdout(d.full, run.holdout, derive_seed(run.seed, "split"));
  } else {
    d.train = d.full;
    d.eval = d.full;
  }
  return d;
}

struct ProviderHandle {
  std::unique_ptr<Provider> provider;
  std::shared_ptr<const ToyModelParams> params;  // embedded only
  std::string label;                             // "kind:location"
};

ProviderHandle open_provider(const Run& run, const Dataset& train_ds) {
  ProviderHandle h;
  const int n = run.labels.n_classes();
  switch (run.provider) {
    case ProviderKind::kEmbedded: {
      if (run.provider_location) {
        h.params = std::make_shared<const ToyModelParams>(load_params(*run.provider_location));
        if (static_cast<int>(h.params->n_classes) != n) {
          throw ConfigError("model output count does not match the dataset labels");
        }
      } else {
        h.params = std::make_shared<const ToyModelParams>(train(train_ds, run.loss, run.train));
      }
      const std::string loc = run.provider_location.value_or("inline");
      h.provider = std::make_unique<EmbeddedProvider>(h.params, loc);
      h.label = "embedded:" + loc;
      break;
    }
    case ProviderKind::kReplay:
      h.provider = std::make_unique<ReplayProvider>(*run.provider_location, n, run.saliency_path.value_or(""));
      h.label = "replay:" + *run.provider_location;
      break;
    case ProviderKind::kHttp:
      h.provider = std::make_unique<HttpProvider>(*run.provider_location, n, run.supports_saliency);
      h.label = "http:" + *run.provider_location;
      break;
  }
  return h;
}

std::string label_dir(int label) { return fmt::format("label_{}", label); }

std::map<int, pbsmt::Generator> load_generators(const std::string& dir, int n_classes) {
  std::map<int, pbsmt::Generator> out;
  for (int label = 0; label < n_classes; ++label) {
    const fs::path p = fs::path(dir) / label_dir(label);
    if (fs::exists(p)) out.emplace(label, pbsmt::load_generator(p.string()));
  }
  if (out.empty()) throw DataError("no pbsmt models found under " + dir);
  return out;
}

std::map<int, pbsmt::Generator> generators_for(const Run& run, const Dataset& train_ds,
                                               const std::vector<TransformKind>& kinds,
                                               std::vector<std::string>& warnings) {
  if (std::find(kinds.begin(), kinds.end(), TransformKind::kPbsmt) == kinds.end()) return {};
  if (run.pbsmt_models) return load_generators(*run.pbsmt_models, run.labels.n_classes());
  return train_generators(train_ds, run.experiment.pbsmt, run.experiment.decoder, &warnings);
}

std::vector<TransformSpec> specs_for(const Run& run, TransformKind kind) {
  std::vector<TransformSpec> out;
  const int copies = kind == TransformKind::kShuffle ? run.shuffle_seeds : 1;
  for (int k = 0; k < copies; ++k) {
    TransformSpec spec;
    spec.kind = kind;
    spec.target_side = run.side;
    spec.seed = run.seed + static_cast<uint64_t>(k);
    spec.r = run.r;
    spec.max_shuffle_attempts = run.max_shuffle_attempts;
    out.push_back(spec);
  }
  return out;
}

std::string extension(FileFormat f) { return f == FileFormat::kTsv ? ".tsv" : ".jsonl"; }

std::string transform_file(const Run& run, const TransformSpec& spec) {
  std::string name(to_string(spec.kind));
  if (spec.kind == TransformKind::kShuffle) name += fmt::format("_seed{}", spec.seed);
  return "transforms/" + name + extension(run.format);
}

void write_transformed(const Run& run, Outputs& out, const std::string& rel, const KindOutput& k) {
  std::vector<Example> rows;
  std::vector<RowProvenance> prov;
  for (const auto& t : k.examples) {
    rows.push_back(t.example);
    prov.push_back({t.source_id, t.transform.tag()});
  }
  const fs::path p = out.path(rel);
  fs::create_directories(p.parent_path());
  write_dataset(p.string(), run.format, rows, run.labels, &prov);
  out.record(rel);
}

std::vector<int> gold_labels(const Dataset& ds) {
  std::vector<int> gold;
  for (const auto& ex : ds.examples) {
    if (!ex.gold_label) return {};
    gold.push_back(*ex.gold_label);
  }
  return gold;
}

std::string predictions_jsonl(const std::vector<Prediction>& preds) {
  std::string s;
  for (const auto& p : preds) {
    Json j;
    j["id"] = p.id;
    j["probs"] = p.probs;
    s += j.dump() + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Commands

Json cmd_transform(const Run& run, Outputs& out, std::vector<std::string>& warnings) {
  const Data data = load_data(run);
  std::optional<ProviderHandle> provider;
  const bool need_saliency = std::any_of(run.transforms.begin(), run.transforms.end(), [&](TransformKind k) {
    return needs_saliency(k) && applicable(k, run.task);
  });
  if (need_saliency) provider = open_provider(run, data.full);
  const auto generators = generators_for(run, data.full, run.transforms, warnings);

  TransformContext ctx;
  ctx.task = run.task;
  if (provider && provider->provider->descriptor().supports_saliency) ctx.saliency = provider->provider.get();
  ctx.vocab = corpus_vocabulary(data.full);
  ctx.generators = &generators;

  Json kinds = Json::object();
  for (TransformKind kind : run.transforms) {
    Json entry;
    const std::string name(to_string(kind));
    if (!applicable(kind, run.task)) {
      entry["status"] = "not_applicable";
      warnings.push_back(fmt::format("{}: not defined for {} tasks", name, to_string(run.task)));
      kinds[name] = entry;
      continue;
    }
    if (auto why = unavailable_reason(kind, ctx)) {
      entry["status"] = "unavailable";
      entry["reason"] = *why;
      warnings.push_back(fmt::format("{}: {}", name, *why));
      kinds[name] = entry;
      continue;
    }
    entry["status"] = "ok";
    entry["files"] = Json::array();
    for (const auto& spec : specs_for(run, kind)) {
      const KindOutput k = run_transform(data.full.examples, spec, ctx);
      const std::string rel = transform_file(run, spec);
      write_transformed(run, out, rel, k);
      Json f;
      f["file"] = rel;
      f["rows"] = k.examples.size();
      f["skipped"] = k.skipped.size();
      entry["files"].push_back(f);
    }
    kinds[name] = entry;
  }
  Json summary;
  summary["dataset_checksum"] = dataset_checksum(data.full);
  summary["transforms"] = kinds;
  stamp(summary, run);
  out.write("transform_summary.json", pretty(summary));
  return summary;
}

Json cmd_evaluate(const Run& run, Outputs& out, std::vector<std::string>& warnings) {
  const Data data = load_data(run);
  ProviderHandle provider = open_provider(run, data.train);
  const auto generators = generators_for(run, data.train, run.transforms, warnings);

  TransformContext ctx;
  ctx.task = run.task;
  if (provider.provider->descriptor().supports_saliency) ctx.saliency = provider.provider.get();
  ctx.vocab = corpus_vocabulary(data.train);
  ctx.generators = &generators;

  const auto& eval = data.eval.examples;
  const auto original = provider.provider->predict_batch(eval);
  out.write("predictions/original.jsonl", predictions_jsonl(original));

  std::vector<MetricsRow> rows;
  for (TransformKind kind : run.transforms) {
    MetricsRow row;
    row.transform = std::string(to_string(kind));
    row.default_label_metric = requires_pair(kind);
    if (!applicable(kind, run.task)) {
      row.applicable = false;
      row.note = "not defined for single-text tasks";
      rows.push_back(row);
      continue;
    }
    if (auto why = unavailable_reason(kind, ctx)) {
      row.applicable = false;
      row.note = *why;
      warnings.push_back(fmt::format("{}: {}", row.transform, *why));
      rows.push_back(row);
      continue;
    }
    if (row.default_label_metric && !run.labels.default_label()) {
      row.applicable = false;
      row.note = "no default label configured";
      warnings.push_back(fmt::format("{}: {}", row.transform, row.note));
      rows.push_back(row);
      continue;
    }
    std::string all_preds;
    for (const auto& spec : specs_for(run, kind)) {
      const KindOutput k = run_transform(eval, spec, ctx);
      if (k.examples.empty()) break;
      std::vector<Example> inputs;
      std::vector<Prediction> matched;
      size_t j = 0;
      for (const auto& t : k.examples) {
        while (j < eval.size() && eval[j].id != t.source_id) ++j;
        if (j == eval.size()) throw DataError("transformed example '" + t.source_id + "' has no source");
        matched.push_back(original[j++]);
        inputs.push_back(t.example);
      }
      const auto preds = provider.provider->predict_batch(inputs);
      all_preds += predictions_jsonl(preds);
      row.seed_agreement.push_back(row.default_label_metric
                                       ? default_agreement(preds, run.labels.default_label())
                                       : agreement(matched, preds));
      row.seed_confidence.push_back(mean_confidence(preds));
      row.seeds.push_back(spec.seed);
      row.n = preds.size();
    }
    if (row.seeds.empty()) {
      row.applicable = false;
      row.note = "no example could be transformed";
      warnings.push_back(fmt::format("{}: {}", row.transform, row.note));
      rows.push_back(row);
      continue;
    }
    for (double a : row.seed_agreement) row.agreement += a;
    for (double c : row.seed_confidence) row.confidence += c;
    row.agreement /= static_cast<double>(row.seeds.size());
    row.confidence /= static_cast<double>(row.seeds.size());
    if (row.seeds.size() == 1) {
      row.seed_agreement.clear();
      row.seed_confidence.clear();
      row.seeds.clear();
    }
    out.write("predictions/" + row.transform + ".jsonl", all_preds);
    rows.push_back(row);
  }

  ReportMeta meta;
  meta.provider = provider.label;
  meta.task = std::string(to_string(run.task));
  meta.labels = run.labels.names();
  meta.dataset_checksum = dataset_checksum(data.eval);
  meta.seed = run.seed;
  meta.config_hash = run.hash;
  const auto gold = gold_labels(data.eval);
  meta.clean_confidence = mean_confidence(original);
  if (!gold.empty()) {
    meta.clean_accuracy = accuracy(original, gold);
    meta.ece = ece(original, gold, run.bins);
  }
  const MetricsReport report = build_report(std::move(rows), meta);
  out.write("report.json", report_to_json(report));
  out.write("report.csv", report_to_csv(report));
  out.write("report.md", report_to_markdown(report));

  Json summary;
  summary["n"] = eval.size();
  if (meta.clean_accuracy) summary["clean_accuracy"] = *meta.clean_accuracy;
  summary["rows"] = report.rows.size();
  return summary;
}

Json cmd_train(const Run& run, Outputs& out) {
  const Data data = load_data(run);
  const ToyModelParams params = train(data.train, run.loss, run.train);
  save_params(out.path("params.json").string(), params);
  out.record("params.json");

  Json info;
  info["loss"] = std::string(to_string(run.loss.kind));
  info["n_train"] = data.train.size();
  info["n_eval"] = data.eval.size();
  const auto train_gold = gold_labels(data.train);
  info["train_accuracy"] = accuracy(predict(params, data.train.examples), train_gold);
  const auto gold = gold_labels(data.eval);
  if (!gold.empty()) {
    const auto preds = predict(params, data.eval.examples);
    info["eval_accuracy"] = accuracy(preds, gold);
    info["eval_ece"] = ece(preds, gold, run.bins);
  }
  stamp(info, run);
  out.write("train.json", pretty(info));
  return info;
}

Json cmd_calibrate(const Run& run, Outputs& out) {
  if (run.provider != ProviderKind::kEmbedded) throw ConfigError("calibrate needs the embedded provider");
  const Data data = load_data(run);
  const auto gold = gold_labels(data.eval);
  if (gold.empty()) throw DataError("calibration set needs gold labels");
  ProviderHandle h = open_provider(run, data.train);
  const ToyModelParams& params = *h.params;
  const double t = fit_temperature(params, data.eval);
  const auto before = predict(params, data.eval.examples, 1.0);
  const auto after = predict(params, data.eval.examples, t);

  ToyModelParams calibrated = params;
  calibrated.temperature = t;
  save_params(out.path("params_calibrated.json").string(), calibrated);
  out.record("params_calibrated.json");

  Json info;
  info["temperature"] = t;
  info["ece_before"] = ece(before, gold, run.bins);
  info["ece_after"] = ece(after, gold, run.bins);
  info["nll_before"] = nll(params, data.eval, 1.0);
  info["nll_after"] = nll(params, data.eval, t);
  info["accuracy"] = accuracy(after, gold);
  info["n"] = data.eval.size();
  stamp(info, run);
  out.write("calibration.json", pretty(info));
  return info;
}

Json cmd_mitigate(const Run& run, Outputs& out, std::vector<std::string>& warnings) {
  if (run.provider != ProviderKind::kEmbedded) throw ConfigError("mitigate needs the embedded provider");
  const Data data = load_data(run);
  if (run.loss.kind != LossKind::kCrossEntropy) {
    throw ConfigError("mitigate trains its baseline with cross_entropy");
  }
  std::optional<ToyModelParams> baseline;
  if (run.provider_location) baseline = load_params(*run.provider_location);
  ExperimentConfig cfg = run.experiment;
  if (run.pbsmt_models && std::find(cfg.mitigation.transforms.begin(), cfg.mitigation.transforms.end(),
                                    TransformKind::kPbsmt) != cfg.mitigation.transforms.end()) {
    warnings.push_back("pbsmt.models is ignored by mitigate; generators are trained on the training split");
  }
  const ExperimentOutcome outcome = run_mitigation(data.train, data.eval, cfg, baseline ? &*baseline : nullptr);
  warnings.insert(warnings.end(), outcome.warnings.begin(), outcome.warnings.end());

  Json report = Json::parse(mitigation_report_to_json(outcome.report));
  Json stamped;
  stamp(stamped, run);
  stamped.update(report);
  out.write("report.json", pretty(stamped));
  save_params(out.path("baseline_params.json").string(), outcome.baseline);
  out.record("baseline_params.json");
  save_params(out.path("mitigated_params.json").string(), outcome.mitigated);
  out.record("mitigated_params.json");
  if (outcome.transfer) out.write("matrix.csv", transfer_matrix_to_csv(*outcome.transfer));

  Json summary;
  summary["strategy"] = outcome.report.strategy;
  summary["clean_accuracy"] = outcome.report.clean_accuracy;
  summary["invalid_detected"] = outcome.report.invalid_detected;
  if (outcome.report.baseline_accuracy) summary["baseline_accuracy"] = *outcome.report.baseline_accuracy;
  return summary;
}

Json cmd_pbsmt(const Run& run, Outputs& out, std::vector<std::string>& warnings) {
  const Data data = load_data(run);
  Json summary;
  summary["action"] = run.pbsmt_action;
  if (run.pbsmt_action == "train") {
    std::vector<int> labels;
    if (run.pbsmt_label) {
      labels.push_back(*run.pbsmt_label);
    } else {
      for (int l = 0; l < run.labels.n_classes(); ++l) labels.push_back(l);
    }
    Json trained = Json::array();
    for (int label : labels) {
      pbsmt::Generator g;
      try {
        g = pbsmt::train_generator(data.full, label, run.experiment.pbsmt, run.experiment.decoder);
      } catch (const DataError& e) {
        if (run.pbsmt_label) throw;
        warnings.push_back(fmt::format("pbsmt: label '{}' skipped: {}", run.labels.name(label), e.what()));
        continue;
      }
      const std::string rel = "pbsmt/" + label_dir(label);
      pbsmt::save_generator(out.path(rel).string(), g);
      out.record(rel);
      Json t;
      t["label"] = run.labels.name(label);
      t["dir"] = rel;
      t["phrases"] = g.phrases.size();
      trained.push_back(t);
    }
    if (trained.empty()) throw DataError("pbsmt: no label had enough data to train a generator");
    summary["models"] = trained;
  } else {
    if (!run.pbsmt_models) throw ConfigError("pbsmt generate needs pbsmt.models");
    const auto generators = load_generators(*run.pbsmt_models, run.labels.n_classes());
    TransformContext ctx;
    ctx.task = run.task;
    ctx.generators = &generators;
    TransformSpec spec;
    spec.kind = TransformKind::kPbsmt;
    spec.seed = run.seed;
    const KindOutput k = run_transform(data.full.examples, spec, ctx);
    const std::string rel = transform_file(run, spec);
    write_transformed(run, out, rel, k);
    summary["file"] = rel;
    summary["rows"] = k.examples.size();
    summary["skipped"] = k.skipped.size();
  }
  stamp(summary, run);
  out.write("pbsmt_summary.json", pretty(summary));
  return summary;
}

Json cmd_report(const Run& run, Outputs& out) {
  std::ifstream f(*run.report_input, std::ios::binary);
  if (!f) throw DataError("cannot read " + *run.report_input);
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const MetricsReport report = report_from_json(text);
  out.write("report.json", report_to_json(report));
  out.write("report.csv", report_to_csv(report));
  out.write("report.md", report_to_markdown(report));
  Json summary;
  summary["rows"] = report.rows.size();
  return summary;
}

}  // namespace

std::string default_run_config() { return pretty(defaults()); }

std::string resolve_run_config(const std::string& config_json) { return pretty(parse_run(config_json).resolved); }

std::string config_hash(const std::string& resolved_json) {
  Json j = Json::parse(resolved_json);
  if (j.is_object()) j.erase("out");
  return fmt::format("{:016x}", fnv1a(j.dump()));
}

std::string run_command(const std::string& config_json) {
  const Run run = parse_run(config_json);
  Outputs out(run);
  out.write("config.json", pretty(run.resolved));
  std::vector<std::string> warnings;
  Json details;
  if (run.command == "transform") details = cmd_transform(run, out, warnings);
  else if (run.command == "evaluate") details = cmd_evaluate(run, out, warnings);
  else if (run.command == "train") details = cmd_train(run, out);
  else if (run.command == "calibrate") details = cmd_calibrate(run, out);
  else if (run.command == "mitigate") details = cmd_mitigate(run, out, warnings);
  else if (run.command == "pbsmt") details = cmd_pbsmt(run, out, warnings);
  else details = cmd_report(run, out);

  Json summary;
  summary["command"] = run.command;
  summary["out"] = run.out.string();
  summary["config_hash"] = run.hash;
  summary["seed"] = run.seed;
  summary["artifacts"] = out.artifacts();
  summary["warnings"] = warnings;
  summary["details"] = details;
  return summary.dump(2);
}

}  // namespace saladbench

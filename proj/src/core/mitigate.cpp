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

#include "core/mitigate.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/random.hpp"
#include "json.hpp"

namespace saladbench {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kThreshold: return "threshold";
    case Strategy::kEntropicThreshold: return "entropic_threshold";
    case Strategy::kInvalidClass: return "invalid_class";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "threshold") return Strategy::kThreshold;
  if (key == "entropic_threshold" || key == "entropic") return Strategy::kEntropicThreshold;
  if (key == "invalid_class") return Strategy::kInvalidClass;
  throw ConfigError("unknown mitigation strategy '" + std::string(name) + "'");
}

void MitigationConfig::validate() const {
  if (!(entropy_weight >= 0.0) || !std::isfinite(entropy_weight)) {
    throw ConfigError("entropy weight must be >= 0");
  }
  if (!(augment_fraction > 0.0 && augment_fraction <= 1.0)) {
    throw ConfigError("augment fraction must be in (0, 1]");
  }
  if (!(accuracy_tolerance >= 0.0 && accuracy_tolerance <= 1.0)) {
    throw ConfigError("accuracy tolerance must be in [0, 1]");
  }
  if (!(grid_step > 0.0 && grid_step <= 1.0)) throw ConfigError("grid step must be in (0, 1]");
  if (threshold && !(*threshold > 0.0 && *threshold <= 1.0)) {
    throw ConfigError("threshold must be in (0, 1]");
  }
  if (transforms.empty()) throw ConfigError("no transforms configured");
}

// ---------------------------------------------------------------------------
// Augmentation

AugmentResult augment(const Dataset& ds, const MitigationConfig& cfg, const TransformContext& ctx) {
  cfg.validate();
  if (ds.empty()) throw DataError("augment: empty dataset");
  std::vector<TransformKind> kinds;
  AugmentResult result;
  for (TransformKind k : cfg.transforms) {
    if (const auto why = unavailable_reason(k, ctx)) {
      if (applicable(k, ctx.task)) {
        result.warnings.push_back(fmt::format("{}: {}", to_string(k), *why));
        spdlog::warn("augment: skipping {}: {}", to_string(k), *why);
      }
      continue;
    }
    kinds.push_back(k);
  }
  if (kinds.empty()) throw ConfigError("augment: no applicable transforms for this task");

  const size_t n = ds.size();
  const auto k = static_cast<size_t>(std::ceil(cfg.augment_fraction * static_cast<double>(n) - 1e-9));
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(derive_seed(cfg.seed, "augment"));
  rng.shuffle(order);
  order.resize(std::min(n, k));
  std::sort(order.begin(), order.end());
  std::vector<Example> sampled;
  for (size_t i : order) {
    sampled.push_back(ds.examples[i]);
    result.sampled_ids.push_back(ds.examples[i].id);
  }

  const bool extra_class = cfg.strategy == Strategy::kInvalidClass;
  result.dataset = ds;
  if (extra_class) result.dataset.labels = ds.labels.with_invalid_class();
  const int invalid_label = ds.labels.n_classes();
  result.invalid.assign(n, false);
  result.provenance.reserve(n);
  for (const auto& ex : ds.examples) result.provenance.push_back({ex.id, ""});

  // Interleave by source example so the dataset reads naturally.
  std::vector<KindOutput> outputs;
  for (TransformKind kind : kinds) {
    TransformSpec spec;
    spec.kind = kind;
    spec.seed = cfg.seed;
    outputs.push_back(run_transform(sampled, spec, ctx));
  }
  std::vector<size_t> cursor(outputs.size(), 0);
  for (const auto& src : sampled) {
    for (size_t o = 0; o < outputs.size(); ++o) {
      auto& out = outputs[o];
      if (cursor[o] >= out.examples.size() || out.examples[cursor[o]].source_id != src.id) continue;
      TransformedExample& t = out.examples[cursor[o]++];
      Example ex = t.example;
      ex.id = fmt::format("{}~{}", src.id, to_string(out.spec.kind));
      if (extra_class) ex.gold_label = invalid_label;
      result.dataset.examples.push_back(std::move(ex));
      result.invalid.push_back(true);
      result.provenance.push_back({src.id, out.spec.tag()});
      ++result.per_kind[out.spec.kind];
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Training strategies

ToyModelParams train_entropic(const ToyModelParams& warm, const Dataset& clean,
                              const std::vector<Example>& invalid, const MitigationConfig& cfg,
                              const TrainConfig& train_cfg) {
  LossConfig loss_cfg;
  loss_cfg.kind = LossKind::kEntropic;
  loss_cfg.entropy_weight = cfg.entropy_weight;
  loss_cfg.penalize_invalid_entropy = cfg.penalize_invalid_entropy;
  return train(clean, loss_cfg, train_cfg, &warm, &invalid);
}

ToyModelParams train_invalid_class(const Dataset& augmented, const TrainConfig& train_cfg,
                                   const ToyModelParams* warm) {
  const int n = augmented.labels.n_classes();
  if (n < 3 || augmented.labels.name(n - 1) != "invalid") {
    throw ConfigError("invalid-class training needs a label set ending in 'invalid'");
  }
  LossConfig loss_cfg;
  if (!warm) return train(augmented, loss_cfg, train_cfg);
  if (static_cast<int>(warm->n_classes) != n - 1) {
    throw ConfigError("warm-start model must have one class fewer than the augmented label set");
  }
  const ToyModelParams extended = add_output_class(*warm);
  return train(augmented, loss_cfg, train_cfg, &extended);
}

// ---------------------------------------------------------------------------
// Threshold search

ThresholdResult threshold_search(std::span<const Prediction> clean, std::span<const int> gold,
                                 std::span<const Prediction> invalid, double baseline_accuracy,
                                 int n_classes, const MitigationConfig& cfg) {
  cfg.validate();
  if (clean.empty() || invalid.empty()) throw DataError("threshold search: empty prediction set");
  if (clean.size() != gold.size()) throw DataError("threshold search: gold labels misaligned");
  if (n_classes < 2) throw ConfigError("threshold search: need at least 2 classes");

  const double floor = 1.0 / static_cast<double>(n_classes);
  const double required = baseline_accuracy - cfg.accuracy_tolerance;
  ThresholdResult best;
  best.theta = floor;
  for (size_t i = 0;; ++i) {
    const double theta = floor + static_cast<double>(i) * cfg.grid_step;
    if (theta > 1.0 + 1e-12) break;
    size_t correct = 0;
    for (size_t k = 0; k < clean.size(); ++k) {
      if (clean[k].confidence >= theta && clean[k].predicted == gold[k]) ++correct;
    }
    size_t caught = 0;
    for (const auto& p : invalid) {
      if (p.confidence < theta) ++caught;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(clean.size());
    const double det = static_cast<double>(caught) / static_cast<double>(invalid.size());
    if (acc < required) continue;
    if (!best.feasible || det > best.detection) best = {theta, acc, det, true};
  }
  if (!best.feasible) {
    spdlog::warn("threshold search: no threshold keeps clean accuracy within {:.3f} of {:.3f}",
                 cfg.accuracy_tolerance, baseline_accuracy);
    size_t correct = 0;
    for (size_t k = 0; k < clean.size(); ++k) correct += clean[k].predicted == gold[k] ? 1 : 0;
    best.clean_accuracy = static_cast<double>(correct) / static_cast<double>(clean.size());
    best.detection = 0.0;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Evaluation

bool DetectionRule::flags(const Prediction& p) const {
  if (strategy == Strategy::kInvalidClass) return p.predicted == invalid_index;
  return p.confidence < theta;
}

MitigationReport evaluate_mitigation(const DetectionRule& rule, std::span<const Prediction> clean,
                                     std::span<const int> gold,
                                     const std::map<TransformKind, std::vector<Prediction>>& invalid) {
  if (clean.empty() || clean.size() != gold.size()) {
    throw DataError("evaluate mitigation: need equally many clean predictions and labels");
  }
  MitigationReport report;
  report.strategy = std::string(to_string(rule.strategy));
  if (rule.strategy != Strategy::kInvalidClass) report.theta = rule.theta;
  size_t correct = 0;
  for (size_t i = 0; i < clean.size(); ++i) {
    if (!rule.flags(clean[i]) && clean[i].predicted == gold[i]) ++correct;
  }
  report.n_clean = clean.size();
  report.clean_accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(clean.size());

  size_t m = SIZE_MAX;
  for (const auto& [kind, preds] : invalid) {
    if (!preds.empty()) m = std::min(m, preds.size());
  }
  size_t flagged = 0;
  size_t total = 0;
  for (const auto& [kind, preds] : invalid) {
    if (preds.empty()) continue;
    size_t hits = 0;
    for (size_t i = 0; i < preds.size(); ++i) {
      const bool f = rule.flags(preds[i]);
      hits += f ? 1 : 0;
      if (i < m) {
        flagged += f ? 1 : 0;
        ++total;
      }
    }
    const std::string name(to_string(kind));
    report.per_transform[name] = 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
    report.per_transform_n[name] = preds.size();
  }
  report.n_invalid = total;
  report.invalid_detected = total == 0 ? 0.0 : 100.0 * static_cast<double>(flagged) / static_cast<double>(total);
  return report;
}

std::string mitigation_report_to_json(const MitigationReport& r) {
  nlohmann::ordered_json j;
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["strategy"] = r.strategy;
  j["clean_accuracy"] = r.clean_accuracy;
  j["invalid_detected"] = r.invalid_detected;
  j["n_clean"] = r.n_clean;
  j["n_invalid"] = r.n_invalid;
  j["per_transform"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.per_transform) {
    j["per_transform"][k] = {{"detected", v}, {"n", r.per_transform_n.at(k)}};
  }
  j["theta"] = opt(r.theta);
  j["entropy_weight"] = opt(r.entropy_weight);
  j["temperature"] = opt(r.temperature);
  j["baseline_accuracy"] = opt(r.baseline_accuracy);
  j["baseline_invalid_confidence"] = opt(r.baseline_invalid_confidence);
  j["invalid_confidence"] = opt(r.invalid_confidence);
  if (r.baseline_accuracy) j["accuracy_delta"] = r.clean_accuracy - *r.baseline_accuracy;
  if (r.baseline_invalid_confidence && r.invalid_confidence) {
    j["invalid_confidence_delta"] = *r.invalid_confidence - *r.baseline_invalid_confidence;
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Experiments

TransferMatrix transfer_matrix(const Dataset& train, const std::vector<TransformKind>& kinds,
                               const std::map<TransformKind, std::vector<Example>>& eval_invalid,
                               const TransformContext& train_ctx, const ToyModelParams& warm,
                               const MitigationConfig& cfg, const TrainConfig& train_cfg) {
  TransferMatrix m;
  for (TransformKind k : kinds) {
    if (!unavailable_reason(k, train_ctx) && eval_invalid.count(k)) m.kinds.push_back(k);
  }
  for (TransformKind train_kind : m.kinds) {
    MitigationConfig one = cfg;
    one.strategy = Strategy::kInvalidClass;
    one.transforms = {train_kind};
    const AugmentResult aug = augment(train, one, train_ctx);
    const ToyModelParams params = train_invalid_class(aug.dataset, train_cfg, &warm);
    const int invalid_index = static_cast<int>(params.n_classes) - 1;
    std::vector<double> row;
    for (TransformKind eval_kind : m.kinds) {
      const auto& exs = eval_invalid.at(eval_kind);
      size_t hits = 0;
      for (const auto& ex : exs) {
        const auto probs = forward(params, ex);
        const auto p = make_prediction(ex.id, probs, static_cast<int>(params.n_classes));
        hits += p.predicted == invalid_index ? 1 : 0;
      }
      row.push_back(exs.empty() ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(exs.size()));
    }
    m.detection.push_back(std::move(row));
  }
  return m;
}

std::string transfer_matrix_to_csv(const TransferMatrix& m) {
  std::string out = "train\\eval";
  for (TransformKind k : m.kinds) out += fmt::format(",{}", to_string(k));
  out += '\n';
  for (size_t i = 0; i < m.kinds.size(); ++i) {
    out += to_string(m.kinds[i]);
    for (double v : m.detection[i]) out += fmt::format(",{:.2f}", v);
    out += '\n';
  }
  return out;
}

namespace {

double dataset_accuracy(const ToyModelParams& params, const Dataset& ds) {
  size_t hits = 0;
  size_t n = 0;
  for (const auto& ex : ds.examples) {
    if (!ex.gold_label) continue;
    const auto p = make_prediction(ex.id, forward(params, ex), static_cast<int>(params.n_classes));
    hits += p.predicted == *ex.gold_label ? 1 : 0;
    ++n;
  }
  if (n == 0) throw DataError("no labelled validation examples");
  return 100.0 * static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace

TrainOnInvalidResult train_on_invalid_experiment(const Dataset& train, const Dataset& val,
                                                 const TransformSpec& spec,
                                                 const TransformContext& ctx,
                                                 const TrainConfig& train_cfg) {
  if (const auto why = unavailable_reason(spec.kind, ctx)) {
    throw UnsupportedTransformError(fmt::format("{}: {}", to_string(spec.kind), *why));
  }
  const KindOutput out = run_transform(train.examples, spec, ctx);
  Dataset transformed = train;
  TrainOnInvalidResult result;
  size_t cursor = 0;
  for (auto& ex : transformed.examples) {
    if (cursor < out.examples.size() && out.examples[cursor].source_id == ex.id) {
      const auto label = ex.gold_label;
      ex = out.examples[cursor++].example;
      ex.gold_label = label;
      ++result.transformed;
    } else {
      ++result.kept_original;
    }
  }
  const LossConfig ce;
  result.clean_trained_accuracy = dataset_accuracy(saladbench::train(train, ce, train_cfg), val);
  result.transformed_trained_accuracy =
      dataset_accuracy(saladbench::train(transformed, ce, train_cfg), val);
  return result;
}

}  // namespace saladbench

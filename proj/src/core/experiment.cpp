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

#include "core/experiment.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <memory>
#include <tuple>

#include "core/errors.hpp"
#include "core/gradient.hpp"
#include "core/metrics.hpp"
#include "core/random.hpp"

namespace saladbench {

std::map<int, pbsmt::Generator> train_generators(const Dataset& ds, const pbsmt::TrainOptions& opts,
                                                 const pbsmt::DecoderWeights& weights,
                                                 std::vector<std::string>* warnings) {
  std::map<int, pbsmt::Generator> out;
  for (int label = 0; label < ds.labels.n_classes(); ++label) {
    try {
      out.emplace(label, pbsmt::train_generator(ds, label, opts, weights));
    } catch (const DataError& e) {
      spdlog::warn("pbsmt: label '{}' skipped: {}", ds.labels.name(label), e.what());
      if (warnings) warnings->push_back(fmt::format("pbsmt: {}", e.what()));
    }
  }
  return out;
}

std::map<TransformKind, std::vector<Example>> invalid_sets(const std::vector<Example>& examples,
                                                           const std::vector<TransformKind>& kinds,
                                                           const TransformContext& ctx,
                                                           uint64_t seed) {
  std::map<TransformKind, std::vector<Example>> out;
  for (TransformKind kind : kinds) {
    if (unavailable_reason(kind, ctx)) continue;
    TransformSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    auto result = run_transform(examples, spec, ctx);
    auto& dst = out[kind];
    for (auto& t : result.examples) dst.push_back(std::move(t.example));
  }
  return out;
}

std::vector<Prediction> predict(const ToyModelParams& params, const std::vector<Example>& examples,
                                std::optional<double> temperature) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back(make_prediction(ex.id, probabilities(params, encode(params, ex), temperature),
                                  static_cast<int>(params.n_classes)));
  }
  return out;
}

namespace {

std::vector<int> gold_of(const Dataset& ds) {
  std::vector<int> gold;
  for (const auto& ex : ds.examples) {
    if (!ex.gold_label) throw DataError("example '" + ex.id + "' has no gold label");
    gold.push_back(*ex.gold_label);
  }
  return gold;
}

// Mean confidence over the balanced union of invalid sets.
double balanced_confidence(const ToyModelParams& params,
                           const std::map<TransformKind, std::vector<Example>>& invalid) {
  size_t m = SIZE_MAX;
  for (const auto& [kind, exs] : invalid) {
    if (!exs.empty()) m = std::min(m, exs.size());
  }
  std::vector<Prediction> preds;
  for (const auto& [kind, exs] : invalid) {
    if (exs.empty()) continue;
    const std::vector<Example> head(exs.begin(), exs.begin() + static_cast<std::ptrdiff_t>(m));
    auto p = predict(params, head);
    preds.insert(preds.end(), p.begin(), p.end());
  }
  if (preds.empty()) throw DataError("no invalid examples could be generated");
  return mean_confidence(preds);
}

}  // namespace

ExperimentOutcome run_mitigation(const Dataset& train_ds, const Dataset& val, const ExperimentConfig& cfg,
                                 const ToyModelParams* baseline_in) {
  cfg.mitigation.validate();
  cfg.train.validate();
  if (train_ds.empty() || val.empty()) throw DataError("mitigation needs training and validation data");
  ExperimentOutcome outcome;
  const MitigationConfig& mc = cfg.mitigation;
  const bool thresholded = mc.strategy != Strategy::kInvalidClass;

  Dataset fit = train_ds;
  Dataset dev;
  if (thresholded) {
    std::tie(fit, dev) = split_holdout(train_ds, cfg.dev_fraction, derive_seed(mc.seed, "dev"));
  }

  const LossConfig ce;
  outcome.baseline = baseline_in ? *baseline_in : train(fit, ce, cfg.train);

  std::map<int, pbsmt::Generator> generators;
  if (std::find(mc.transforms.begin(), mc.transforms.end(), TransformKind::kPbsmt) != mc.transforms.end()) {
    generators = train_generators(fit, cfg.pbsmt, cfg.decoder, &outcome.warnings);
  }
  const auto baseline_ptr = std::make_shared<const ToyModelParams>(outcome.baseline);
  const EmbeddedProvider saliency_source(baseline_ptr);
  TransformContext ctx;
  ctx.task = train_ds.task_kind;
  ctx.saliency = &saliency_source;
  ctx.vocab = corpus_vocabulary(fit);
  ctx.generators = &generators;

  const auto val_invalid = invalid_sets(val.examples, mc.transforms, ctx, derive_seed(mc.seed, "val"));
  const int n = train_ds.labels.n_classes();

  DetectionRule rule;
  rule.strategy = mc.strategy;
  std::optional<double> temperature;
  switch (mc.strategy) {
    case Strategy::kInvalidClass: {
      const AugmentResult aug = augment(fit, mc, ctx);
      outcome.warnings.insert(outcome.warnings.end(), aug.warnings.begin(), aug.warnings.end());
      outcome.mitigated = train_invalid_class(aug.dataset, cfg.train, &outcome.baseline);
      rule.invalid_index = n;
      break;
    }
    case Strategy::kEntropicThreshold:
    case Strategy::kThreshold: {
      if (mc.strategy == Strategy::kEntropicThreshold) {
        const AugmentResult aug = augment(fit, mc, ctx);
        outcome.warnings.insert(outcome.warnings.end(), aug.warnings.begin(), aug.warnings.end());
        std::vector<Example> invalid;
        for (size_t i = 0; i < aug.dataset.examples.size(); ++i) {
          if (aug.invalid[i]) invalid.push_back(aug.dataset.examples[i]);
        }
        outcome.mitigated = train_entropic(outcome.baseline, fit, invalid, mc, cfg.train);
      } else {
        outcome.mitigated = outcome.baseline;
      }
      temperature = fit_temperature(outcome.mitigated, dev);
      if (mc.threshold) {
        rule.theta = *mc.threshold;
      } else {
        const auto dev_invalid = invalid_sets(dev.examples, mc.transforms, ctx, derive_seed(mc.seed, "dev"));
        std::vector<Example> pooled_invalid;
        for (const auto& [kind, exs] : dev_invalid) pooled_invalid.insert(pooled_invalid.end(), exs.begin(), exs.end());
        if (pooled_invalid.empty()) throw DataError("threshold search: no invalid development examples");
        const auto dev_preds = predict(outcome.mitigated, dev.examples, temperature);
        const auto dev_gold = gold_of(dev);
        const auto base_dev = predict(outcome.baseline, dev.examples);
        const double base_acc = accuracy(base_dev, dev_gold) / 100.0;
        const ThresholdResult th = threshold_search(dev_preds, dev_gold, predict(outcome.mitigated, pooled_invalid, temperature),
                                                    base_acc, n, mc);
        rule.theta = th.theta;
        if (!th.feasible) outcome.warnings.push_back("threshold search found no feasible threshold");
      }
      break;
    }
  }

  const auto gold = gold_of(val);
  const auto clean_preds = predict(outcome.mitigated, val.examples, temperature);
  std::map<TransformKind, std::vector<Prediction>> invalid_preds;
  for (const auto& [kind, exs] : val_invalid) invalid_preds[kind] = predict(outcome.mitigated, exs, temperature);
  outcome.report = evaluate_mitigation(rule, clean_preds, gold, invalid_preds);
  outcome.report.temperature = temperature;
  if (mc.strategy == Strategy::kEntropicThreshold) outcome.report.entropy_weight = mc.entropy_weight;
  outcome.report.baseline_accuracy = accuracy(predict(outcome.baseline, val.examples), gold);
  outcome.report.baseline_invalid_confidence = balanced_confidence(outcome.baseline, val_invalid);
  outcome.report.invalid_confidence = balanced_confidence(outcome.mitigated, val_invalid);

  if (cfg.transfer) {
    const auto& kinds = cfg.transfer_kinds.empty() ? mc.transforms : cfg.transfer_kinds;
    auto eval_sets = val_invalid;
    for (TransformKind k : kinds) {
      if (!eval_sets.count(k)) {
        auto extra = invalid_sets(val.examples, {k}, ctx, derive_seed(mc.seed, "val"));
        for (auto& [kind, exs] : extra) eval_sets[kind] = std::move(exs);
      }
    }
    outcome.transfer = transfer_matrix(fit, kinds, eval_sets, ctx, outcome.baseline, mc, cfg.train);
  }
  return outcome;
}

}  // namespace saladbench

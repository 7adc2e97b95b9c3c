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

// Strategies that teach a classifier to recognise invalid inputs, and the
// experiments built on them.
//
//   threshold           reject when confidence < theta (temperature-scaled)
//   entropic_threshold  as above, after training with an entropy bonus on
//                       invalid examples
//   invalid_class       an extra output class trained on invalid examples

#ifndef SALADBENCH_CORE_MITIGATE_HPP_
#define SALADBENCH_CORE_MITIGATE_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/engine.hpp"
#include "core/providers.hpp"
#include "core/toyclf.hpp"
#include "core/transform.hpp"

namespace saladbench {

enum class Strategy { kThreshold, kEntropicThreshold, kInvalidClass };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct MitigationConfig {
  Strategy strategy = Strategy::kInvalidClass;
  double entropy_weight = 0.1;
  bool penalize_invalid_entropy = false;
  std::optional<double> threshold;
  double augment_fraction = 0.5;
  std::vector<TransformKind> transforms{kAllTransforms.begin(), kAllTransforms.end()};
  double accuracy_tolerance = 0.03;  // fraction, not points
  double grid_step = 0.001;
  uint64_t seed = 0;

  void validate() const;
};

struct AugmentResult {
  Dataset dataset;  // clean examples first, then the invalid ones
  std::vector<bool> invalid;
  std::vector<RowProvenance> provenance;
  std::vector<std::string> sampled_ids;
  std::map<TransformKind, size_t> per_kind;
  std::vector<std::string> warnings;  // kinds skipped and why
};

// Samples ceil(fraction * n) examples and applies every configured transform
// to each. For invalid_class the invalid examples are labelled with the new
// last class; otherwise they keep their source label and are only flagged.
// Invalid ids are "<source id>~<kind>".
AugmentResult augment(const Dataset& ds, const MitigationConfig& cfg, const TransformContext& ctx);

// Continues training from `warm` on `clean` with the entropy term over
// `invalid`.
ToyModelParams train_entropic(const ToyModelParams& warm, const Dataset& clean,
                              const std::vector<Example>& invalid, const MitigationConfig& cfg,
                              const TrainConfig& train_cfg);

struct ThresholdResult {
  double theta = 0.0;
  double clean_accuracy = 0.0;  // fraction
  double detection = 0.0;       // fraction
  bool feasible = false;
};

// theta grid: 1/N + i * step up to 1. Clean accuracy counts an example when
// it is correct and confidence >= theta; detection counts invalid examples
// with confidence < theta. Among thresholds keeping clean accuracy within
// the tolerance of `baseline_accuracy` (a fraction), the one with the best
// detection wins; ties keep the smallest theta. With no feasible threshold
// the result is 1/N and `feasible` is false.
ThresholdResult threshold_search(std::span<const Prediction> clean, std::span<const int> gold,
                                 std::span<const Prediction> invalid, double baseline_accuracy,
                                 int n_classes, const MitigationConfig& cfg);

// Trains over N + 1 classes, starting from `warm` with a zero-initialised
// extra output when given.
ToyModelParams train_invalid_class(const Dataset& augmented, const TrainConfig& train_cfg,
                                   const ToyModelParams* warm = nullptr);

// How a trained detector flags an input.
struct DetectionRule {
  Strategy strategy = Strategy::kInvalidClass;
  double theta = 0.0;     // threshold strategies
  int invalid_index = 0;  // invalid_class
  bool flags(const Prediction& p) const;
};

struct MitigationReport {
  std::string strategy;
  double clean_accuracy = 0.0;    // %
  double invalid_detected = 0.0;  // %, balanced union over kinds
  std::map<std::string, double> per_transform;
  std::map<std::string, size_t> per_transform_n;
  std::optional<double> theta;
  std::optional<double> entropy_weight;
  std::optional<double> temperature;
  std::optional<double> baseline_accuracy;  // %
  std::optional<double> baseline_invalid_confidence;  // %
  std::optional<double> invalid_confidence;  // %
  size_t n_clean = 0;
  size_t n_invalid = 0;
};

// A clean example counts as correct when it is not flagged and its argmax
// matches gold. The headline detection uses the same number of invalid
// examples from every kind (the first m of each, m the smallest count).
MitigationReport evaluate_mitigation(const DetectionRule& rule, std::span<const Prediction> clean,
                                     std::span<const int> gold,
                                     const std::map<TransformKind, std::vector<Prediction>>& invalid);

std::string mitigation_report_to_json(const MitigationReport& report);

// Kind x kind detection rates of invalid-class detectors each trained on one
// kind.
struct TransferMatrix {
  std::vector<TransformKind> kinds;
  std::vector<std::vector<double>> detection;  // [train][eval], %
};

TransferMatrix transfer_matrix(const Dataset& train, const std::vector<TransformKind>& kinds,
                               const std::map<TransformKind, std::vector<Example>>& eval_invalid,
                               const TransformContext& train_ctx, const ToyModelParams& warm,
                               const MitigationConfig& cfg, const TrainConfig& train_cfg);

std::string transfer_matrix_to_csv(const TransferMatrix& m);

struct TrainOnInvalidResult {
  double clean_trained_accuracy = 0.0;        // %
  double transformed_trained_accuracy = 0.0;  // %
  size_t transformed = 0;
  size_t kept_original = 0;  // examples the transform could not handle
};

// Trains one model on `train` and one on its fully transformed copy (labels
// kept), both from scratch, and scores both on untransformed `val`.
TrainOnInvalidResult train_on_invalid_experiment(const Dataset& train, const Dataset& val,
                                                 const TransformSpec& spec,
                                                 const TransformContext& ctx,
                                                 const TrainConfig& train_cfg);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_MITIGATE_HPP_

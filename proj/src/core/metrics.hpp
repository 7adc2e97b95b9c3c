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

// Response metrics over prediction lists and the report that collects them.
// Percentages are in [0, 100]; ECE is a fraction in [0, 1].

#ifndef SALADBENCH_CORE_METRICS_HPP_
#define SALADBENCH_CORE_METRICS_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/providers.hpp"
#include "core/transform.hpp"

namespace saladbench {

// Share of examples whose predicted label is unchanged. Lists must be
// non-empty and id-aligned.
double agreement(std::span<const Prediction> original, std::span<const Prediction> transformed);

// Share of examples predicting the task's default label.
double default_agreement(std::span<const Prediction> transformed, std::optional<int> default_label);

// Mean probability of the predicted label.
double mean_confidence(std::span<const Prediction> preds);

// Accuracy of argmax against gold.
double accuracy(std::span<const Prediction> preds, std::span<const int> gold);

// Equal-width bins over (0, 1]; bin m holds confidences in (m/B, (m+1)/B].
// Empty bins contribute nothing.
double ece(std::span<const Prediction> preds, std::span<const int> gold, int bins = 10);

struct MetricsRow {
  std::string transform;  // kind name
  bool applicable = true;
  // Agreement against the default label rather than the original prediction.
  bool default_label_metric = false;
  double agreement = 0.0;
  double confidence = 0.0;
  size_t n = 0;
  // Shuffle: one value per seed; the headline numbers are their means.
  std::vector<double> seed_agreement;
  std::vector<double> seed_confidence;
  std::vector<uint64_t> seeds;
  std::string note;  // reason a row is not applicable
};

struct ReportMeta {
  std::string provider;  // "kind:location"
  std::string task;
  std::vector<std::string> labels;
  std::string dataset_checksum;
  uint64_t seed = 0;
  std::string config_hash;
  std::optional<double> clean_accuracy;
  std::optional<double> clean_confidence;
  std::optional<double> ece;
};

struct FamilyAverage {
  double agreement = 0.0;
  double confidence = 0.0;
  size_t rows = 0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  std::optional<FamilyAverage> lexical;
  std::optional<FamilyAverage> gradient;
  double random_baseline = 0.0;  // 100 / N
  ReportMeta meta;

  bool operator==(const MetricsReport&) const;
};

// Attaches family averages over applicable rows and the 100/N baseline.
MetricsReport build_report(std::vector<MetricsRow> rows, ReportMeta meta);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);
// One line per transform row.
std::string report_to_csv(const MetricsReport& report);
// Transform rows, family averages and the Random row; "--" marks
// inapplicable transforms.
std::string report_to_markdown(const MetricsReport& report);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_METRICS_HPP_

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

// End-to-end mitigation runs on the embedded model: baseline training,
// invalid-example generation, strategy training and evaluation.

#ifndef SALADBENCH_CORE_EXPERIMENT_HPP_
#define SALADBENCH_CORE_EXPERIMENT_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/mitigate.hpp"
#include "core/pbsmt.hpp"
#include "core/toyclf.hpp"

namespace saladbench {

struct ExperimentConfig {
  MitigationConfig mitigation;
  TrainConfig train;
  pbsmt::TrainOptions pbsmt;
  pbsmt::DecoderWeights decoder;
  // Share of the training set held out to fit T and theta (threshold
  // strategies only).
  double dev_fraction = 0.2;
  bool transfer = false;
  std::vector<TransformKind> transfer_kinds;  // empty: the mitigation kinds
};

// Per-label generators; labels with too little data are skipped with a
// warning.
std::map<int, pbsmt::Generator> train_generators(const Dataset& ds, const pbsmt::TrainOptions& opts,
                                                 const pbsmt::DecoderWeights& weights,
                                                 std::vector<std::string>* warnings = nullptr);

// Invalid versions of `examples` for every available kind in `kinds`.
std::map<TransformKind, std::vector<Example>> invalid_sets(const std::vector<Example>& examples,
                                                           const std::vector<TransformKind>& kinds,
                                                           const TransformContext& ctx,
                                                           uint64_t seed);

std::vector<Prediction> predict(const ToyModelParams& params, const std::vector<Example>& examples,
                                std::optional<double> temperature = std::nullopt);

struct ExperimentOutcome {
  MitigationReport report;
  ToyModelParams baseline;
  ToyModelParams mitigated;
  std::optional<TransferMatrix> transfer;
  std::vector<std::string> warnings;
};

// `baseline` skips baseline training when given.
ExperimentOutcome run_mitigation(const Dataset& train, const Dataset& val, const ExperimentConfig& cfg,
                                 const ToyModelParams* baseline = nullptr);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_EXPERIMENT_HPP_

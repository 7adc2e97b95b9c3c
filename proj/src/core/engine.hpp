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

// Applies any of the nine transformations to a list of examples, fetching
// saliency and generator models as each kind requires.

#ifndef SALADBENCH_CORE_ENGINE_HPP_
#define SALADBENCH_CORE_ENGINE_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/pbsmt.hpp"
#include "core/providers.hpp"
#include "core/transform.hpp"

namespace saladbench {

struct TransformContext {
  TaskKind task = TaskKind::kSingle;
  // Saliency source for the gradient kinds; also supplies the loss label of
  // unlabelled examples.
  const Provider* saliency = nullptr;
  // Replacement vocabulary for Replace.
  std::vector<std::string> vocab;
  // PBSMT generators by label.
  const std::map<int, pbsmt::Generator>* generators = nullptr;
};

// Why `kind` cannot run in `ctx`, or nullopt when it can.
std::optional<std::string> unavailable_reason(TransformKind kind, const TransformContext& ctx);

struct KindOutput {
  TransformSpec spec;
  std::vector<TransformedExample> examples;
  // Source ids of examples the transform could not handle (too short, all
  // tokens dropped, no generator for the label).
  std::vector<std::string> skipped;
  std::optional<std::string> unavailable;
};

// Order-preserving. Per-example failures are collected in `skipped`; a kind
// that cannot run at all sets `unavailable` and produces nothing.
KindOutput run_transform(std::span<const Example> examples, const TransformSpec& spec,
                         const TransformContext& ctx);

// Saliency against the gold label, or the provider's prediction when the
// example has none.
std::vector<SaliencyScores> saliency_for(std::span<const Example> examples, Side side,
                                         const Provider& provider);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_ENGINE_HPP_

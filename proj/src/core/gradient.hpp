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

// Saliency-driven transformations: Drop, Repeat, Replace and CopyOne.
//
// A token's importance is the first-order loss change t_i . dL/dt_i supplied
// by a provider. The lowest-scoring fraction r of the tokens ("bottom") is
// destroyed; the same number of highest-scoring remaining tokens ("top")
// feeds Repeat.

#ifndef SALADBENCH_CORE_GRADIENT_HPP_
#define SALADBENCH_CORE_GRADIENT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/transform.hpp"

namespace saladbench {

struct SaliencyScores {
  std::vector<double> scores;  // one per word token
  int loss_label = 0;
};

struct ImportancePartition {
  std::vector<size_t> bottom;  // ascending positions
  std::vector<size_t> top;     // ascending positions, disjoint from bottom
  double r = 0.5;
};

// |bottom| = max(1, floor(r n)). Ties go to the lower position.
ImportancePartition partition_by_importance(const SaliencyScores& scores, double r);

TokenSeq drop_tokens(const TokenSeq& seq, const ImportancePartition& part);
TokenSeq repeat_tokens(const TokenSeq& seq, const ImportancePartition& part, uint64_t seed);
TokenSeq replace_tokens(const TokenSeq& seq, const ImportancePartition& part,
                        std::span<const std::string> vocab, uint64_t seed);

// text_b becomes the single highest-scoring token of text_a.
TransformedExample copy_one(const Example& ex, const SaliencyScores& scores_a, TaskKind task);

// Drop/Repeat/Replace/CopyOne on one example. `scores` must be aligned with
// tokenize() of the side the kind reads: text_a for CopyOne, the target side
// otherwise.
TransformedExample apply_gradient(const Example& ex, const TransformSpec& spec, TaskKind task,
                                  const SaliencyScores& scores, std::span<const std::string> vocab);

// The side whose saliency a gradient kind needs.
Side saliency_side(const TransformSpec& spec, TaskKind task);

// Sorted distinct tokens over both texts of every example.
std::vector<std::string> corpus_vocabulary(const Dataset& ds);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_GRADIENT_HPP_

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

#ifndef SALADBENCH_CORE_TRANSFORM_HPP_
#define SALADBENCH_CORE_TRANSFORM_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"

namespace saladbench {

// The nine destructive transformations.
enum class TransformKind {
  kSort,
  kReverse,
  kShuffle,
  kCopySort,
  kDrop,
  kRepeat,
  kReplace,
  kCopyOne,
  kPbsmt,
};

enum class TransformFamily { kLexical, kGradient, kStatistical };

inline constexpr std::array<TransformKind, 9> kAllTransforms = {
    TransformKind::kSort,    TransformKind::kReverse, TransformKind::kShuffle,
    TransformKind::kCopySort, TransformKind::kDrop,  TransformKind::kRepeat,
    TransformKind::kReplace, TransformKind::kCopyOne, TransformKind::kPbsmt,
};

std::string_view to_string(TransformKind kind);
TransformKind parse_transform_kind(std::string_view name);
// Comma-separated kinds; "all" expands to the nine kinds in canonical order.
std::vector<TransformKind> parse_transform_list(std::string_view csv);

TransformFamily family_of(TransformKind kind);
// copysort and copyone need a second text.
bool requires_pair(TransformKind kind);
bool applicable(TransformKind kind, TaskKind task);
// Drop, Repeat, Replace, CopyOne need token saliency.
bool needs_saliency(TransformKind kind);
// Kinds that only reorder tokens and keep the bag of words intact.
bool is_reordering(TransformKind kind);

struct TransformSpec {
  TransformKind kind = TransformKind::kSort;
  // Unset means the task default: b for pair tasks, a for single tasks.
  std::optional<Side> target_side;
  uint64_t seed = 0;
  double r = 0.5;
  int max_shuffle_attempts = 100;

  Side side_for(TaskKind task) const;
  // "kind:seed:r", e.g. "shuffle:17:0.5".
  std::string tag() const;
};

struct TransformedExample {
  Example example;  // same id as the source, transformed input
  std::string source_id;
  TransformSpec transform;
  bool valid_label_erased = true;
  // Shuffle could not avoid every original bigram.
  bool best_effort = false;
};

}  // namespace saladbench

#endif  // SALADBENCH_CORE_TRANSFORM_HPP_

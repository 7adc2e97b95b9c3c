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

// Lexical-overlap transformations: Sort, Reverse, Shuffle and CopySort.
//
// All of them keep the bag of words of the text they destroy. When the last
// input token is terminal punctuation (. ! ?) it is held out of the
// reordering and put back at the end.

#ifndef SALADBENCH_CORE_LEXICAL_HPP_
#define SALADBENCH_CORE_LEXICAL_HPP_

#include <cstdint>

#include "core/corpus.hpp"
#include "core/transform.hpp"

namespace saladbench {

TokenSeq sort_tokens(const TokenSeq& seq);
TokenSeq reverse_tokens(const TokenSeq& seq);

struct ShuffleResult {
  TokenSeq tokens;
  // Ordered bigrams of the input that survive in the output.
  size_t shared_bigrams = 0;
  // True when no bigram-free order was found.
  bool best_effort = false;
  int attempts = 0;
};

// Seeded uniform shuffle, redrawn until no ordered bigram of the input
// survives. After max_attempts draws, inputs with at most
// kExhaustiveShuffleLimit content tokens are resolved by enumerating every
// order, so a bigram-free result is returned whenever one exists.
ShuffleResult shuffle_tokens(const TokenSeq& seq, uint64_t seed, int max_attempts = 100);

inline constexpr size_t kExhaustiveShuffleLimit = 8;

// Number of ordered bigrams of `output` that also occur in `input`.
size_t shared_bigram_count(const TokenSeq& input, const TokenSeq& output);

// text_b becomes the sorted tokens of text_a.
TransformedExample copy_sort(const Example& ex, TaskKind task);

// Sort/Reverse/Shuffle applied to spec.target_side.
TransformedExample apply_reordering(const Example& ex, const TransformSpec& spec, TaskKind task);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_LEXICAL_HPP_

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

#include "core/lexical.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/errors.hpp"
#include "core/random.hpp"

namespace saladbench {
namespace {

struct Pinned {
  std::vector<std::string> content;
  std::optional<std::string> terminal;
};

Pinned split_terminal(const TokenSeq& seq) {
  Pinned p;
  p.content = seq.surfaces();
  if (!p.content.empty() && is_terminal_punctuation(p.content.back())) {
    p.terminal = std::move(p.content.back());
    p.content.pop_back();
  }
  return p;
}

TokenSeq join(std::vector<std::string> content, const std::optional<std::string>& terminal) {
  if (terminal) content.push_back(*terminal);
  return TokenSeq(std::move(content));
}

std::string casefold(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

using BigramSet = std::set<std::pair<std::string, std::string>>;

BigramSet bigrams_of(const std::vector<std::string>& s) {
  BigramSet out;
  for (size_t i = 1; i < s.size(); ++i) out.emplace(s[i - 1], s[i]);
  return out;
}

size_t count_shared(const BigramSet& input, const std::vector<std::string>& out) {
  size_t n = 0;
  for (size_t i = 1; i < out.size(); ++i) {
    if (input.count({out[i - 1], out[i]})) ++n;
  }
  return n;
}

std::vector<std::string> arrange(const std::vector<std::string>& content,
                                 const std::vector<size_t>& order,
                                 const std::optional<std::string>& terminal) {
  std::vector<std::string> out;
  out.reserve(order.size() + 1);
  for (size_t i : order) out.push_back(content[i]);
  if (terminal) out.push_back(*terminal);
  return out;
}

}  // namespace

TokenSeq sort_tokens(const TokenSeq& seq) {
  if (seq.empty()) throw DegenerateInputError("sort: empty token sequence");
  Pinned p = split_terminal(seq);
  std::stable_sort(p.content.begin(), p.content.end(),
                   [](const std::string& x, const std::string& y) { return casefold(x) < casefold(y); });
  return join(std::move(p.content), p.terminal);
}

TokenSeq reverse_tokens(const TokenSeq& seq) {
  if (seq.empty()) throw DegenerateInputError("reverse: empty token sequence");
  Pinned p = split_terminal(seq);
  std::reverse(p.content.begin(), p.content.end());
  return join(std::move(p.content), p.terminal);
}

size_t shared_bigram_count(const TokenSeq& input, const TokenSeq& output) {
  return count_shared(bigrams_of(input.surfaces()), output.surfaces());
}

ShuffleResult shuffle_tokens(const TokenSeq& seq, uint64_t seed, int max_attempts) {
  const Pinned p = split_terminal(seq);
  if (p.content.size() < 2) {
    throw DegenerateInputError("shuffle: need at least two content tokens");
  }
  const BigramSet input = bigrams_of(seq.surfaces());
  const size_t m = p.content.size();
  Rng rng(seed);

  std::vector<size_t> best_order;
  size_t best_shared = SIZE_MAX;
  ShuffleResult result;
  for (int attempt = 1; attempt <= std::max(1, max_attempts); ++attempt) {
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    rng.shuffle(order);
    const size_t shared = count_shared(input, arrange(p.content, order, p.terminal));
    result.attempts = attempt;
    if (shared < best_shared) {
      best_shared = shared;
      best_order = std::move(order);
    }
    if (best_shared == 0) break;
  }

  if (best_shared > 0 && m <= kExhaustiveShuffleLimit) {
    // Enumerate every order; pick uniformly among the bigram-free ones, or
    // fall back to the global minimum.
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::vector<std::vector<size_t>> accepted;
    do {
      const size_t shared = count_shared(input, arrange(p.content, order, p.terminal));
      if (shared == 0) {
        accepted.push_back(order);
      } else if (shared < best_shared) {
        best_shared = shared;
        best_order = order;
      }
    } while (std::next_permutation(order.begin(), order.end()));
    if (!accepted.empty()) {
      best_order = accepted[rng.uniform_index(accepted.size())];
      best_shared = 0;
    }
  }

  result.tokens = TokenSeq(arrange(p.content, best_order, p.terminal));
  result.shared_bigrams = best_shared;
  result.best_effort = best_shared > 0;
  return result;
}

TransformedExample copy_sort(const Example& ex, TaskKind task) {
  if (task != TaskKind::kPair || !ex.input.text_b) {
    throw UnsupportedTransformError("copysort is only defined for pair tasks");
  }
  TransformedExample out;
  out.example = ex;
  out.example.input.text_b = detokenize(sort_tokens(tokenize(ex.input.text_a)));
  out.source_id = ex.id;
  out.transform.kind = TransformKind::kCopySort;
  out.transform.target_side = Side::kB;
  return out;
}

TransformedExample apply_reordering(const Example& ex, const TransformSpec& spec, TaskKind task) {
  const Side side = spec.side_for(task);
  const TokenSeq tokens = tokenize(ex.input.side(side));
  TransformedExample out;
  out.example = ex;
  out.source_id = ex.id;
  out.transform = spec;
  TokenSeq result;
  switch (spec.kind) {
    case TransformKind::kSort: result = sort_tokens(tokens); break;
    case TransformKind::kReverse: result = reverse_tokens(tokens); break;
    case TransformKind::kShuffle: {
      ShuffleResult s =
          shuffle_tokens(tokens, derive_seed(spec.seed, ex.id), spec.max_shuffle_attempts);
      out.best_effort = s.best_effort;
      result = std::move(s.tokens);
      break;
    }
    default: throw ConfigError("apply_reordering: not a reordering transform");
  }
  (side == Side::kA ? out.example.input.text_a : *out.example.input.text_b) = detokenize(result);
  return out;
}

}  // namespace saladbench

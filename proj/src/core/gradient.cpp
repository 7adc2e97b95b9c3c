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

#include "core/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "core/errors.hpp"
#include "core/random.hpp"

namespace saladbench {

ImportancePartition partition_by_importance(const SaliencyScores& scores, double r) {
  const auto& s = scores.scores;
  if (s.empty()) throw DataError("partition_by_importance: empty scores");
  if (!(r > 0.0 && r <= 1.0)) throw ConfigError("importance fraction r must lie in (0, 1]");
  for (double v : s) {
    if (!std::isfinite(v)) throw DataError("partition_by_importance: non-finite score");
  }
  const size_t n = s.size();
  const size_t k = std::max<size_t>(1, static_cast<size_t>(std::floor(r * static_cast<double>(n) + 1e-9)));

  std::vector<size_t> asc(n);
  std::iota(asc.begin(), asc.end(), size_t{0});
  std::stable_sort(asc.begin(), asc.end(), [&](size_t a, size_t b) { return s[a] < s[b]; });

  ImportancePartition part;
  part.r = r;
  part.bottom.assign(asc.begin(), asc.begin() + static_cast<std::ptrdiff_t>(std::min(k, n)));

  std::vector<bool> in_bottom(n, false);
  for (size_t i : part.bottom) in_bottom[i] = true;
  std::vector<size_t> desc;
  for (size_t i = 0; i < n; ++i) {
    if (!in_bottom[i]) desc.push_back(i);
  }
  std::stable_sort(desc.begin(), desc.end(), [&](size_t a, size_t b) { return s[a] > s[b]; });
  part.top.assign(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(std::min(k, desc.size())));

  std::sort(part.bottom.begin(), part.bottom.end());
  std::sort(part.top.begin(), part.top.end());
  return part;
}

namespace {

void check_positions(const TokenSeq& seq, const ImportancePartition& part) {
  for (size_t i : part.bottom) {
    if (i >= seq.size()) throw DataError("importance partition does not match the sequence");
  }
  for (size_t i : part.top) {
    if (i >= seq.size()) throw DataError("importance partition does not match the sequence");
  }
}

}  // namespace

TokenSeq drop_tokens(const TokenSeq& seq, const ImportancePartition& part) {
  check_positions(seq, part);
  const std::set<size_t> bottom(part.bottom.begin(), part.bottom.end());
  std::vector<std::string> out;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (!bottom.count(i)) out.push_back(seq[i]);
  }
  if (out.empty()) throw DegenerateInputError("drop: every token was dropped");
  return TokenSeq(std::move(out));
}

TokenSeq repeat_tokens(const TokenSeq& seq, const ImportancePartition& part, uint64_t seed) {
  check_positions(seq, part);
  if (part.top.empty()) {
    throw UnsupportedTransformError("repeat: no important tokens to repeat (sequence too short)");
  }
  Rng rng(seed);
  std::vector<std::string> out = seq.surfaces();
  for (size_t i : part.bottom) out[i] = seq[part.top[rng.uniform_index(part.top.size())]];
  return TokenSeq(std::move(out));
}

TokenSeq replace_tokens(const TokenSeq& seq, const ImportancePartition& part,
                        std::span<const std::string> vocab, uint64_t seed) {
  check_positions(seq, part);
  if (vocab.empty()) throw ConfigError("replace: empty vocabulary");
  Rng rng(seed);
  std::vector<std::string> out = seq.surfaces();
  for (size_t i : part.bottom) out[i] = vocab[rng.uniform_index(vocab.size())];
  return TokenSeq(std::move(out));
}

TransformedExample copy_one(const Example& ex, const SaliencyScores& scores_a, TaskKind task) {
  if (task != TaskKind::kPair || !ex.input.text_b) {
    throw UnsupportedTransformError("copyone is only defined for pair tasks");
  }
  const TokenSeq tokens = tokenize(ex.input.text_a);
  if (tokens.empty()) throw DegenerateInputError("copyone: empty text_a");
  if (scores_a.scores.size() != tokens.size()) {
    throw DataError("copyone: saliency has " + std::to_string(scores_a.scores.size()) +
                    " scores for " + std::to_string(tokens.size()) + " tokens in '" + ex.id + "'");
  }
  size_t best = 0;
  for (size_t i = 1; i < tokens.size(); ++i) {
    if (scores_a.scores[i] > scores_a.scores[best]) best = i;
  }
  TransformedExample out;
  out.example = ex;
  out.example.input.text_b = tokens[best];
  out.source_id = ex.id;
  out.transform.kind = TransformKind::kCopyOne;
  out.transform.target_side = Side::kB;
  return out;
}

Side saliency_side(const TransformSpec& spec, TaskKind task) {
  return spec.kind == TransformKind::kCopyOne ? Side::kA : spec.side_for(task);
}

TransformedExample apply_gradient(const Example& ex, const TransformSpec& spec, TaskKind task,
                                  const SaliencyScores& scores, std::span<const std::string> vocab) {
  if (spec.kind == TransformKind::kCopyOne) {
    TransformedExample out = copy_one(ex, scores, task);
    out.transform = spec;
    out.transform.target_side = Side::kB;
    return out;
  }
  const Side side = spec.side_for(task);
  const TokenSeq tokens = tokenize(ex.input.side(side));
  if (tokens.empty()) throw DegenerateInputError(std::string(to_string(spec.kind)) + ": empty text in '" + ex.id + "'");
  if (scores.scores.size() != tokens.size()) {
    throw DataError(std::string(to_string(spec.kind)) + ": saliency has " +
                    std::to_string(scores.scores.size()) + " scores for " +
                    std::to_string(tokens.size()) + " tokens in '" + ex.id + "'");
  }
  const ImportancePartition part = partition_by_importance(scores, spec.r);
  const uint64_t seed = derive_seed(spec.seed, ex.id);
  TokenSeq result;
  switch (spec.kind) {
    case TransformKind::kDrop: result = drop_tokens(tokens, part); break;
    case TransformKind::kRepeat: result = repeat_tokens(tokens, part, seed); break;
    case TransformKind::kReplace: result = replace_tokens(tokens, part, vocab, seed); break;
    default: throw ConfigError("apply_gradient: not a gradient transform");
  }
  TransformedExample out;
  out.example = ex;
  out.source_id = ex.id;
  out.transform = spec;
  (side == Side::kA ? out.example.input.text_a : *out.example.input.text_b) = detokenize(result);
  return out;
}

std::vector<std::string> corpus_vocabulary(const Dataset& ds) {
  std::set<std::string> vocab;
  for (const auto& ex : ds.examples) {
    for (const auto& t : tokenize(ex.input.text_a)) vocab.insert(t);
    if (ex.input.text_b) {
      for (const auto& t : tokenize(*ex.input.text_b)) vocab.insert(t);
    }
  }
  return {vocab.begin(), vocab.end()};
}

}  // namespace saladbench

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

#include "core/engine.hpp"

#include <spdlog/spdlog.h>

#include "core/errors.hpp"
#include "core/gradient.hpp"
#include "core/lexical.hpp"

namespace saladbench {

std::optional<std::string> unavailable_reason(TransformKind kind, const TransformContext& ctx) {
  if (!applicable(kind, ctx.task)) return "the transformation is not defined for single-text tasks";
  if (needs_saliency(kind)) {
    if (!ctx.saliency) return "no saliency source configured";
    if (!ctx.saliency->descriptor().supports_saliency) return "provider does not supply saliency";
    if (kind == TransformKind::kReplace && ctx.vocab.empty()) return "empty replacement vocabulary";
  }
  if (kind == TransformKind::kPbsmt && (!ctx.generators || ctx.generators->empty())) {
    return "no PBSMT generators trained";
  }
  return std::nullopt;
}

std::vector<SaliencyScores> saliency_for(std::span<const Example> examples, Side side,
                                         const Provider& provider) {
  std::vector<int> labels(examples.size(), 0);
  std::vector<Example> unlabelled;
  std::vector<size_t> where;
  for (size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].gold_label) {
      labels[i] = *examples[i].gold_label;
    } else {
      unlabelled.push_back(examples[i]);
      where.push_back(i);
    }
  }
  if (!unlabelled.empty()) {
    const auto preds = provider.predict_batch(unlabelled);
    for (size_t k = 0; k < where.size(); ++k) labels[where[k]] = preds[k].predicted;
  }
  return provider.saliency_batch(examples, labels, side);
}

KindOutput run_transform(std::span<const Example> examples, const TransformSpec& spec,
                         const TransformContext& ctx) {
  KindOutput out;
  out.spec = spec;
  out.unavailable = unavailable_reason(spec.kind, ctx);
  if (out.unavailable) return out;

  std::vector<SaliencyScores> scores;
  if (needs_saliency(spec.kind)) {
    // Saliency is only defined on non-empty text; short inputs are skipped by
    // the transform itself.
    scores = saliency_for(examples, saliency_side(spec, ctx.task), *ctx.saliency);
  }

  out.examples.reserve(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    try {
      switch (family_of(spec.kind)) {
        case TransformFamily::kLexical:
          out.examples.push_back(spec.kind == TransformKind::kCopySort
                                     ? copy_sort(ex, ctx.task)
                                     : apply_reordering(ex, spec, ctx.task));
          break;
        case TransformFamily::kGradient:
          out.examples.push_back(apply_gradient(ex, spec, ctx.task, scores[i], ctx.vocab));
          break;
        case TransformFamily::kStatistical:
          out.examples.push_back(pbsmt::generate_invalid(ex, ctx.task, *ctx.generators));
          break;
      }
      TransformSpec& applied = out.examples.back().transform;
      applied = spec;
      applied.target_side = requires_pair(spec.kind) ? Side::kB : spec.side_for(ctx.task);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kProvider) throw;
      spdlog::debug("{}: skipping '{}': {}", to_string(spec.kind), ex.id, e.what());
      out.skipped.push_back(ex.id);
    }
  }
  if (!out.skipped.empty()) {
    spdlog::warn("{}: skipped {} of {} examples", to_string(spec.kind), out.skipped.size(),
                 examples.size());
  }
  return out;
}

}  // namespace saladbench

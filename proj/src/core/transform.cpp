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

#include "core/transform.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "core/errors.hpp"

namespace saladbench {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kSort: return "sort";
    case TransformKind::kReverse: return "reverse";
    case TransformKind::kShuffle: return "shuffle";
    case TransformKind::kCopySort: return "copysort";
    case TransformKind::kDrop: return "drop";
    case TransformKind::kRepeat: return "repeat";
    case TransformKind::kReplace: return "replace";
    case TransformKind::kCopyOne: return "copyone";
    case TransformKind::kPbsmt: return "pbsmt";
  }
  return "?";
}

TransformKind parse_transform_kind(std::string_view name) {
  for (TransformKind k : kAllTransforms) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown transform '" + std::string(name) + "'");
}

std::vector<TransformKind> parse_transform_list(std::string_view csv) {
  std::vector<TransformKind> out;
  size_t start = 0;
  while (start <= csv.size()) {
    size_t comma = csv.find(',', start);
    if (comma == std::string_view::npos) comma = csv.size();
    std::string_view item = csv.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "all") {
      for (TransformKind k : kAllTransforms) {
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
      }
    } else if (!item.empty()) {
      const TransformKind k = parse_transform_kind(item);
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty transform list");
  return out;
}

TransformFamily family_of(TransformKind kind) {
  switch (kind) {
    case TransformKind::kSort:
    case TransformKind::kReverse:
    case TransformKind::kShuffle:
    case TransformKind::kCopySort: return TransformFamily::kLexical;
    case TransformKind::kPbsmt: return TransformFamily::kStatistical;
    default: return TransformFamily::kGradient;
  }
}

bool requires_pair(TransformKind kind) {
  return kind == TransformKind::kCopySort || kind == TransformKind::kCopyOne;
}

bool applicable(TransformKind kind, TaskKind task) {
  return task == TaskKind::kPair || !requires_pair(kind);
}

bool needs_saliency(TransformKind kind) { return family_of(kind) == TransformFamily::kGradient; }

bool is_reordering(TransformKind kind) {
  return kind == TransformKind::kSort || kind == TransformKind::kReverse ||
         kind == TransformKind::kShuffle;
}

Side TransformSpec::side_for(TaskKind task) const {
  if (target_side) return *target_side;
  return task == TaskKind::kPair ? Side::kB : Side::kA;
}

std::string TransformSpec::tag() const { return fmt::format("{}:{}:{}", to_string(kind), seed, r); }

}  // namespace saladbench

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

// Data model, tokenizer and dataset I/O shared by every other module.

#ifndef SALADBENCH_CORE_CORPUS_HPP_
#define SALADBENCH_CORE_CORPUS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace saladbench {

struct Token {
  std::string surface;
  size_t position = 0;
};

// An ordered word-token sequence. Positions are implicit (0..n-1).
class TokenSeq {
 public:
  TokenSeq() = default;
  explicit TokenSeq(std::vector<std::string> surfaces);

  size_t size() const { return surfaces_.size(); }
  bool empty() const { return surfaces_.empty(); }
  const std::string& operator[](size_t i) const { return surfaces_[i]; }
  Token at(size_t i) const { return Token{surfaces_.at(i), i}; }

  const std::vector<std::string>& surfaces() const { return surfaces_; }
  auto begin() const { return surfaces_.begin(); }
  auto end() const { return surfaces_.end(); }

  bool operator==(const TokenSeq&) const = default;

 private:
  std::vector<std::string> surfaces_;
};

enum class TaskKind { kSingle, kPair };

// Which text of an input a transform or saliency request targets.
enum class Side { kA, kB };

struct TextInput {
  std::string text_a;
  std::optional<std::string> text_b;

  const std::string& side(Side s) const;
  bool operator==(const TextInput&) const = default;
};

struct Example {
  std::string id;
  TextInput input;
  std::optional<int> gold_label;

  bool operator==(const Example&) const = default;
};

class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::vector<std::string> names, std::optional<int> default_label = std::nullopt);

  int n_classes() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int index) const { return names_.at(static_cast<size_t>(index)); }
  std::optional<int> default_label() const { return default_label_; }
  std::optional<int> index_of(std::string_view name) const;

  // Same names plus a trailing "invalid" class; used by the extra-class
  // mitigation strategy.
  LabelSet with_invalid_class() const;

 private:
  std::vector<std::string> names_;
  std::optional<int> default_label_;
};

struct Dataset {
  std::vector<Example> examples;
  LabelSet labels;
  TaskKind task_kind = TaskKind::kSingle;
  // Rows dropped at load because a required text was missing.
  size_t skipped_rows = 0;

  size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

enum class FileFormat { kTsv, kJsonl };

FileFormat parse_file_format(std::string_view name);
TaskKind parse_task_kind(std::string_view name);
std::string_view to_string(TaskKind kind);

// Whitespace split, leading/trailing .,!?;:'"() detached into single-character
// tokens, ASCII case folded to lower case.
TokenSeq tokenize(std::string_view text);

// Joins with single spaces.
std::string detokenize(const TokenSeq& seq);

bool is_terminal_punctuation(std::string_view surface);

Dataset load_dataset(const std::string& path, FileFormat format, const LabelSet& labels,
                     TaskKind task_kind);

// Optional provenance columns appended to written rows.
struct RowProvenance {
  std::string source_id;
  std::string transform;
};

// Writes examples in the dataset format. When provenance is given it must be
// index-aligned with examples and adds `source_id` and `transform` fields.
void write_dataset(const std::string& path, FileFormat format, const std::vector<Example>& examples,
                   const LabelSet& labels, const std::vector<RowProvenance>* provenance = nullptr);

// Seeded, disjoint and exhaustive split; the second dataset holds
// round(fraction * n) examples. Both keep the original relative order.
std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double fraction, uint64_t seed);

// Stable FNV-1a digest over ids, texts and labels, used for report provenance.
std::string dataset_checksum(const Dataset& ds);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_CORPUS_HPP_

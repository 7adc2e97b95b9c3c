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

#include "core/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "core/errors.hpp"
#include "core/random.hpp"
#include "json.hpp"

namespace saladbench {
namespace {

constexpr std::string_view kDetachable = ".,!?;:'\"()";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_detachable(char c) { return kDetachable.find(c) != std::string_view::npos; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (;;) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

// Tabs and newlines cannot appear inside a TSV field.
std::string tsv_escape(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

struct RawRow {
  std::string id;
  std::string text_a;
  std::string text_b;
  std::string label;
  size_t line_no = 0;
};

void add_row(Dataset& ds, std::unordered_set<std::string>& seen, RawRow row, size_t row_index,
             const std::string& path) {
  const std::string a = trim(row.text_a);
  const std::string b = trim(row.text_b);
  const bool pair = ds.task_kind == TaskKind::kPair;
  if (a.empty() || (pair && b.empty()) || (!pair && !b.empty())) {
    ++ds.skipped_rows;
    return;
  }
  Example ex;
  ex.id = row.id.empty() ? std::to_string(row_index) : row.id;
  ex.input.text_a = row.text_a;
  if (pair) ex.input.text_b = row.text_b;
  const std::string label = trim(row.label);
  if (!label.empty()) {
    const auto idx = ds.labels.index_of(label);
    if (!idx) {
      throw DataError(path + ":" + std::to_string(row.line_no) + ": unknown label '" + label +
                      "' in row '" + ex.id + "'");
    }
    ex.gold_label = *idx;
  }
  if (!seen.insert(ex.id).second) {
    throw DataError(path + ":" + std::to_string(row.line_no) + ": duplicate id '" + ex.id + "'");
  }
  ds.examples.push_back(std::move(ex));
}

}  // namespace

TokenSeq::TokenSeq(std::vector<std::string> surfaces) : surfaces_(std::move(surfaces)) {
  for (const auto& s : surfaces_) {
    if (s.empty() || std::any_of(s.begin(), s.end(), is_space)) {
      throw DataError("token surface must be non-empty and contain no whitespace: '" + s + "'");
    }
  }
}

const std::string& TextInput::side(Side s) const {
  if (s == Side::kA) return text_a;
  if (!text_b) throw UnsupportedTransformError("input has no text_b");
  return *text_b;
}

LabelSet::LabelSet(std::vector<std::string> names, std::optional<int> default_label)
    : names_(std::move(names)), default_label_(default_label) {
  if (names_.size() < 2) throw ConfigError("a label set needs at least two labels");
  std::set<std::string> unique(names_.begin(), names_.end());
  if (unique.size() != names_.size()) throw ConfigError("label names must be distinct");
  if (default_label_ && (*default_label_ < 0 || *default_label_ >= n_classes())) {
    throw ConfigError("default label index out of range");
  }
}

std::optional<int> LabelSet::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

LabelSet LabelSet::with_invalid_class() const {
  auto names = names_;
  names.emplace_back("invalid");
  return LabelSet(std::move(names), default_label_);
}

FileFormat parse_file_format(std::string_view name) {
  if (name == "tsv") return FileFormat::kTsv;
  if (name == "jsonl") return FileFormat::kJsonl;
  throw ConfigError("unknown dataset format '" + std::string(name) + "' (expected tsv or jsonl)");
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "single") return TaskKind::kSingle;
  if (name == "pair") return TaskKind::kPair;
  throw ConfigError("unknown task kind '" + std::string(name) + "' (expected single or pair)");
}

std::string_view to_string(TaskKind kind) { return kind == TaskKind::kPair ? "pair" : "single"; }

TokenSeq tokenize(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j == i) break;
    std::string_view chunk = text.substr(i, j - i);
    i = j;

    size_t b = 0;
    size_t e = chunk.size();
    while (b < e && is_detachable(chunk[b])) ++b;
    if (b == e) {
      for (char c : chunk) out.emplace_back(1, c);
      continue;
    }
    while (e > b && is_detachable(chunk[e - 1])) --e;
    for (size_t k = 0; k < b; ++k) out.emplace_back(1, chunk[k]);
    out.push_back(lower(chunk.substr(b, e - b)));
    for (size_t k = e; k < chunk.size(); ++k) out.emplace_back(1, chunk[k]);
  }
  return TokenSeq(std::move(out));
}

std::string detokenize(const TokenSeq& seq) {
  std::string out;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += seq[i];
  }
  return out;
}

bool is_terminal_punctuation(std::string_view surface) {
  return surface == "." || surface == "!" || surface == "?";
}

Dataset load_dataset(const std::string& path, FileFormat format, const LabelSet& labels,
                     TaskKind task_kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");

  Dataset ds;
  ds.labels = labels;
  ds.task_kind = task_kind;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  size_t row_index = 0;

  if (format == FileFormat::kTsv) {
    if (!std::getline(in, line)) throw DataError(path + ": empty file, expected a header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_tabs(line);
    auto column = [&](std::string_view name) -> std::optional<size_t> {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) return std::nullopt;
      return static_cast<size_t>(it - header.begin());
    };
    const auto c_id = column("id");
    const auto c_a = column("text_a");
    const auto c_b = column("text_b");
    const auto c_label = column("label");
    if (!c_id || !c_a || !c_b || !c_label) {
      throw DataError(path + ": header must contain id, text_a, text_b and label columns");
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      const auto f = split_tabs(line);
      auto field = [&](size_t c) { return c < f.size() ? f[c] : std::string(); };
      RawRow row{field(*c_id), field(*c_a), field(*c_b), field(*c_label), line_no};
      add_row(ds, seen, std::move(row), row_index++, path);
    }
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (!obj.is_object()) throw DataError(path + ":" + std::to_string(line_no) + ": not an object");
      auto str = [&](const char* key) -> std::string {
        const auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return {};
        if (it->is_string()) return it->get<std::string>();
        if (it->is_number_integer()) return std::to_string(it->get<long long>());
        throw DataError(path + ":" + std::to_string(line_no) + ": field '" + key +
                        "' must be a string");
      };
      RawRow row{str("id"), str("text_a"), str("text_b"), str("label"), line_no};
      add_row(ds, seen, std::move(row), row_index++, path);
    }
  }
  if (ds.skipped_rows > 0) {
    spdlog::warn("{}: skipped {} malformed row(s) with a missing required text", path,
                 ds.skipped_rows);
  }
  return ds;
}

void write_dataset(const std::string& path, FileFormat format, const std::vector<Example>& examples,
                   const LabelSet& labels, const std::vector<RowProvenance>* provenance) {
  if (provenance && provenance->size() != examples.size()) {
    throw ConfigError("provenance must be index-aligned with examples");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  auto label_of = [&](const Example& ex) {
    return ex.gold_label ? labels.name(*ex.gold_label) : std::string();
  };
  if (format == FileFormat::kTsv) {
    out << "id\ttext_a\ttext_b\tlabel";
    if (provenance) out << "\tsource_id\ttransform";
    out << '\n';
    for (size_t i = 0; i < examples.size(); ++i) {
      const auto& ex = examples[i];
      out << tsv_escape(ex.id) << '\t' << tsv_escape(ex.input.text_a) << '\t'
          << tsv_escape(ex.input.text_b.value_or("")) << '\t' << label_of(ex);
      if (provenance) {
        out << '\t' << tsv_escape((*provenance)[i].source_id) << '\t' << (*provenance)[i].transform;
      }
      out << '\n';
    }
  } else {
    for (size_t i = 0; i < examples.size(); ++i) {
      const auto& ex = examples[i];
      nlohmann::ordered_json obj;
      obj["id"] = ex.id;
      obj["text_a"] = ex.input.text_a;
      if (ex.input.text_b) obj["text_b"] = *ex.input.text_b;
      if (ex.gold_label) obj["label"] = label_of(ex);
      if (provenance) {
        obj["source_id"] = (*provenance)[i].source_id;
        obj["transform"] = (*provenance)[i].transform;
      }
      out << obj.dump() << '\n';
    }
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("holdout fraction must lie in (0, 1)");
  }
  if (ds.empty()) throw DataError("cannot split an empty dataset");
  const size_t n = ds.size();
  const auto n_hold = static_cast<size_t>(std::llround(fraction * static_cast<double>(n)));

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> held(n, false);
  for (size_t i = 0; i < n_hold; ++i) held[order[i]] = true;

  Dataset keep{{}, ds.labels, ds.task_kind, 0};
  Dataset hold{{}, ds.labels, ds.task_kind, 0};
  for (size_t i = 0; i < n; ++i) {
    (held[i] ? hold : keep).examples.push_back(ds.examples[i]);
  }
  return {std::move(keep), std::move(hold)};
}

std::string dataset_checksum(const Dataset& ds) {
  uint64_t h = fnv1a(to_string(ds.task_kind));
  for (const auto& ex : ds.examples) {
    h = fnv1a(ex.id, h);
    h = fnv1a("\x1f", h);
    h = fnv1a(ex.input.text_a, h);
    h = fnv1a("\x1f", h);
    h = fnv1a(ex.input.text_b.value_or(""), h);
    h = fnv1a("\x1f", h);
    h = fnv1a(ex.gold_label ? std::to_string(*ex.gold_label) : "-", h);
    h = fnv1a("\x1e", h);
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace saladbench

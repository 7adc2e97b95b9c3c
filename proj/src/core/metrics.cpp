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

#include "core/metrics.hpp"

#include <fmt/format.h>

#include <cmath>

#include "core/errors.hpp"
#include "json.hpp"

namespace saladbench {

using nlohmann::json;
using nlohmann::ordered_json;

double agreement(std::span<const Prediction> original, std::span<const Prediction> transformed) {
  if (original.empty()) throw DataError("agreement: empty prediction list");
  if (original.size() != transformed.size()) {
    throw DataError("agreement: " + std::to_string(original.size()) + " original vs " +
                    std::to_string(transformed.size()) + " transformed predictions");
  }
  size_t same = 0;
  for (size_t i = 0; i < original.size(); ++i) {
    if (original[i].id != transformed[i].id) {
      throw DataError("agreement: id mismatch at " + std::to_string(i) + " ('" + original[i].id +
                      "' vs '" + transformed[i].id + "')");
    }
    if (original[i].predicted == transformed[i].predicted) ++same;
  }
  return 100.0 * static_cast<double>(same) / static_cast<double>(original.size());
}

double default_agreement(std::span<const Prediction> transformed, std::optional<int> default_label) {
  if (!default_label) throw ConfigError("default agreement: label set has no default label");
  if (transformed.empty()) throw DataError("default agreement: empty prediction list");
  size_t hits = 0;
  for (const auto& p : transformed) {
    if (p.predicted == *default_label) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(transformed.size());
}

double mean_confidence(std::span<const Prediction> preds) {
  if (preds.empty()) throw DataError("mean confidence: empty prediction list");
  double sum = 0.0;
  for (const auto& p : preds) sum += p.confidence;
  return 100.0 * sum / static_cast<double>(preds.size());
}

double accuracy(std::span<const Prediction> preds, std::span<const int> gold) {
  if (preds.empty() || preds.size() != gold.size()) {
    throw DataError("accuracy: need equally many predictions and gold labels");
  }
  size_t hits = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].predicted == gold[i]) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

double ece(std::span<const Prediction> preds, std::span<const int> gold, int bins) {
  if (bins < 1) throw ConfigError("ece: bins must be >= 1");
  if (preds.empty() || preds.size() != gold.size()) {
    throw DataError("ece: need equally many predictions and gold labels");
  }
  std::vector<size_t> count(static_cast<size_t>(bins), 0);
  std::vector<double> correct(static_cast<size_t>(bins), 0.0);
  std::vector<double> conf(static_cast<size_t>(bins), 0.0);
  for (size_t i = 0; i < preds.size(); ++i) {
    const double c = preds[i].confidence;
    size_t m = 0;
    while (m + 1 < static_cast<size_t>(bins) &&
           c > static_cast<double>(m + 1) / static_cast<double>(bins)) {
      ++m;
    }
    ++count[m];
    conf[m] += c;
    if (preds[i].predicted == gold[i]) correct[m] += 1.0;
  }
  double total = 0.0;
  const double n = static_cast<double>(preds.size());
  for (size_t m = 0; m < count.size(); ++m) {
    if (count[m] == 0) continue;
    const double size = static_cast<double>(count[m]);
    total += (size / n) * std::abs(correct[m] / size - conf[m] / size);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Report

bool MetricsReport::operator==(const MetricsReport& o) const {
  return report_to_json(*this) == report_to_json(o);
}

MetricsReport build_report(std::vector<MetricsRow> rows, ReportMeta meta) {
  if (rows.empty()) throw ConfigError("report: no rows");
  if (meta.labels.size() < 2) throw ConfigError("report: need at least 2 labels");
  MetricsReport report;
  auto average = [&](TransformFamily family) -> std::optional<FamilyAverage> {
    FamilyAverage avg;
    for (const auto& row : rows) {
      if (!row.applicable) continue;
      TransformKind kind;
      try {
        kind = parse_transform_kind(row.transform);
      } catch (const ConfigError&) {
        continue;
      }
      if (family_of(kind) != family) continue;
      avg.agreement += row.agreement;
      avg.confidence += row.confidence;
      ++avg.rows;
    }
    if (avg.rows == 0) return std::nullopt;
    avg.agreement /= static_cast<double>(avg.rows);
    avg.confidence /= static_cast<double>(avg.rows);
    return avg;
  };
  report.lexical = average(TransformFamily::kLexical);
  report.gradient = average(TransformFamily::kGradient);
  report.random_baseline = 100.0 / static_cast<double>(meta.labels.size());
  report.rows = std::move(rows);
  report.meta = std::move(meta);
  return report;
}

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

ordered_json family_json(const std::optional<FamilyAverage>& f) {
  if (!f) return nullptr;
  return ordered_json{{"agreement", f->agreement}, {"confidence", f->confidence}, {"rows", f->rows}};
}

std::optional<FamilyAverage> read_family(const json& j) {
  if (j.is_null()) return std::nullopt;
  return FamilyAverage{j.at("agreement").get<double>(), j.at("confidence").get<double>(),
                       j.at("rows").get<size_t>()};
}

std::string pct(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  ordered_json j;
  ordered_json meta;
  meta["provider"] = report.meta.provider;
  meta["task"] = report.meta.task;
  meta["labels"] = report.meta.labels;
  meta["dataset_checksum"] = report.meta.dataset_checksum;
  meta["seed"] = report.meta.seed;
  meta["config_hash"] = report.meta.config_hash;
  meta["clean_accuracy"] = optional_number(report.meta.clean_accuracy);
  meta["clean_confidence"] = optional_number(report.meta.clean_confidence);
  meta["ece"] = optional_number(report.meta.ece);
  j["meta"] = std::move(meta);
  j["rows"] = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json row;
    row["transform"] = r.transform;
    row["applicable"] = r.applicable;
    row["default_label_metric"] = r.default_label_metric;
    row["agreement"] = r.agreement;
    row["confidence"] = r.confidence;
    row["n"] = r.n;
    row["seeds"] = r.seeds;
    row["seed_agreement"] = r.seed_agreement;
    row["seed_confidence"] = r.seed_confidence;
    row["note"] = r.note;
    j["rows"].push_back(std::move(row));
  }
  j["lexical_average"] = family_json(report.lexical);
  j["gradient_average"] = family_json(report.gradient);
  j["random_baseline"] = report.random_baseline;
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    MetricsReport report;
    const json& meta = j.at("meta");
    report.meta.provider = meta.at("provider").get<std::string>();
    report.meta.task = meta.at("task").get<std::string>();
    report.meta.labels = meta.at("labels").get<std::vector<std::string>>();
    report.meta.dataset_checksum = meta.at("dataset_checksum").get<std::string>();
    report.meta.seed = meta.at("seed").get<uint64_t>();
    report.meta.config_hash = meta.at("config_hash").get<std::string>();
    report.meta.clean_accuracy = read_optional(meta, "clean_accuracy");
    report.meta.clean_confidence = read_optional(meta, "clean_confidence");
    report.meta.ece = read_optional(meta, "ece");
    for (const auto& row : j.at("rows")) {
      MetricsRow r;
      r.transform = row.at("transform").get<std::string>();
      r.applicable = row.at("applicable").get<bool>();
      r.default_label_metric = row.at("default_label_metric").get<bool>();
      r.agreement = row.at("agreement").get<double>();
      r.confidence = row.at("confidence").get<double>();
      r.n = row.at("n").get<size_t>();
      r.seeds = row.at("seeds").get<std::vector<uint64_t>>();
      r.seed_agreement = row.at("seed_agreement").get<std::vector<double>>();
      r.seed_confidence = row.at("seed_confidence").get<std::vector<double>>();
      r.note = row.at("note").get<std::string>();
      report.rows.push_back(std::move(r));
    }
    report.lexical = read_family(j.at("lexical_average"));
    report.gradient = read_family(j.at("gradient_average"));
    report.random_baseline = j.at("random_baseline").get<double>();
    return report;
  } catch (const json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
}

std::string report_to_csv(const MetricsReport& report) {
  std::string out = "transform,applicable,metric,agreement,confidence,n\n";
  for (const auto& r : report.rows) {
    if (!r.applicable) {
      out += fmt::format("{},false,,,,0\n", r.transform);
      continue;
    }
    out += fmt::format("{},true,{},{},{},{}\n", r.transform,
                       r.default_label_metric ? "default_label" : "agreement", pct(r.agreement),
                       pct(r.confidence), r.n);
  }
  return out;
}

std::string report_to_markdown(const MetricsReport& report) {
  std::string out = "| Transform | Agreement (%) | Confidence (%) | n |\n|---|---:|---:|---:|\n";
  for (const auto& r : report.rows) {
    if (!r.applicable) {
      out += fmt::format("| {} | -- | -- | -- |\n", r.transform);
      continue;
    }
    const std::string mark = r.default_label_metric ? "*" : "";
    out += fmt::format("| {}{} | {} | {} | {} |\n", r.transform, mark, pct(r.agreement),
                       pct(r.confidence), r.n);
  }
  if (report.lexical) {
    out += fmt::format("| Avg. Lex. | {} | {} | |\n", pct(report.lexical->agreement),
                       pct(report.lexical->confidence));
  }
  if (report.gradient) {
    out += fmt::format("| Avg. Grad. | {} | {} | |\n", pct(report.gradient->agreement),
                       pct(report.gradient->confidence));
  }
  out += fmt::format("| Random | {} | {} | |\n", pct(report.random_baseline), pct(report.random_baseline));
  bool any_default = false;
  for (const auto& r : report.rows) any_default = any_default || (r.applicable && r.default_label_metric);
  if (any_default) out += "\n\\* agreement with the default label.\n";
  return out;
}

}  // namespace saladbench

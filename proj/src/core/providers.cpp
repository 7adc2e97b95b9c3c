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

#include "core/providers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <thread>

#include "core/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace saladbench {

using nlohmann::json;

Prediction make_prediction(std::string id, std::vector<double> probs, int n_classes) {
  if (probs.size() != static_cast<size_t>(n_classes)) {
    throw ProviderError("contract violation for '" + id + "': expected " +
                        std::to_string(n_classes) + " probabilities, got " +
                        std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ProviderError("contract violation for '" + id + "': invalid probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRenormalizeTolerance) {
    throw ProviderError("contract violation for '" + id + "': probabilities sum to " +
                        std::to_string(sum));
  }
  if (sum != 1.0) {
    for (double& p : probs) p /= sum;
  }
  Prediction out;
  out.id = std::move(id);
  out.predicted = 0;
  for (size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[static_cast<size_t>(out.predicted)]) out.predicted = static_cast<int>(c);
  }
  out.confidence = probs[static_cast<size_t>(out.predicted)];
  out.probs = std::move(probs);
  return out;
}

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kEmbedded: return "embedded";
    case ProviderKind::kReplay: return "replay";
    case ProviderKind::kHttp: return "http";
  }
  return "?";
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "embedded") return ProviderKind::kEmbedded;
  if (name == "replay") return ProviderKind::kReplay;
  if (name == "http") return ProviderKind::kHttp;
  throw ConfigError("unknown provider kind '" + std::string(name) + "'");
}

namespace {

void check_labels(std::span<const Example> inputs, std::span<const int> loss_labels) {
  if (inputs.size() != loss_labels.size()) {
    throw ConfigError("saliency: " + std::to_string(inputs.size()) + " inputs but " +
                      std::to_string(loss_labels.size()) + " loss labels");
  }
}

void check_alignment(const Example& ex, Side side, const SaliencyScores& s) {
  const size_t n = tokenize(ex.input.side(side)).size();
  if (s.scores.size() != n) {
    throw ProviderError("contract violation for '" + ex.id + "': " +
                        std::to_string(s.scores.size()) + " saliency scores for " +
                        std::to_string(n) + " tokens");
  }
  for (double v : s.scores) {
    if (!std::isfinite(v)) throw ProviderError("contract violation for '" + ex.id + "': non-finite saliency");
  }
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<json> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Embedded

EmbeddedProvider::EmbeddedProvider(std::shared_ptr<const ToyModelParams> params, std::string location)
    : params_(std::move(params)), location_(std::move(location)) {
  if (!params_) throw ConfigError("embedded provider: no parameters");
  params_->validate();
}

ProviderDescriptor EmbeddedProvider::descriptor() const {
  return {ProviderKind::kEmbedded, location_, true};
}

int EmbeddedProvider::n_classes() const { return static_cast<int>(params_->n_classes); }

std::vector<Prediction> EmbeddedProvider::predict_batch(std::span<const Example> inputs) const {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (const auto& ex : inputs) out.push_back(make_prediction(ex.id, forward(*params_, ex), n_classes()));
  return out;
}

std::vector<SaliencyScores> EmbeddedProvider::saliency_batch(std::span<const Example> inputs,
                                                             std::span<const int> loss_labels,
                                                             Side side) const {
  check_labels(inputs, loss_labels);
  std::vector<SaliencyScores> out;
  out.reserve(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    out.push_back(saliency(*params_, inputs[i], side, loss_labels[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Replay

ReplayProvider::ReplayProvider(const std::string& predictions_path, int n_classes,
                               const std::string& saliency_path)
    : path_(predictions_path), n_classes_(n_classes) {
  if (n_classes < 2) throw ConfigError("replay provider: need at least 2 classes");
  for (const auto& j : read_jsonl(predictions_path)) {
    try {
      Record r;
      r.text_a = optional_string(j, "text_a");
      r.text_b = optional_string(j, "text_b");
      r.probs = j.at("probs").get<std::vector<double>>();
      records_[j.at("id").get<std::string>()].push_back(std::move(r));
    } catch (const json::exception& e) {
      throw DataError(predictions_path + ": " + e.what());
    }
  }
  if (!saliency_path.empty()) {
    has_saliency_ = true;
    for (const auto& j : read_jsonl(saliency_path)) {
      try {
        SaliencyRecord r;
        r.text = optional_string(j, "text");
        r.scores.loss_label = j.at("loss_label").get<int>();
        r.scores.scores = j.at("scores").get<std::vector<double>>();
        saliency_[j.at("id").get<std::string>()].push_back(std::move(r));
      } catch (const json::exception& e) {
        throw DataError(saliency_path + ": " + e.what());
      }
    }
  }
}

ProviderDescriptor ReplayProvider::descriptor() const {
  return {ProviderKind::kReplay, path_, has_saliency_};
}

std::vector<Prediction> ReplayProvider::predict_batch(std::span<const Example> inputs) const {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (const auto& ex : inputs) {
    const auto it = records_.find(ex.id);
    const Record* hit = nullptr;
    if (it != records_.end()) {
      for (const auto& r : it->second) {
        const bool keyed = r.text_a || r.text_b;
        if (!keyed) {
          if (it->second.size() == 1) hit = &r;
          continue;
        }
        if (r.text_a == std::optional<std::string>(ex.input.text_a) && r.text_b == ex.input.text_b) {
          hit = &r;
          break;
        }
      }
    }
    if (!hit) throw ProviderError("missing prediction for id '" + ex.id + "'");
    out.push_back(make_prediction(ex.id, hit->probs, n_classes_));
  }
  return out;
}

std::vector<SaliencyScores> ReplayProvider::saliency_batch(std::span<const Example> inputs,
                                                           std::span<const int> loss_labels,
                                                           Side side) const {
  if (!has_saliency_) throw ProviderError("replay provider has no saliency file");
  check_labels(inputs, loss_labels);
  std::vector<SaliencyScores> out;
  for (const auto& ex : inputs) {
    const auto it = saliency_.find(ex.id);
    const SaliencyRecord* hit = nullptr;
    if (it != saliency_.end()) {
      for (const auto& r : it->second) {
        if (!r.text ? it->second.size() == 1 : *r.text == ex.input.side(side)) {
          hit = &r;
          break;
        }
      }
    }
    if (!hit) throw ProviderError("missing saliency for id '" + ex.id + "'");
    check_alignment(ex, side, hit->scores);
    out.push_back(hit->scores);
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP

HttpOptions http_options_from_env() {
  HttpOptions opts;
  if (const char* env = std::getenv("SALADBENCH_HTTP_TIMEOUT_MS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) {
      throw ConfigError("SALADBENCH_HTTP_TIMEOUT_MS must be a positive integer");
    }
    opts.timeout_ms = static_cast<int>(v);
  }
  return opts;
}

HttpProvider::HttpProvider(std::string base_url, int n_classes, bool supports_saliency,
                           HttpOptions options)
    : base_url_(std::move(base_url)),
      n_classes_(n_classes),
      supports_saliency_(supports_saliency),
      options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.rfind("http://", 0) != 0 && base_url_.rfind("https://", 0) != 0) {
    throw ConfigError("http provider: URL must start with http:// or https://");
  }
  if (n_classes < 2) throw ConfigError("http provider: need at least 2 classes");
  if (options_.max_in_flight < 1 || options_.batch_size < 1 || options_.timeout_ms < 1) {
    throw ConfigError("http provider: limits must be positive");
  }
}

ProviderDescriptor HttpProvider::descriptor() const {
  return {ProviderKind::kHttp, base_url_, supports_saliency_};
}

HttpProvider::Response HttpProvider::post(std::span<const Example> inputs,
                                          std::span<const int> loss_labels,
                                          std::optional<Side> saliency_side) const {
  json body;
  body["inputs"] = json::array();
  for (const auto& ex : inputs) {
    json item{{"id", ex.id}, {"text_a", ex.input.text_a}};
    item["text_b"] = ex.input.text_b ? json(*ex.input.text_b) : json(nullptr);
    body["inputs"].push_back(std::move(item));
  }
  body["want_saliency"] = saliency_side.has_value();
  body["loss_labels"] = saliency_side ? json(std::vector<int>(loss_labels.begin(), loss_labels.end()))
                                      : json(nullptr);
  if (saliency_side) body["saliency_side"] = *saliency_side == Side::kA ? "a" : "b";

  httplib::Client client(base_url_);
  const auto timeout = std::chrono::milliseconds(options_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const auto res = client.Post("/v1/predict", body.dump(), "application/json");
  if (!res) {
    throw ProviderError("http provider: request to " + base_url_ + " failed: " +
                        httplib::to_string(res.error()));
  }
  auto excerpt = [&]() { return res->body.substr(0, 200); };
  if (res->status != 200) {
    throw ProviderError("http provider: status " + std::to_string(res->status) + ": " + excerpt());
  }
  Response out;
  try {
    const json j = json::parse(res->body);
    out.probs = j.at("probs").get<std::vector<std::vector<double>>>();
    if (const auto it = j.find("saliency"); it != j.end() && !it->is_null()) {
      out.saliency = it->get<std::vector<std::vector<double>>>();
    }
  } catch (const json::exception& e) {
    throw ProviderError("http provider: malformed body (" + std::string(e.what()) + "): " + excerpt());
  }
  if (out.probs.size() != inputs.size()) {
    throw ProviderError("http provider: " + std::to_string(out.probs.size()) +
                        " results for " + std::to_string(inputs.size()) + " inputs: " + excerpt());
  }
  if (saliency_side && (!out.saliency || out.saliency->size() != inputs.size())) {
    throw ProviderError("http provider: saliency missing or misaligned: " + excerpt());
  }
  return out;
}

template <typename Fn>
void HttpProvider::for_each_batch(size_t n, Fn fn) const {
  const size_t batches = (n + options_.batch_size - 1) / options_.batch_size;
  std::vector<std::exception_ptr> errors(batches);
  for (size_t wave = 0; wave < batches; wave += static_cast<size_t>(options_.max_in_flight)) {
    const size_t wave_end = std::min(batches, wave + static_cast<size_t>(options_.max_in_flight));
    std::vector<std::thread> threads;
    for (size_t b = wave; b < wave_end; ++b) {
      threads.emplace_back([&, b]() {
        try {
          const size_t begin = b * options_.batch_size;
          fn(begin, std::min(n, begin + options_.batch_size));
        } catch (...) {
          errors[b] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<Prediction> HttpProvider::predict_batch(std::span<const Example> inputs) const {
  std::vector<Prediction> out(inputs.size());
  for_each_batch(inputs.size(), [&](size_t begin, size_t end) {
    const auto res = post(inputs.subspan(begin, end - begin), {}, std::nullopt);
    for (size_t i = begin; i < end; ++i) {
      out[i] = make_prediction(inputs[i].id, res.probs[i - begin], n_classes_);
    }
  });
  return out;
}

std::vector<SaliencyScores> HttpProvider::saliency_batch(std::span<const Example> inputs,
                                                         std::span<const int> loss_labels,
                                                         Side side) const {
  if (!supports_saliency_) throw ProviderError("http provider configured without saliency");
  check_labels(inputs, loss_labels);
  std::vector<SaliencyScores> out(inputs.size());
  for_each_batch(inputs.size(), [&](size_t begin, size_t end) {
    const auto res = post(inputs.subspan(begin, end - begin), loss_labels.subspan(begin, end - begin), side);
    for (size_t i = begin; i < end; ++i) {
      out[i].scores = (*res.saliency)[i - begin];
      out[i].loss_label = loss_labels[i];
      check_alignment(inputs[i], side, out[i]);
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Exchange files

void write_predictions(const std::string& path, const std::vector<Prediction>& preds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto& p : preds) out << json{{"id", p.id}, {"probs", p.probs}}.dump() << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_saliency(const std::string& path, const std::vector<std::string>& ids,
                    const std::vector<SaliencyScores>& scores) {
  if (ids.size() != scores.size()) throw ConfigError("write_saliency: size mismatch");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (size_t i = 0; i < ids.size(); ++i) {
    out << json{{"id", ids[i]}, {"loss_label", scores[i].loss_label}, {"scores", scores[i].scores}}.dump()
        << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace saladbench

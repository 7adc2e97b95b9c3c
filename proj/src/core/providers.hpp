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

// Sources of class probabilities and token saliency: the embedded toy model,
// replayed prediction files, and a remote model behind HTTP.

#ifndef SALADBENCH_CORE_PROVIDERS_HPP_
#define SALADBENCH_CORE_PROVIDERS_HPP_

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/gradient.hpp"
#include "core/toyclf.hpp"

namespace saladbench {

struct Prediction {
  std::string id;
  std::vector<double> probs;
  int predicted = 0;  // argmax, ties to the lowest index
  double confidence = 0.0;
};

// Sums within this distance of 1 are renormalised; anything further is a
// contract violation.
inline constexpr double kRenormalizeTolerance = 1e-3;

// Validates and normalises raw probabilities. Throws ProviderError when the
// length is not `n_classes`, an entry is negative or non-finite, or the sum is
// off by more than kRenormalizeTolerance.
Prediction make_prediction(std::string id, std::vector<double> probs, int n_classes);

enum class ProviderKind { kEmbedded, kReplay, kHttp };

std::string_view to_string(ProviderKind kind);
ProviderKind parse_provider_kind(std::string_view name);

struct ProviderDescriptor {
  ProviderKind kind = ProviderKind::kEmbedded;
  std::string location;  // params file, prediction file or base URL
  bool supports_saliency = false;
};

// Providers are safe for concurrent read-only use.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual ProviderDescriptor descriptor() const = 0;
  virtual int n_classes() const = 0;

  // One prediction per input, in input order.
  virtual std::vector<Prediction> predict_batch(std::span<const Example> inputs) const = 0;

  // Scores for the tokens of `side` of each input, computed against the
  // matching entry of `loss_labels`. Throws ProviderError when the provider
  // has no saliency.
  virtual std::vector<SaliencyScores> saliency_batch(std::span<const Example> inputs,
                                                     std::span<const int> loss_labels,
                                                     Side side) const = 0;
};

class EmbeddedProvider final : public Provider {
 public:
  EmbeddedProvider(std::shared_ptr<const ToyModelParams> params, std::string location = "");

  ProviderDescriptor descriptor() const override;
  int n_classes() const override;
  std::vector<Prediction> predict_batch(std::span<const Example> inputs) const override;
  std::vector<SaliencyScores> saliency_batch(std::span<const Example> inputs,
                                             std::span<const int> loss_labels,
                                             Side side) const override;

  const ToyModelParams& params() const { return *params_; }

 private:
  std::shared_ptr<const ToyModelParams> params_;
  std::string location_;
};

// Predictions from JSONL records {"id", "probs"}. Records may also carry
// "text_a"/"text_b"; when several records share an id, the one whose texts
// match the request is used, so original and transformed predictions can
// live in one file. Saliency comes from an optional file of
// {"id", "loss_label", "scores"} records.
class ReplayProvider final : public Provider {
 public:
  ReplayProvider(const std::string& predictions_path, int n_classes,
                 const std::string& saliency_path = "");

  ProviderDescriptor descriptor() const override;
  int n_classes() const override { return n_classes_; }
  std::vector<Prediction> predict_batch(std::span<const Example> inputs) const override;
  std::vector<SaliencyScores> saliency_batch(std::span<const Example> inputs,
                                             std::span<const int> loss_labels,
                                             Side side) const override;

 private:
  struct Record {
    std::optional<std::string> text_a;
    std::optional<std::string> text_b;
    std::vector<double> probs;
  };
  struct SaliencyRecord {
    std::optional<std::string> text;
    SaliencyScores scores;
  };

  std::string path_;
  int n_classes_;
  std::map<std::string, std::vector<Record>> records_;
  std::map<std::string, std::vector<SaliencyRecord>> saliency_;
  bool has_saliency_ = false;
};

struct HttpOptions {
  int timeout_ms = 30000;
  int max_in_flight = 4;
  size_t batch_size = 32;
};

// Reads SALADBENCH_HTTP_TIMEOUT_MS when set.
HttpOptions http_options_from_env();

// POST {base_url}/v1/predict. Batches run concurrently up to max_in_flight.
class HttpProvider final : public Provider {
 public:
  HttpProvider(std::string base_url, int n_classes, bool supports_saliency,
               HttpOptions options = http_options_from_env());

  ProviderDescriptor descriptor() const override;
  int n_classes() const override { return n_classes_; }
  std::vector<Prediction> predict_batch(std::span<const Example> inputs) const override;
  std::vector<SaliencyScores> saliency_batch(std::span<const Example> inputs,
                                             std::span<const int> loss_labels,
                                             Side side) const override;

 private:
  struct Response {
    std::vector<std::vector<double>> probs;
    std::optional<std::vector<std::vector<double>>> saliency;
  };
  Response post(std::span<const Example> inputs, std::span<const int> loss_labels,
                std::optional<Side> saliency_side) const;
  template <typename Fn>
  void for_each_batch(size_t n, Fn fn) const;

  std::string base_url_;
  int n_classes_;
  bool supports_saliency_;
  HttpOptions options_;
};

// JSONL helpers for the exchange formats.
void write_predictions(const std::string& path, const std::vector<Prediction>& preds);
void write_saliency(const std::string& path, const std::vector<std::string>& ids,
                    const std::vector<SaliencyScores>& scores);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_PROVIDERS_HPP_

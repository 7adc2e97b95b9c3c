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

// Bag-of-embeddings text classifier with analytic gradients.
//
// Each text is mean-pooled over its token embeddings; pair inputs concatenate
// the two pooled vectors. Logits are a linear head over the pooled vector and
// probabilities are softmax(logits / T).
//
// Pooling sums embeddings grouped by token id in id order, so the result is
// bit-identical under any permutation of a text's tokens.

#ifndef SALADBENCH_CORE_TOYCLF_HPP_
#define SALADBENCH_CORE_TOYCLF_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/corpus.hpp"
#include "core/gradient.hpp"

namespace saladbench {

inline constexpr std::string_view kUnknownToken = "<unk>";

// Token to row index. Row 0 is reserved for unknown tokens.
class Vocabulary {
 public:
  Vocabulary();
  explicit Vocabulary(std::vector<std::string> tokens);  // tokens[0] must be <unk>

  static Vocabulary from_dataset(const Dataset& ds);

  size_t size() const { return tokens_.size(); }
  int lookup(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct ToyModelParams {
  Vocabulary vocab;
  size_t dim = 32;
  size_t sides = 1;  // 1 for single-text tasks, 2 for pairs
  size_t n_classes = 2;
  double temperature = 1.0;
  std::vector<double> embedding;  // vocab.size() x dim, row-major
  std::vector<double> head;       // (sides * dim) x n_classes, row-major
  std::vector<double> bias;       // n_classes

  size_t features() const { return sides * dim; }
  double& emb(size_t row, size_t j) { return embedding[row * dim + j]; }
  double emb(size_t row, size_t j) const { return embedding[row * dim + j]; }
  double& w(size_t feature, size_t c) { return head[feature * n_classes + c]; }
  double w(size_t feature, size_t c) const { return head[feature * n_classes + c]; }

  void validate() const;
};

// Seeded N(0, init_scale^2) embeddings and head, zero bias.
ToyModelParams init_params(Vocabulary vocab, size_t dim, size_t sides, size_t n_classes,
                           double init_scale, uint64_t seed);

// Copy of `params` with one more output; the new column starts at zero.
ToyModelParams add_output_class(const ToyModelParams& params);

// One side of an input as a bag of (row, count) pairs in ascending row order.
struct Bag {
  std::vector<std::pair<int, int>> counts;
  size_t length = 0;
};

struct EncodedExample {
  std::vector<Bag> sides;
};

EncodedExample encode(const ToyModelParams& params, const Example& ex);

std::vector<double> pooled(const ToyModelParams& params, const EncodedExample& ex);
std::vector<double> logits(const ToyModelParams& params, const EncodedExample& ex);
// softmax(z / temperature); `temperature` defaults to params.temperature.
std::vector<double> probabilities(const ToyModelParams& params, const EncodedExample& ex,
                                  std::optional<double> temperature = std::nullopt);
std::vector<double> forward(const ToyModelParams& params, const Example& ex);

enum class LossKind { kCrossEntropy, kLabelSmoothing, kFocal, kEntropic };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);

struct LossConfig {
  LossKind kind = LossKind::kCrossEntropy;
  double label_smoothing = 0.1;
  double focal_gamma = 2.0;
  double entropy_weight = 0.1;
  // Default: minimise L_D - w H_{D'} (push invalid inputs towards uniform).
  // When set, minimise L_D + w H_{D'} instead.
  bool penalize_invalid_entropy = false;

  void validate() const;
};

// Supervised examples with their labels, plus (entropic loss only) a set of
// invalid examples whose prediction entropy enters the objective.
struct Batch {
  std::vector<const EncodedExample*> clean;
  std::vector<int> labels;
  std::vector<const EncodedExample*> invalid;
};

// Mean supervised loss over `clean` plus, for the entropic kind,
// -/+ weight * mean entropy over `invalid`.
double loss(const ToyModelParams& params, const Batch& batch, const LossConfig& cfg);

struct Gradients {
  std::vector<double> embedding;
  std::vector<double> head;
  std::vector<double> bias;
  double loss = 0.0;
};

Gradients grad(const ToyModelParams& params, const Batch& batch, const LossConfig& cfg);

// dL/dt_i for each token occurrence of one side under cross-entropy against
// `loss_label`, in token order.
std::vector<std::vector<double>> input_gradients(const ToyModelParams& params, const Example& ex,
                                                 Side side, int loss_label);

// t_i . dL/dt_i per token of `side`.
SaliencyScores saliency(const ToyModelParams& params, const Example& ex, Side side,
                        int loss_label);

struct TrainConfig {
  int epochs = 3;
  int batch_size = 8;
  double learning_rate = 0.5;
  uint64_t seed = 0;
  size_t dim = 32;
  double init_scale = 0.1;

  void validate() const;
};

// Mini-batch gradient descent on examples with gold labels. Starts from
// `warm_start` when given (its vocabulary is kept), otherwise from
// init_params over the dataset's vocabulary. `invalid` feeds the entropy term
// of the entropic loss and is ignored by other kinds.
ToyModelParams train(const Dataset& ds, const LossConfig& loss_cfg, const TrainConfig& train_cfg,
                     const ToyModelParams* warm_start = nullptr,
                     const std::vector<Example>* invalid = nullptr);

// Mean negative log-likelihood of gold labels at the given temperature.
double nll(const ToyModelParams& params, const Dataset& calibration, double temperature);

// Grid search over 521 log-spaced values of T in [0.05, 20] minimising NLL.
// Ties keep the smaller T.
double fit_temperature(const ToyModelParams& params, const Dataset& calibration);

void save_params(const std::string& path, const ToyModelParams& params);
ToyModelParams load_params(const std::string& path);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_TOYCLF_HPP_

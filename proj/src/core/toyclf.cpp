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

#include "core/toyclf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "core/errors.hpp"
#include "core/random.hpp"

namespace saladbench {

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{std::string(kUnknownToken)}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != kUnknownToken) {
    throw DataError("vocabulary must start with the <unk> token");
  }
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::from_dataset(const Dataset& ds) {
  std::vector<std::string> tokens{std::string(kUnknownToken)};
  for (auto& t : corpus_vocabulary(ds)) {
    if (t != kUnknownToken) tokens.push_back(std::move(t));
  }
  return Vocabulary(std::move(tokens));
}

int Vocabulary::lookup(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// Parameters

void ToyModelParams::validate() const {
  if (dim == 0 || sides < 1 || sides > 2 || n_classes < 2) {
    throw DataError("toy model: invalid shape");
  }
  if (embedding.size() != vocab.size() * dim || head.size() != features() * n_classes ||
      bias.size() != n_classes) {
    throw DataError("toy model: parameter arrays do not match the declared shape");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw DataError("toy model: temperature must be positive");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(embedding) || !finite(head) || !finite(bias)) {
    throw DataError("toy model: non-finite parameter");
  }
}

ToyModelParams init_params(Vocabulary vocab, size_t dim, size_t sides, size_t n_classes,
                           double init_scale, uint64_t seed) {
  ToyModelParams p;
  p.vocab = std::move(vocab);
  p.dim = dim;
  p.sides = sides;
  p.n_classes = n_classes;
  Rng rng(seed);
  p.embedding.resize(p.vocab.size() * dim);
  for (double& x : p.embedding) x = init_scale * rng.normal();
  p.head.resize(p.features() * n_classes);
  for (double& x : p.head) x = init_scale * rng.normal();
  p.bias.assign(n_classes, 0.0);
  p.validate();
  return p;
}

ToyModelParams add_output_class(const ToyModelParams& params) {
  ToyModelParams p = params;
  const size_t n = params.n_classes;
  p.n_classes = n + 1;
  p.head.assign(p.features() * p.n_classes, 0.0);
  for (size_t f = 0; f < p.features(); ++f) {
    for (size_t c = 0; c < n; ++c) p.w(f, c) = params.w(f, c);
  }
  p.bias.push_back(0.0);
  return p;
}

// ---------------------------------------------------------------------------
// Forward pass

EncodedExample encode(const ToyModelParams& params, const Example& ex) {
  EncodedExample enc;
  for (size_t s = 0; s < params.sides; ++s) {
    if (s == 1 && !ex.input.text_b) {
      throw DegenerateInputError("toy model: pair model given a single-text example '" + ex.id + "'");
    }
    const TokenSeq tokens = tokenize(s == 0 ? ex.input.text_a : *ex.input.text_b);
    if (tokens.empty()) {
      throw DegenerateInputError("toy model: empty text in example '" + ex.id + "'");
    }
    std::map<int, int> counts;
    for (const auto& t : tokens) ++counts[params.vocab.lookup(t)];
    Bag bag;
    bag.counts.assign(counts.begin(), counts.end());
    bag.length = tokens.size();
    enc.sides.push_back(std::move(bag));
  }
  return enc;
}

std::vector<double> pooled(const ToyModelParams& params, const EncodedExample& ex) {
  std::vector<double> out(params.features(), 0.0);
  for (size_t s = 0; s < ex.sides.size(); ++s) {
    const Bag& bag = ex.sides[s];
    double* dst = out.data() + s * params.dim;
    for (const auto& [row, count] : bag.counts) {
      for (size_t j = 0; j < params.dim; ++j) {
        dst[j] += static_cast<double>(count) * params.emb(static_cast<size_t>(row), j);
      }
    }
    const double inv = 1.0 / static_cast<double>(bag.length);
    for (size_t j = 0; j < params.dim; ++j) dst[j] *= inv;
  }
  return out;
}

namespace {

std::vector<double> logits_from_pooled(const ToyModelParams& params, const std::vector<double>& h) {
  std::vector<double> z(params.bias);
  for (size_t f = 0; f < params.features(); ++f) {
    const double hf = h[f];
    for (size_t c = 0; c < params.n_classes; ++c) z[c] += hf * params.w(f, c);
  }
  return z;
}

// log softmax(z / t).
std::vector<double> log_softmax(const std::vector<double>& z, double t) {
  std::vector<double> u(z.size());
  double m = -INFINITY;
  for (size_t c = 0; c < z.size(); ++c) {
    u[c] = z[c] / t;
    m = std::max(m, u[c]);
  }
  double sum = 0.0;
  for (double x : u) sum += std::exp(x - m);
  const double lse = m + std::log(sum);
  for (double& x : u) x -= lse;
  return u;
}

}  // namespace

std::vector<double> logits(const ToyModelParams& params, const EncodedExample& ex) {
  return logits_from_pooled(params, pooled(params, ex));
}

std::vector<double> probabilities(const ToyModelParams& params, const EncodedExample& ex,
                                  std::optional<double> temperature) {
  auto lp = log_softmax(logits(params, ex), temperature.value_or(params.temperature));
  for (double& x : lp) x = std::exp(x);
  return lp;
}

std::vector<double> forward(const ToyModelParams& params, const Example& ex) {
  return probabilities(params, encode(params, ex));
}

// ---------------------------------------------------------------------------
// Losses

LossKind parse_loss_kind(std::string_view name) {
  if (name == "cross_entropy" || name == "ce") return LossKind::kCrossEntropy;
  if (name == "label_smoothing" || name == "ls") return LossKind::kLabelSmoothing;
  if (name == "focal") return LossKind::kFocal;
  if (name == "entropic") return LossKind::kEntropic;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kCrossEntropy: return "cross_entropy";
    case LossKind::kLabelSmoothing: return "label_smoothing";
    case LossKind::kFocal: return "focal";
    case LossKind::kEntropic: return "entropic";
  }
  return "?";
}

void LossConfig::validate() const {
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) {
    throw ConfigError("label smoothing must lie in [0, 1)");
  }
  if (!(focal_gamma >= 0.0)) throw ConfigError("focal gamma must be >= 0");
  if (!(entropy_weight >= 0.0)) throw ConfigError("entropy weight must be >= 0");
}

namespace {

// Loss of one supervised example and its derivative with respect to the
// tempered logits u = z / T.
double supervised_term(const std::vector<double>& logp, int label, const LossConfig& cfg,
                       std::vector<double>* du) {
  const size_t n = logp.size();
  const auto y = static_cast<size_t>(label);
  double value = 0.0;
  std::vector<double> p(n);
  for (size_t c = 0; c < n; ++c) p[c] = std::exp(logp[c]);
  if (du) du->assign(n, 0.0);

  switch (cfg.kind) {
    case LossKind::kCrossEntropy:
    case LossKind::kEntropic:
      value = -logp[y];
      if (du) {
        for (size_t c = 0; c < n; ++c) (*du)[c] = p[c] - (c == y ? 1.0 : 0.0);
      }
      break;
    case LossKind::kLabelSmoothing: {
      const double eps = cfg.label_smoothing;
      for (size_t c = 0; c < n; ++c) {
        const double q = (c == y ? 1.0 - eps : 0.0) + eps / static_cast<double>(n);
        value -= q * logp[c];
        if (du) (*du)[c] = p[c] - q;
      }
      break;
    }
    case LossKind::kFocal: {
      const double g = cfg.focal_gamma;
      const double py = p[y];
      const double rest = 1.0 - py;
      const double mod = g == 0.0 ? 1.0 : std::pow(rest, g);
      value = -mod * logp[y];
      if (du) {
        // dL/dp_y * p_y, then chain through dp_y/du_c = p_y (delta - p_c).
        double first = 0.0;
        if (g != 0.0 && rest > 0.0) first = g * py * std::pow(rest, g - 1.0) * logp[y];
        const double dl_dpy_times_py = first - mod;
        for (size_t c = 0; c < n; ++c) {
          (*du)[c] = dl_dpy_times_py * ((c == y ? 1.0 : 0.0) - p[c]);
        }
      }
      break;
    }
  }
  return value;
}

// Entropy of softmax(u) and its derivative with respect to u.
double entropy_term(const std::vector<double>& logp, std::vector<double>* du) {
  const size_t n = logp.size();
  double h = 0.0;
  for (size_t c = 0; c < n; ++c) h -= std::exp(logp[c]) * logp[c];
  if (du) {
    du->resize(n);
    for (size_t c = 0; c < n; ++c) (*du)[c] = -std::exp(logp[c]) * (logp[c] + h);
  }
  return h;
}

double entropy_coefficient(const LossConfig& cfg) {
  return cfg.penalize_invalid_entropy ? cfg.entropy_weight : -cfg.entropy_weight;
}

void check_label(const ToyModelParams& params, int label) {
  if (label < 0 || static_cast<size_t>(label) >= params.n_classes) {
    throw DataError("label index " + std::to_string(label) + " out of range for the model");
  }
}

// Accumulates scale * dL/du for one example into the gradients.
void backprop(const ToyModelParams& params, const EncodedExample& ex, const std::vector<double>& h,
              const std::vector<double>& du, double scale, Gradients& g) {
  const double inv_t = 1.0 / params.temperature;
  std::vector<double> dz(params.n_classes);
  for (size_t c = 0; c < params.n_classes; ++c) dz[c] = scale * du[c] * inv_t;
  for (size_t c = 0; c < params.n_classes; ++c) g.bias[c] += dz[c];
  std::vector<double> dh(params.features(), 0.0);
  for (size_t f = 0; f < params.features(); ++f) {
    for (size_t c = 0; c < params.n_classes; ++c) {
      g.head[f * params.n_classes + c] += h[f] * dz[c];
      dh[f] += params.w(f, c) * dz[c];
    }
  }
  for (size_t s = 0; s < ex.sides.size(); ++s) {
    const Bag& bag = ex.sides[s];
    const double inv_len = 1.0 / static_cast<double>(bag.length);
    for (const auto& [row, count] : bag.counts) {
      double* dst = g.embedding.data() + static_cast<size_t>(row) * params.dim;
      const double k = static_cast<double>(count) * inv_len;
      for (size_t j = 0; j < params.dim; ++j) dst[j] += k * dh[s * params.dim + j];
    }
  }
}

}  // namespace

double loss(const ToyModelParams& params, const Batch& batch, const LossConfig& cfg) {
  cfg.validate();
  if (batch.clean.size() != batch.labels.size()) throw ConfigError("batch labels misaligned");
  double total = 0.0;
  if (!batch.clean.empty()) {
    double sum = 0.0;
    for (size_t i = 0; i < batch.clean.size(); ++i) {
      check_label(params, batch.labels[i]);
      const auto logp = log_softmax(logits(params, *batch.clean[i]), params.temperature);
      sum += supervised_term(logp, batch.labels[i], cfg, nullptr);
    }
    total += sum / static_cast<double>(batch.clean.size());
  }
  if (cfg.kind == LossKind::kEntropic && !batch.invalid.empty()) {
    double sum = 0.0;
    for (const auto* ex : batch.invalid) {
      sum += entropy_term(log_softmax(logits(params, *ex), params.temperature), nullptr);
    }
    total += entropy_coefficient(cfg) * sum / static_cast<double>(batch.invalid.size());
  }
  return total;
}

Gradients grad(const ToyModelParams& params, const Batch& batch, const LossConfig& cfg) {
  cfg.validate();
  if (batch.clean.size() != batch.labels.size()) throw ConfigError("batch labels misaligned");
  Gradients g;
  g.embedding.assign(params.embedding.size(), 0.0);
  g.head.assign(params.head.size(), 0.0);
  g.bias.assign(params.bias.size(), 0.0);
  std::vector<double> du;

  if (!batch.clean.empty()) {
    const double scale = 1.0 / static_cast<double>(batch.clean.size());
    for (size_t i = 0; i < batch.clean.size(); ++i) {
      check_label(params, batch.labels[i]);
      const auto h = pooled(params, *batch.clean[i]);
      const auto logp = log_softmax(logits_from_pooled(params, h), params.temperature);
      g.loss += scale * supervised_term(logp, batch.labels[i], cfg, &du);
      backprop(params, *batch.clean[i], h, du, scale, g);
    }
  }
  if (cfg.kind == LossKind::kEntropic && !batch.invalid.empty()) {
    const double coef = entropy_coefficient(cfg);
    const double scale = coef / static_cast<double>(batch.invalid.size());
    for (const auto* ex : batch.invalid) {
      const auto h = pooled(params, *ex);
      const auto logp = log_softmax(logits_from_pooled(params, h), params.temperature);
      g.loss += scale * entropy_term(logp, &du);
      backprop(params, *ex, h, du, scale, g);
    }
  }
  return g;
}

std::vector<std::vector<double>> input_gradients(const ToyModelParams& params, const Example& ex,
                                                 Side side, int loss_label) {
  check_label(params, loss_label);
  const size_t s = side == Side::kA ? 0 : 1;
  if (s >= params.sides) throw UnsupportedTransformError("toy model has no text_b input");
  const EncodedExample enc = encode(params, ex);
  const auto logp = log_softmax(logits(params, enc), params.temperature);
  std::vector<double> du;
  LossConfig ce;
  supervised_term(logp, loss_label, ce, &du);

  // dL/dh for this side, then dh/dt_i = 1/n for every occurrence.
  const double inv_t = 1.0 / params.temperature;
  const double inv_len = 1.0 / static_cast<double>(enc.sides[s].length);
  std::vector<double> g(params.dim, 0.0);
  for (size_t j = 0; j < params.dim; ++j) {
    double acc = 0.0;
    for (size_t c = 0; c < params.n_classes; ++c) acc += params.w(s * params.dim + j, c) * du[c];
    g[j] = acc * inv_t * inv_len;
  }
  const TokenSeq tokens = tokenize(ex.input.side(side));
  return std::vector<std::vector<double>>(tokens.size(), g);
}

SaliencyScores saliency(const ToyModelParams& params, const Example& ex, Side side,
                        int loss_label) {
  const auto grads = input_gradients(params, ex, side, loss_label);
  const TokenSeq tokens = tokenize(ex.input.side(side));
  SaliencyScores out;
  out.loss_label = loss_label;
  out.scores.resize(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    const auto row = static_cast<size_t>(params.vocab.lookup(tokens[i]));
    double dot = 0.0;
    for (size_t j = 0; j < params.dim; ++j) dot += params.emb(row, j) * grads[i][j];
    out.scores[i] = dot;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  if (!(init_scale >= 0.0)) throw ConfigError("init scale must be >= 0");
}

ToyModelParams train(const Dataset& ds, const LossConfig& loss_cfg, const TrainConfig& train_cfg,
                     const ToyModelParams* warm_start, const std::vector<Example>* invalid) {
  loss_cfg.validate();
  train_cfg.validate();
  if (ds.empty()) throw DataError("cannot train on an empty dataset");
  const size_t sides = ds.task_kind == TaskKind::kPair ? 2 : 1;
  const auto n_classes = static_cast<size_t>(ds.labels.n_classes());

  ToyModelParams params;
  if (warm_start) {
    params = *warm_start;
    if (params.sides != sides || params.n_classes != n_classes) {
      throw ConfigError("warm-start model does not match the dataset's task shape or label count");
    }
  } else {
    params = init_params(Vocabulary::from_dataset(ds), train_cfg.dim, sides, n_classes,
                         train_cfg.init_scale, train_cfg.seed);
  }
  if (train_cfg.epochs == 0) return params;

  std::vector<EncodedExample> clean;
  std::vector<int> labels;
  for (const auto& ex : ds.examples) {
    if (!ex.gold_label) continue;
    clean.push_back(encode(params, ex));
    labels.push_back(*ex.gold_label);
  }
  if (clean.empty()) throw DataError("no labelled examples to train on");
  std::vector<EncodedExample> bad;
  if (loss_cfg.kind == LossKind::kEntropic && invalid && loss_cfg.entropy_weight > 0.0) {
    for (const auto& ex : *invalid) bad.push_back(encode(params, ex));
  }

  const size_t batch = static_cast<size_t>(train_cfg.batch_size);
  const size_t steps_per_epoch = (clean.size() + batch - 1) / batch;
  const size_t bad_per_step = bad.empty() ? 0 : (bad.size() + steps_per_epoch - 1) / steps_per_epoch;

  Rng rng(derive_seed(train_cfg.seed, "train"));
  std::vector<size_t> order(clean.size());
  std::vector<size_t> bad_order(bad.size());
  size_t step = 0;
  for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    rng.shuffle(order);
    std::iota(bad_order.begin(), bad_order.end(), size_t{0});
    rng.shuffle(bad_order);
    for (size_t k = 0; k < steps_per_epoch; ++k) {
      Batch b;
      for (size_t i = k * batch; i < std::min(clean.size(), (k + 1) * batch); ++i) {
        b.clean.push_back(&clean[order[i]]);
        b.labels.push_back(labels[order[i]]);
      }
      for (size_t i = k * bad_per_step; i < std::min(bad.size(), (k + 1) * bad_per_step); ++i) {
        b.invalid.push_back(&bad[bad_order[i]]);
      }
      const Gradients g = grad(params, b, loss_cfg);
      ++step;
      if (!std::isfinite(g.loss)) {
        throw TrainingError("training diverged: non-finite loss at step " + std::to_string(step) +
                            " (epoch " + std::to_string(epoch + 1) + ")");
      }
      const double lr = train_cfg.learning_rate;
      for (size_t i = 0; i < params.embedding.size(); ++i) params.embedding[i] -= lr * g.embedding[i];
      for (size_t i = 0; i < params.head.size(); ++i) params.head[i] -= lr * g.head[i];
      for (size_t i = 0; i < params.bias.size(); ++i) params.bias[i] -= lr * g.bias[i];
    }
  }
  params.validate();
  return params;
}

// ---------------------------------------------------------------------------
// Temperature scaling

double nll(const ToyModelParams& params, const Dataset& calibration, double temperature) {
  double sum = 0.0;
  size_t n = 0;
  for (const auto& ex : calibration.examples) {
    if (!ex.gold_label) continue;
    const auto logp = log_softmax(logits(params, encode(params, ex)), temperature);
    sum -= logp[static_cast<size_t>(*ex.gold_label)];
    ++n;
  }
  if (n == 0) throw ConfigError("calibration set has no labelled examples");
  return sum / static_cast<double>(n);
}

double fit_temperature(const ToyModelParams& params, const Dataset& calibration) {
  std::vector<std::vector<double>> zs;
  std::vector<size_t> ys;
  for (const auto& ex : calibration.examples) {
    if (!ex.gold_label) continue;
    zs.push_back(logits(params, encode(params, ex)));
    ys.push_back(static_cast<size_t>(*ex.gold_label));
  }
  if (zs.empty()) throw ConfigError("calibration set has no labelled examples");

  double best_t = 1.0;
  double best = INFINITY;
  // Log-spaced grid over [0.05, 20] that contains T = 1 exactly.
  for (int k = -260; k <= 260; ++k) {
    const double t = std::pow(10.0, k / 200.0);
    double sum = 0.0;
    for (size_t k = 0; k < zs.size(); ++k) sum -= log_softmax(zs[k], t)[ys[k]];
    const double value = sum / static_cast<double>(zs.size());
    if (value < best) {
      best = value;
      best_t = t;
    }
  }
  return best_t;
}

// ---------------------------------------------------------------------------
// Persistence: "SALADTOY" magic, u32 version, u64 V, d, N, sides, f64 T,
// vocabulary (u32 length + bytes each), then embedding, head and bias as
// row-major little-endian f64.

namespace {

constexpr char kMagic[8] = {'S', 'A', 'L', 'A', 'D', 'T', 'O', 'Y'};
constexpr uint32_t kFormatVersion = 1;

void put_u64(std::ostream& out, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_u32(std::ostream& out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double x) {
  uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  put_u64(out, bits);
}

uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DataError("truncated model file");
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("truncated model file");
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) {
  const uint64_t bits = get_u64(in);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace

void save_params(const std::string& path, const ToyModelParams& params) {
  params.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model '" + path + "'");
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_u64(out, params.vocab.size());
  put_u64(out, params.dim);
  put_u64(out, params.n_classes);
  put_u64(out, params.sides);
  put_f64(out, params.temperature);
  for (const auto& t : params.vocab.tokens()) {
    put_u32(out, static_cast<uint32_t>(t.size()));
    out.write(t.data(), static_cast<std::streamsize>(t.size()));
  }
  for (double x : params.embedding) put_f64(out, x);
  for (double x : params.head) put_f64(out, x);
  for (double x : params.bias) put_f64(out, x);
  if (!out) throw DataError("write failed for model '" + path + "'");
}

ToyModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("'" + path + "' is not a toy model file");
  }
  if (get_u32(in) != kFormatVersion) throw DataError("unsupported model file version");
  const uint64_t v = get_u64(in);
  ToyModelParams p;
  p.dim = get_u64(in);
  p.n_classes = get_u64(in);
  p.sides = get_u64(in);
  p.temperature = get_f64(in);
  if (v == 0 || v > (1u << 26) || p.dim == 0 || p.dim > 4096 || p.n_classes > 4096) {
    throw DataError("model file header out of range");
  }
  std::vector<std::string> tokens;
  tokens.reserve(v);
  for (uint64_t i = 0; i < v; ++i) {
    const uint32_t len = get_u32(in);
    std::string t(len, '\0');
    if (!in.read(t.data(), len)) throw DataError("truncated model file");
    tokens.push_back(std::move(t));
  }
  p.vocab = Vocabulary(std::move(tokens));
  p.embedding.resize(v * p.dim);
  for (double& x : p.embedding) x = get_f64(in);
  p.head.resize(p.features() * p.n_classes);
  for (double& x : p.head) x = get_f64(in);
  p.bias.resize(p.n_classes);
  for (double& x : p.bias) x = get_f64(in);
  p.validate();
  return p;
}

}  // namespace saladbench

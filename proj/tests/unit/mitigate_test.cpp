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

#include <cmath>
#include <set>

#include "core/errors.hpp"
#include "core/gradient.hpp"
#include "core/mitigate.hpp"
#include "doctest.h"
#include "unit/oracles.hpp"
#include "unit/test_util.hpp"

namespace saladbench {
namespace {

Dataset head(const Dataset& ds, size_t n) {
  Dataset out = ds;
  out.examples.resize(n);
  return out;
}

// Trained model, provider and generators for one bundled corpus.
struct Setup {
  Dataset ds;
  std::shared_ptr<const ToyModelParams> params;
  std::unique_ptr<EmbeddedProvider> provider;
  std::map<int, pbsmt::Generator> generators;
  TransformContext ctx;

  explicit Setup(Dataset data) : ds(std::move(data)) {
    params = std::make_shared<const ToyModelParams>(train(ds, LossConfig{}, TrainConfig{}));
    provider = std::make_unique<EmbeddedProvider>(params);
    for (int l = 0; l < ds.labels.n_classes(); ++l) {
      generators.emplace(l, pbsmt::train_generator(ds, l, pbsmt::TrainOptions{}, pbsmt::DecoderWeights{}));
    }
    ctx.task = ds.task_kind;
    ctx.saliency = provider.get();
    ctx.vocab = corpus_vocabulary(ds);
    ctx.generators = &generators;
  }
};

const Setup& pair_setup() {
  static const Setup s(testing::pair_corpus());
  return s;
}

const Setup& single_setup() {
  static const Setup s(testing::sentiment_corpus());
  return s;
}

TEST_CASE("augment on the pair corpus") {
  const Setup& s = pair_setup();
  const Dataset sub = head(s.ds, 100);
  MitigationConfig cfg;
  cfg.seed = 3;
  const AugmentResult aug = augment(sub, cfg, s.ctx);
  CHECK(aug.sampled_ids.size() == 50);
  CHECK(aug.per_kind.size() == 9);
  size_t total = 0;
  for (const auto& [kind, n] : aug.per_kind) {
    CHECK(n <= 50);
    total += n;
  }
  // Sort, reverse and copysort apply to every example.
  CHECK(aug.per_kind.at(TransformKind::kSort) == 50);
  CHECK(aug.per_kind.at(TransformKind::kReverse) == 50);
  CHECK(aug.per_kind.at(TransformKind::kCopySort) == 50);
  CHECK(aug.dataset.size() == 100 + total);
  MESSAGE("pair augmentation produced " << total << " of 450 possible invalid examples");
  CHECK(total >= 440);
  CHECK(aug.dataset.labels.n_classes() == 4);
  CHECK(aug.invalid.size() == aug.dataset.size());
  CHECK(aug.provenance.size() == aug.dataset.size());

  const std::set<std::string> sampled(aug.sampled_ids.begin(), aug.sampled_ids.end());
  for (size_t i = 0; i < aug.dataset.size(); ++i) {
    const Example& ex = aug.dataset.examples[i];
    if (i < 100) {
      CHECK_FALSE(aug.invalid[i]);
      CHECK(ex == sub.examples[i]);
      CHECK(aug.provenance[i].transform.empty());
      continue;
    }
    CHECK(aug.invalid[i]);
    CHECK(ex.gold_label == 3);
    CHECK(sampled.count(aug.provenance[i].source_id) == 1);
    const std::string kind = aug.provenance[i].transform.substr(0, aug.provenance[i].transform.find(':'));
    CHECK(ex.id == aug.provenance[i].source_id + "~" + kind);
  }

  // Same seed, same sample; another seed samples differently.
  CHECK(augment(sub, cfg, s.ctx).sampled_ids == aug.sampled_ids);
  cfg.seed = 4;
  CHECK(augment(sub, cfg, s.ctx).sampled_ids != aug.sampled_ids);
}

TEST_CASE("augment on the single-text corpus uses the seven applicable kinds") {
  const Setup& s = single_setup();
  MitigationConfig cfg;
  cfg.strategy = Strategy::kThreshold;
  const AugmentResult aug = augment(s.ds, cfg, s.ctx);
  CHECK(aug.sampled_ids.size() == 100);
  CHECK(aug.per_kind.size() == 7);
  CHECK(aug.per_kind.count(TransformKind::kCopySort) == 0);
  CHECK(aug.per_kind.count(TransformKind::kCopyOne) == 0);
  CHECK(aug.warnings.empty());
  CHECK(aug.dataset.labels.n_classes() == 2);
  for (size_t i = s.ds.size(); i < aug.dataset.size(); ++i) {
    // Threshold strategies keep the source label.
    const std::string& src = aug.provenance[i].source_id;
    const auto it = std::find_if(s.ds.examples.begin(), s.ds.examples.end(), [&](const Example& e) { return e.id == src; });
    REQUIRE(it != s.ds.examples.end());
    CHECK(aug.dataset.examples[i].gold_label == it->gold_label);
  }
}

TEST_CASE("augment reports unavailable kinds") {
  const Setup& s = pair_setup();
  TransformContext bare = s.ctx;
  bare.generators = nullptr;
  bare.saliency = nullptr;
  MitigationConfig cfg;
  const AugmentResult aug = augment(head(s.ds, 20), cfg, bare);
  CHECK(aug.per_kind.size() == 4);
  CHECK(aug.warnings.size() == 5);
  cfg.transforms = {TransformKind::kPbsmt};
  CHECK_THROWS_AS(augment(head(s.ds, 20), cfg, bare), ConfigError);
}

Prediction binary(const std::string& id, double p0) { return make_prediction(id, {p0, 1.0 - p0}, 2); }

TEST_CASE("threshold search matches the exhaustive oracle (property)") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Prediction> clean;
    std::vector<Prediction> invalid;
    std::vector<int> gold;
    for (size_t i = 0, n = 1 + rng.uniform_index(20); i < n; ++i) {
      clean.push_back(binary("c" + std::to_string(i), rng.uniform()));
      gold.push_back(static_cast<int>(rng.uniform_index(2)));
    }
    for (size_t i = 0, n = 1 + rng.uniform_index(20); i < n; ++i) {
      invalid.push_back(binary("i" + std::to_string(i), rng.uniform()));
    }
    MitigationConfig cfg;
    cfg.grid_step = 0.01;
    cfg.accuracy_tolerance = 0.1 * rng.uniform();
    double base = 0.0;
    for (size_t k = 0; k < clean.size(); ++k) base += clean[k].predicted == gold[k];
    base /= static_cast<double>(clean.size());
    const auto got = threshold_search(clean, gold, invalid, base, 2, cfg);
    const auto want = oracle::threshold(clean, gold, invalid, base, 2, cfg.accuracy_tolerance, 0.01);
    CHECK(got.feasible == want.feasible);
    CHECK(got.theta == doctest::Approx(want.theta).epsilon(1e-12));
    CHECK(got.detection == doctest::Approx(want.detection));
    CHECK(got.clean_accuracy == doctest::Approx(want.clean_accuracy));
  }
}

TEST_CASE("threshold search on separable confidences") {
  std::vector<Prediction> clean;
  std::vector<int> gold;
  std::vector<Prediction> invalid;
  for (int i = 0; i < 10; ++i) {
    clean.push_back(binary("c" + std::to_string(i), 0.9 + 0.005 * i));
    gold.push_back(0);
    invalid.push_back(binary("i" + std::to_string(i), 0.5005 + 0.01 * i));
  }
  MitigationConfig cfg;
  const auto r = threshold_search(clean, gold, invalid, 1.0, 2, cfg);
  CHECK(r.feasible);
  CHECK(r.detection == 1.0);
  CHECK(r.clean_accuracy == 1.0);
  // The first grid point strictly above the largest invalid confidence, 0.5905.
  CHECK(r.theta == doctest::Approx(0.591).epsilon(1e-9));
}

TEST_CASE("evaluate_mitigation with degenerate detectors") {
  const std::vector<Prediction> clean = {binary("a", 0.9), binary("b", 0.8), binary("c", 0.3)};
  const std::vector<int> gold = {0, 0, 0};
  const std::map<TransformKind, std::vector<Prediction>> invalid = {
      {TransformKind::kSort, {binary("a", 0.6), binary("b", 0.7), binary("c", 0.95)}},
      {TransformKind::kDrop, {binary("a", 0.55)}}};

  DetectionRule never{Strategy::kThreshold, 0.0, 0};
  auto r = evaluate_mitigation(never, clean, gold, invalid);
  CHECK(r.clean_accuracy == doctest::Approx(200.0 / 3.0));
  CHECK(r.invalid_detected == 0.0);
  CHECK(r.n_invalid == 2);  // one per kind

  DetectionRule always{Strategy::kThreshold, 1.01, 0};
  r = evaluate_mitigation(always, clean, gold, invalid);
  CHECK(r.clean_accuracy == 0.0);
  CHECK(r.invalid_detected == 100.0);
  CHECK(r.per_transform.at("sort") == 100.0);
  CHECK(r.per_transform_n.at("sort") == 3);

  DetectionRule mid{Strategy::kThreshold, 0.75, 0};
  r = evaluate_mitigation(mid, clean, gold, invalid);
  CHECK(r.per_transform.at("sort") == doctest::Approx(200.0 / 3.0));
  CHECK(r.invalid_detected == 100.0);  // first of sort and the drop example

  DetectionRule cls{Strategy::kInvalidClass, 0.0, 1};
  r = evaluate_mitigation(cls, clean, gold, invalid);
  CHECK(r.clean_accuracy == doctest::Approx(200.0 / 3.0));
  CHECK(r.invalid_detected == 0.0);
  CHECK_FALSE(r.theta.has_value());
  CHECK(mitigation_report_to_json(r).find("\"strategy\": \"invalid_class\"") != std::string::npos);
}

TEST_CASE("invalid class training adds one output") {
  const Setup& s = single_setup();
  MitigationConfig cfg;
  cfg.transforms = {TransformKind::kSort, TransformKind::kReplace};
  const AugmentResult aug = augment(s.ds, cfg, s.ctx);
  TrainConfig tc;
  tc.epochs = 5;
  const ToyModelParams p = train_invalid_class(aug.dataset, tc, s.params.get());
  CHECK(p.n_classes == 3);
  CHECK(p.vocab.tokens() == s.params->vocab.tokens());
}

TEST_CASE("transfer matrix is square over available kinds") {
  const Setup& s = pair_setup();
  const auto [tr, ev] = split_holdout(s.ds, 0.3, 1);
  const std::vector<TransformKind> kinds = {TransformKind::kSort, TransformKind::kDrop, TransformKind::kPbsmt};
  std::map<TransformKind, std::vector<Example>> eval_invalid;
  for (TransformKind k : kinds) {
    TransformSpec spec;
    spec.kind = k;
    for (auto& t : run_transform(ev.examples, spec, s.ctx).examples) eval_invalid[k].push_back(t.example);
  }
  TransformContext no_gen = s.ctx;
  no_gen.generators = nullptr;
  TrainConfig tc;
  tc.epochs = 2;
  const TransferMatrix m = transfer_matrix(tr, kinds, eval_invalid, no_gen, *s.params, MitigationConfig{}, tc);
  CHECK(m.kinds == std::vector<TransformKind>{TransformKind::kSort, TransformKind::kDrop});
  REQUIRE(m.detection.size() == 2);
  for (const auto& row : m.detection) {
    REQUIRE(row.size() == 2);
    for (double v : row) CHECK((v >= 0.0 && v <= 100.0));
  }
  const std::string csv = transfer_matrix_to_csv(m);
  CHECK(csv.rfind("train\\eval,sort,drop\n", 0) == 0);
}

TEST_CASE("training on shuffled text matches training on clean text exactly") {
  const Setup& s = single_setup();
  const auto [tr, val] = split_holdout(s.ds, 0.3, 2);
  TransformSpec spec;
  spec.kind = TransformKind::kShuffle;
  spec.seed = 9;
  const auto r = train_on_invalid_experiment(tr, val, spec, s.ctx, TrainConfig{});
  CHECK(r.transformed + r.kept_original == tr.size());
  CHECK(r.transformed > 0);
  CHECK(r.transformed_trained_accuracy == r.clean_trained_accuracy);
}

TEST_CASE("mitigation config validation") {
  MitigationConfig cfg;
  cfg.augment_fraction = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = MitigationConfig{};
  cfg.grid_step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(parse_strategy("entropic_threshold") == Strategy::kEntropicThreshold);
  CHECK_THROWS_AS(parse_strategy("magic"), ConfigError);
}

}  // namespace
}  // namespace saladbench

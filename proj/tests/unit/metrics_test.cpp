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

#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "doctest.h"
#include "unit/test_util.hpp"

namespace saladbench {
namespace {

Prediction binary(const std::string& id, double p0) { return make_prediction(id, {p0, 1.0 - p0}, 2); }

TEST_CASE("agreement and confidence on a small list") {
  const std::vector<Prediction> orig = {binary("a", 0.9), binary("b", 0.2), binary("c", 0.6), binary("d", 0.3)};
  const std::vector<Prediction> trans = {binary("a", 0.7), binary("b", 0.6), binary("c", 0.4), binary("d", 0.1)};
  CHECK(agreement(orig, trans) == doctest::Approx(50.0));
  CHECK(mean_confidence(trans) == doctest::Approx(100.0 * (0.7 + 0.6 + 0.6 + 0.9) / 4.0));
  CHECK(default_agreement(trans, 0) == doctest::Approx(50.0));
  CHECK(default_agreement(trans, 1) == doctest::Approx(50.0));
  CHECK_THROWS_AS(default_agreement(trans, std::nullopt), ConfigError);

  std::vector<Prediction> shifted = trans;
  shifted[1].id = "x";
  CHECK_THROWS_AS(agreement(orig, shifted), DataError);
  CHECK_THROWS_AS(agreement(orig, std::span(trans).first(3)), DataError);
  CHECK_THROWS_AS(agreement({}, {}), DataError);
}

TEST_CASE("metrics match counting oracles (property)") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 1 + rng.uniform_index(40);
    const int classes = 2 + static_cast<int>(rng.uniform_index(3));
    std::vector<Prediction> a;
    std::vector<Prediction> b;
    std::vector<int> gold;
    for (size_t i = 0; i < n; ++i) {
      auto draw = [&] {
        std::vector<double> p(static_cast<size_t>(classes));
        double s = 0.0;
        for (double& v : p) s += (v = rng.uniform() + 1e-3);
        for (double& v : p) v /= s;
        return make_prediction("e" + std::to_string(i), p, classes);
      };
      a.push_back(draw());
      b.push_back(draw());
      gold.push_back(static_cast<int>(rng.uniform_index(static_cast<uint64_t>(classes))));
    }
    size_t same = 0;
    size_t hits = 0;
    double conf = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const auto& p = b[i].probs;
      const int arg = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
      CHECK(arg == b[i].predicted);
      same += a[i].predicted == arg;
      hits += arg == gold[i];
      conf += p[static_cast<size_t>(arg)];
    }
    const double dn = static_cast<double>(n);
    CHECK(agreement(a, b) == doctest::Approx(100.0 * static_cast<double>(same) / dn));
    CHECK(accuracy(b, gold) == doctest::Approx(100.0 * static_cast<double>(hits) / dn));
    CHECK(mean_confidence(b) == doctest::Approx(100.0 * conf / dn));
    CHECK(agreement(b, b) == 100.0);
    const double e = ece(b, gold, 10);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
  }
}

TEST_CASE("ece by hand") {
  // Bin (0.5, 0.6]: accuracy 1/2 against confidence 0.55. Bin (0.9, 1.0]:
  // accuracy 1 against 0.95. Each holds half the mass.
  const std::vector<Prediction> preds = {binary("a", 0.55), binary("b", 0.55), binary("c", 0.95), binary("d", 0.95)};
  const std::vector<int> gold = {0, 1, 0, 0};
  CHECK(ece(preds, gold, 10) == doctest::Approx(0.05).epsilon(1e-12));
  // One bin: |3/4 - 0.75|.
  CHECK(ece(preds, gold, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(ece(preds, gold, 0), ConfigError);
}

TEST_CASE("ece is zero under perfect calibration") {
  std::vector<Prediction> preds;
  std::vector<int> gold;
  // Confidence 0.8 with four of five correct, and 0.6 with three of five.
  for (int i = 0; i < 5; ++i) {
    preds.push_back(binary("h" + std::to_string(i), 0.8));
    gold.push_back(i < 4 ? 0 : 1);
    preds.push_back(binary("m" + std::to_string(i), 0.6));
    gold.push_back(i < 3 ? 0 : 1);
  }
  CHECK(ece(preds, gold, 10) == doctest::Approx(0.0).epsilon(1e-12));
}

ReportMeta meta() {
  ReportMeta m;
  m.provider = "embedded:model.bin";
  m.task = "pair";
  m.labels = {"entailment", "neutral", "contradiction"};
  m.dataset_checksum = "abc";
  m.seed = 7;
  m.config_hash = "00ff";
  m.clean_accuracy = 91.5;
  return m;
}

std::vector<MetricsRow> rows() {
  std::vector<MetricsRow> out;
  auto row = [](std::string kind, double agr, double conf) {
    MetricsRow r;
    r.transform = std::move(kind);
    r.agreement = agr;
    r.confidence = conf;
    r.n = 10;
    return r;
  };
  out.push_back(row("sort", 80, 70));
  out.push_back(row("reverse", 60, 65));
  MetricsRow sh = row("shuffle", 70, 68);
  sh.seeds = {0, 1};
  sh.seed_agreement = {60, 80};
  sh.seed_confidence = {66, 70};
  out.push_back(sh);
  MetricsRow cs = row("copysort", 40, 90);
  cs.default_label_metric = true;
  out.push_back(cs);
  out.push_back(row("drop", 50, 60));
  MetricsRow co = row("copyone", 0, 0);
  co.applicable = false;
  co.note = "no default label";
  out.push_back(co);
  out.push_back(row("pbsmt", 30, 55));
  return out;
}

TEST_CASE("report family averages skip inapplicable rows") {
  const auto r = build_report(rows(), meta());
  REQUIRE(r.lexical);
  CHECK(r.lexical->rows == 4);
  CHECK(r.lexical->agreement == doctest::Approx((80 + 60 + 70 + 40) / 4.0));
  REQUIRE(r.gradient);
  CHECK(r.gradient->rows == 1);
  CHECK(r.gradient->agreement == doctest::Approx(50.0));
  CHECK(r.random_baseline == doctest::Approx(100.0 / 3.0));
  CHECK_THROWS_AS(build_report({}, meta()), ConfigError);
}

TEST_CASE("report serialisations") {
  const auto r = build_report(rows(), meta());
  CHECK(report_from_json(report_to_json(r)) == r);
  const std::string md = report_to_markdown(r);
  CHECK(md.find("| copyone | -- | -- | -- |") != std::string::npos);
  CHECK(md.find("| copysort* | 40.00 | 90.00 | 10 |") != std::string::npos);
  CHECK(md.find("| Random | 33.33 | 33.33 | |") != std::string::npos);
  const std::string csv = report_to_csv(r);
  CHECK(csv.find("copyone,false,,,,0") != std::string::npos);
  CHECK(csv.find("copysort,true,default_label,40.00,90.00,10") != std::string::npos);
  CHECK_THROWS_AS(report_from_json("{\"rows\": 3}"), DataError);
}

}  // namespace
}  // namespace saladbench

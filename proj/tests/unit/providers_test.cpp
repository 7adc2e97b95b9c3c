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

#include <thread>

#include "core/errors.hpp"
#include "core/providers.hpp"
#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "unit/test_util.hpp"

namespace saladbench {
namespace {

using nlohmann::json;

TEST_CASE("make_prediction validates and breaks ties low") {
  const auto p = make_prediction("x", {0.4, 0.4, 0.2}, 3);
  CHECK(p.predicted == 0);
  CHECK(p.confidence == 0.4);
  CHECK(make_prediction("x", {0.2, 0.4, 0.4}, 3).predicted == 1);

  const auto r = make_prediction("x", {0.5, 0.5005}, 2);
  CHECK(r.probs[0] + r.probs[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.predicted == 1);

  CHECK_THROWS_AS(make_prediction("x", {0.5, 0.5}, 3), ProviderError);
  CHECK_THROWS_AS(make_prediction("x", {0.7, 0.7}, 2), ProviderError);
  CHECK_THROWS_AS(make_prediction("x", {1.1, -0.1}, 2), ProviderError);
  CHECK_THROWS_AS(make_prediction("x", {NAN, 1.0}, 2), ProviderError);
}

TEST_CASE("replay provider resolves records by id and text") {
  testing::ScratchDir dir("replay");
  const std::string preds = dir.file("p.jsonl");
  testing::write_file(preds,
                      "{\"id\": \"a\", \"probs\": [0.9, 0.1]}\n"
                      "{\"id\": \"b\", \"text_a\": \"good film\", \"probs\": [0.2, 0.8]}\n"
                      "{\"id\": \"b\", \"text_a\": \"film good\", \"probs\": [0.6, 0.4]}\n"
                      "\n");
  const std::string sal = dir.file("s.jsonl");
  testing::write_file(sal, "{\"id\": \"a\", \"loss_label\": 0, \"scores\": [0.5, -1.0]}\n");
  const ReplayProvider rp(preds, 2, sal);
  CHECK(rp.descriptor().supports_saliency);

  const std::vector<Example> inputs = {{"a", {"x y", std::nullopt}, 0},
                                       {"b", {"film good", std::nullopt}, 1},
                                       {"b", {"good film", std::nullopt}, 1}};
  const auto out = rp.predict_batch(inputs);
  CHECK(out[0].predicted == 0);
  CHECK(out[1].probs == std::vector<double>{0.6, 0.4});
  CHECK(out[2].probs == std::vector<double>{0.2, 0.8});

  const std::vector<Example> missing = {{"c", {"x", std::nullopt}, 0}};
  CHECK_THROWS_AS(rp.predict_batch(missing), ProviderError);
  const std::vector<Example> unmatched = {{"b", {"other", std::nullopt}, 0}};
  CHECK_THROWS_AS(rp.predict_batch(unmatched), ProviderError);

  const std::vector<int> labels = {0};
  const auto s = rp.saliency_batch(std::span(inputs).first(1), labels, Side::kA);
  CHECK(s[0].scores == std::vector<double>{0.5, -1.0});
  const std::vector<Example> wrong_len = {{"a", {"x y z", std::nullopt}, 0}};
  CHECK_THROWS_AS(rp.saliency_batch(wrong_len, labels, Side::kA), ProviderError);

  const ReplayProvider bare(preds, 2);
  CHECK_THROWS_AS(bare.saliency_batch(std::span(inputs).first(1), labels, Side::kA), ProviderError);

  testing::write_file(dir.file("bad.jsonl"), "{\"id\": 3}\n");
  CHECK_THROWS_AS(ReplayProvider(dir.file("bad.jsonl"), 2), DataError);
  CHECK_THROWS_AS(ReplayProvider(dir.file("none.jsonl"), 2), DataError);
}

TEST_CASE("replay of written predictions reproduces the embedded provider") {
  testing::ScratchDir dir("replay");
  const Dataset ds = testing::sentiment_corpus();
  auto params = std::make_shared<const ToyModelParams>(train(ds, LossConfig{}, TrainConfig{}));
  const EmbeddedProvider ep(params);
  const auto preds = ep.predict_batch(ds.examples);
  write_predictions(dir.file("p.jsonl"), preds);
  std::vector<int> labels;
  std::vector<std::string> ids;
  for (const auto& ex : ds.examples) {
    labels.push_back(*ex.gold_label);
    ids.push_back(ex.id);
  }
  const auto sal = ep.saliency_batch(ds.examples, labels, Side::kA);
  write_saliency(dir.file("s.jsonl"), ids, sal);

  const ReplayProvider rp(dir.file("p.jsonl"), 2, dir.file("s.jsonl"));
  const auto back = rp.predict_batch(ds.examples);
  const auto back_sal = rp.saliency_batch(ds.examples, labels, Side::kA);
  for (size_t i = 0; i < preds.size(); ++i) {
    CHECK(back[i].predicted == preds[i].predicted);
    for (size_t c = 0; c < 2; ++c) CHECK(back[i].probs[c] == doctest::Approx(preds[i].probs[c]).epsilon(1e-12));
    REQUIRE(back_sal[i].scores.size() == sal[i].scores.size());
    for (size_t k = 0; k < sal[i].scores.size(); ++k) {
      CHECK(back_sal[i].scores[k] == doctest::Approx(sal[i].scores[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("embedded provider is deterministic and matches forward") {
  const Dataset ds = testing::pair_corpus();
  auto params = std::make_shared<const ToyModelParams>(train(ds, LossConfig{}, TrainConfig{}));
  const EmbeddedProvider ep(params, "model.bin");
  CHECK(ep.descriptor().supports_saliency);
  CHECK(ep.n_classes() == 3);
  const auto a = ep.predict_batch(ds.examples);
  const auto b = ep.predict_batch(ds.examples);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].probs == b[i].probs);
    const auto f = forward(*params, ds.examples[i]);
    for (size_t c = 0; c < 3; ++c) CHECK(a[i].probs[c] == doctest::Approx(f[c]).epsilon(1e-15));
  }
}

// Serves the embedded model over the JSON protocol on a loopback port.
class ModelServer {
 public:
  ModelServer(std::shared_ptr<const ToyModelParams> params, std::function<void(json&)> tamper = nullptr)
      : provider_(std::move(params)), tamper_(std::move(tamper)) {
    server_.Post("/v1/predict", [this](const httplib::Request& req, httplib::Response& res) {
      const json body = json::parse(req.body);
      std::vector<Example> inputs;
      for (const auto& item : body.at("inputs")) {
        Example ex;
        ex.id = item.at("id").get<std::string>();
        ex.input.text_a = item.at("text_a").get<std::string>();
        if (!item.at("text_b").is_null()) ex.input.text_b = item.at("text_b").get<std::string>();
        inputs.push_back(ex);
      }
      json out;
      out["probs"] = json::array();
      for (const auto& p : provider_.predict_batch(inputs)) out["probs"].push_back(p.probs);
      if (body.at("want_saliency").get<bool>()) {
        const auto labels = body.at("loss_labels").get<std::vector<int>>();
        const Side side = body.at("saliency_side") == "a" ? Side::kA : Side::kB;
        out["saliency"] = json::array();
        for (const auto& s : provider_.saliency_batch(inputs, labels, side)) out["saliency"].push_back(s.scores);
      }
      ++requests_;
      if (tamper_) tamper_(out);
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ModelServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_; }

 private:
  EmbeddedProvider provider_;
  std::function<void(json&)> tamper_;
  httplib::Server server_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::thread thread_;
};

TEST_CASE("http provider round-trips through a local server") {
  const Dataset ds = testing::pair_corpus();
  auto params = std::make_shared<const ToyModelParams>(train(ds, LossConfig{}, TrainConfig{}));
  const EmbeddedProvider ep(params);
  ModelServer server(params);
  HttpOptions opts;
  opts.batch_size = 16;
  opts.max_in_flight = 3;
  const HttpProvider hp(server.url(), 3, true, opts);

  const std::vector<Example> inputs(ds.examples.begin(), ds.examples.begin() + 50);
  const auto remote = hp.predict_batch(inputs);
  const auto local = ep.predict_batch(inputs);
  REQUIRE(remote.size() == local.size());
  for (size_t i = 0; i < local.size(); ++i) {
    CHECK(remote[i].id == inputs[i].id);
    CHECK(remote[i].predicted == local[i].predicted);
    for (size_t c = 0; c < 3; ++c) CHECK(remote[i].probs[c] == doctest::Approx(local[i].probs[c]).epsilon(1e-12));
  }
  CHECK(server.requests() == 4);

  std::vector<int> labels;
  for (const auto& ex : inputs) labels.push_back(*ex.gold_label);
  const auto rs = hp.saliency_batch(inputs, labels, Side::kB);
  const auto ls = ep.saliency_batch(inputs, labels, Side::kB);
  for (size_t i = 0; i < ls.size(); ++i) {
    REQUIRE(rs[i].scores.size() == ls[i].scores.size());
    for (size_t k = 0; k < ls[i].scores.size(); ++k) {
      CHECK(rs[i].scores[k] == doctest::Approx(ls[i].scores[k]).epsilon(1e-12));
    }
  }

  const HttpProvider no_sal(server.url(), 3, false, opts);
  CHECK_THROWS_AS(no_sal.saliency_batch(inputs, labels, Side::kB), ProviderError);
}

TEST_CASE("http provider reports contract violations and transport failures") {
  const Dataset ds = testing::pair_corpus();
  auto params = std::make_shared<const ToyModelParams>(train(ds, LossConfig{}, TrainConfig{}));
  const std::vector<Example> inputs(ds.examples.begin(), ds.examples.begin() + 4);

  ModelServer short_server(params, [](json& out) { out["probs"].erase(0); });
  CHECK_THROWS_AS(HttpProvider(short_server.url(), 3, false).predict_batch(inputs), ProviderError);

  ModelServer bad_sum(params, [](json& out) { out["probs"][0] = {0.9, 0.9, 0.9}; });
  CHECK_THROWS_AS(HttpProvider(bad_sum.url(), 3, false).predict_batch(inputs), ProviderError);

  HttpOptions quick;
  quick.timeout_ms = 500;
  CHECK_THROWS_AS(HttpProvider("http://127.0.0.1:1", 3, false, quick).predict_batch(inputs), ProviderError);
  CHECK_THROWS_AS(HttpProvider("ftp://host", 3, false), ConfigError);
}

}  // namespace
}  // namespace saladbench

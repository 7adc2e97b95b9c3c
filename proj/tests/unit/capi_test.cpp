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

#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "saladbench/saladbench.h"
#include "unit/test_util.hpp"

namespace {

using nlohmann::json;
using saladbench::testing::ScratchDir;
using saladbench::testing::source_path;

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  sb_string_free(s);
  return out;
}

TEST_CASE("text utilities through the C API") {
  char* out = nullptr;
  REQUIRE(sb_reorder_text("sort", "Making certain distinctions is imperative in looking back on the past.", 0,
                          &out) == SB_OK);
  CHECK(take(out) == "back certain distinctions imperative in is looking making on past the .");

  REQUIRE(sb_tokenize("Hello, World!", &out) == SB_OK);
  CHECK(take(out) == "hello , world !");

  REQUIRE(sb_reorder_text("shuffle", "a b c", 5, &out) == SB_OK);
  const std::string shuffled = take(out);
  CHECK(shuffled.size() == 5);
  CHECK(shuffled.find("a b") == std::string::npos);
  CHECK(shuffled.find("b c") == std::string::npos);

  CHECK(sb_reorder_text("scramble", "a b", 0, &out) == SB_ERR_CONFIG);
  CHECK(std::string(sb_last_error()).find("scramble") != std::string::npos);
  CHECK(sb_reorder_text("sort", "", 0, &out) == SB_ERR_DATA);
  CHECK(sb_tokenize(nullptr, &out) == SB_ERR_CONFIG);
  CHECK(std::string(sb_version()).size() > 0);
}

TEST_CASE("dataset, model and provider handles") {
  const char* labels[] = {"neg", "pos"};
  sb_dataset* ds = nullptr;
  REQUIRE(sb_dataset_load(source_path("data/toy_sentiment.tsv").c_str(), "tsv", "single", labels, 2, nullptr, &ds) ==
          SB_OK);
  CHECK(sb_dataset_size(ds) == 200);
  char* sum = nullptr;
  REQUIRE(sb_dataset_checksum(ds, &sum) == SB_OK);
  CHECK(take(sum).size() > 0);

  sb_model* model = nullptr;
  REQUIRE(sb_model_train(ds, "{\"epochs\": 5}", 1, &model) == SB_OK);
  CHECK(sb_model_classes(model) == 2);
  double probs[2] = {0, 0};
  REQUIRE(sb_model_predict(model, "a wonderful film", nullptr, probs, 2) == SB_OK);
  CHECK(probs[0] + probs[1] == doctest::Approx(1.0));
  CHECK(sb_model_predict(model, "a film", nullptr, probs, 3) == SB_ERR_CONFIG);

  ScratchDir dir("capi");
  REQUIRE(sb_model_save(model, dir.file("m.bin").c_str()) == SB_OK);
  sb_model* loaded = nullptr;
  REQUIRE(sb_model_load(dir.file("m.bin").c_str(), &loaded) == SB_OK);
  double again[2] = {0, 0};
  REQUIRE(sb_model_predict(loaded, "a wonderful film", nullptr, again, 2) == SB_OK);
  CHECK(again[0] == probs[0]);

  sb_provider* direct = nullptr;
  REQUIRE(sb_provider_from_model(model, &direct) == SB_OK);
  char* jsonl = nullptr;
  REQUIRE(sb_provider_predict(direct, ds, &jsonl) == SB_OK);
  const std::string lines = take(jsonl);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 200);
  saladbench::testing::write_file(dir.file("p.jsonl"), lines);

  sb_provider* replay = nullptr;
  REQUIRE(sb_provider_open("replay", dir.file("p.jsonl").c_str(), 2, nullptr, 0, &replay) == SB_OK);
  REQUIRE(sb_provider_predict(replay, ds, &jsonl) == SB_OK);
  const std::string replayed = take(jsonl);
  CHECK(json::parse(replayed.substr(0, replayed.find('\n')))["id"] ==
        json::parse(lines.substr(0, lines.find('\n')))["id"]);

  sb_provider* embedded = nullptr;
  REQUIRE(sb_provider_open("embedded", dir.file("m.bin").c_str(), 2, nullptr, 1, &embedded) == SB_OK);
  sb_provider* missing = nullptr;
  CHECK(sb_provider_open("embedded", dir.file("nope.bin").c_str(), 2, nullptr, 1, &missing) == SB_ERR_DATA);
  CHECK(missing == nullptr);
  CHECK(sb_provider_open("oracle", "x", 2, nullptr, 0, &missing) == SB_ERR_CONFIG);

  sb_provider_free(embedded);
  sb_provider_free(replay);
  sb_provider_free(direct);
  sb_model_free(loaded);
  sb_model_free(model);
  sb_dataset_free(ds);
  // Freeing NULL is a no-op.
  sb_dataset_free(nullptr);
  sb_model_free(nullptr);
  sb_provider_free(nullptr);
  sb_pbsmt_free(nullptr);
  sb_string_free(nullptr);

  CHECK(sb_dataset_load(dir.file("absent.tsv").c_str(), "tsv", "single", labels, 2, nullptr, &ds) == SB_ERR_DATA);
  CHECK(sb_dataset_load(source_path("data/toy_sentiment.tsv").c_str(), "xml", "single", labels, 2, nullptr, &ds) ==
        SB_ERR_CONFIG);
}

TEST_CASE("pbsmt generators through the C API") {
  const char* labels[] = {"entailment", "neutral", "contradiction"};
  sb_dataset* ds = nullptr;
  REQUIRE(sb_dataset_load(source_path("data/toy_pair.tsv").c_str(), "tsv", "pair", labels, 3, "entailment", &ds) ==
          SB_OK);
  sb_pbsmt* g = nullptr;
  REQUIRE(sb_pbsmt_train(ds, 1, &g) == SB_OK);
  char* out = nullptr;
  REQUIRE(sb_pbsmt_decode(g, "a man is playing a guitar .", &out) == SB_OK);
  const std::string decoded = take(out);
  CHECK_FALSE(decoded.empty());

  ScratchDir dir("capi");
  REQUIRE(sb_pbsmt_save(g, dir.file("g").c_str()) == SB_OK);
  sb_pbsmt* h = nullptr;
  REQUIRE(sb_pbsmt_load(dir.file("g").c_str(), &h) == SB_OK);
  REQUIRE(sb_pbsmt_decode(h, "a man is playing a guitar .", &out) == SB_OK);
  CHECK(take(out) == decoded);
  CHECK(sb_pbsmt_train(ds, 7, &g) == SB_ERR_CONFIG);
  sb_pbsmt_free(h);
  sb_pbsmt_free(g);
  sb_dataset_free(ds);
}

TEST_CASE("run configurations") {
  char* out = nullptr;
  REQUIRE(sb_default_config(&out) == SB_OK);
  const json defaults = json::parse(take(out));
  CHECK(defaults["seed"] == 0);
  CHECK(defaults["transform"]["r"] == 0.5);

  CHECK(sb_resolve_config("{\"bogus\": 1}", &out) == SB_ERR_CONFIG);
  CHECK(sb_resolve_config("{not json", &out) == SB_ERR_CONFIG);
  CHECK(sb_run("{\"command\": \"fly\"}", &out) == SB_ERR_CONFIG);

  ScratchDir dir("capi");
  json cfg;
  cfg["command"] = "transform";
  cfg["seed"] = 3;
  cfg["out"] = dir.file("run");
  cfg["dataset"] = {{"path", source_path("data/toy_sentiment.tsv")}, {"task", "single"}, {"labels", {"neg", "pos"}}};
  cfg["transforms"] = "sort,reverse,shuffle";
  REQUIRE(sb_run(cfg.dump().c_str(), &out) == SB_OK);
  const json summary = json::parse(take(out));
  CHECK(summary["command"] == "transform");
  CHECK(summary["seed"] == 3);
  CHECK(std::filesystem::exists(dir.file("run/config.json")));
  CHECK(std::filesystem::exists(dir.file("run/transforms/sort.tsv")));

  cfg["dataset"]["path"] = dir.file("missing.tsv");
  CHECK(sb_run(cfg.dump().c_str(), &out) == SB_ERR_DATA);
}

TEST_CASE("evaluate through sb_run writes a report") {
  ScratchDir dir("capi");
  json cfg;
  cfg["command"] = "evaluate";
  cfg["out"] = dir.file("eval");
  cfg["dataset"] = {{"path", source_path("data/toy_pair.tsv")},
                    {"task", "pair"},
                    {"labels", {"entailment", "neutral", "contradiction"}},
                    {"default_label", "entailment"}};
  cfg["transforms"] = "sort,copysort,drop";
  char* out = nullptr;
  REQUIRE(sb_run(cfg.dump().c_str(), &out) == SB_OK);
  const json summary = json::parse(take(out));
  const json report = json::parse(saladbench::testing::read_file(dir.file("eval/report.json")));
  CHECK(report["rows"].size() == 3);
  CHECK(report["meta"]["config_hash"] == summary["config_hash"]);
}

}  // namespace

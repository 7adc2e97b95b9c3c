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

#include <set>

#include "core/corpus.hpp"
#include "core/errors.hpp"
#include "doctest.h"
#include "unit/test_util.hpp"

namespace saladbench {
namespace {

using testing::ScratchDir;
using testing::write_file;

std::vector<std::string> surfaces(std::string_view text) { return tokenize(text).surfaces(); }

TEST_CASE("tokenize detaches punctuation and lowercases") {
  CHECK(surfaces("Hello, world.") == std::vector<std::string>{"hello", ",", "world", "."});
  CHECK(surfaces("").empty());
  CHECK(surfaces("   \t ").empty());
  CHECK(surfaces("(Quoted!)") == std::vector<std::string>{"(", "quoted", "!", ")"});
  CHECK(surfaces("won't") == std::vector<std::string>{"won't"});
}

TEST_CASE("tokenize on a long hypothesis") {
  const auto t = surfaces("Making certain distinctions is imperative in looking back on the past.");
  const std::vector<std::string> expected = {"making", "certain", "distinctions", "is", "imperative", "in",
                                             "looking", "back", "on", "the", "past", "."};
  CHECK(t == expected);
}

TEST_CASE("detokenize joins with single spaces") {
  CHECK(detokenize(TokenSeq({"a", "b", "."})) == "a b .");
  CHECK(detokenize(TokenSeq()) == "");
}

TEST_CASE("tokenize and detokenize preserve the token multiset on the bundled corpora") {
  for (const auto& ds : {testing::sentiment_corpus(), testing::pair_corpus()}) {
    for (const auto& ex : ds.examples) {
      for (const std::string* text : {&ex.input.text_a, ex.input.text_b ? &*ex.input.text_b : nullptr}) {
        if (!text) continue;
        const auto once = tokenize(*text);
        CHECK(testing::multiset(tokenize(detokenize(once))) == testing::multiset(once));
      }
    }
  }
}

TEST_CASE("token sequences reject empty or spaced surfaces") {
  CHECK_THROWS_AS(TokenSeq({"a", ""}), DataError);
  CHECK_THROWS_AS(TokenSeq({"a b"}), DataError);
}

TEST_CASE("load_dataset reads TSV rows") {
  ScratchDir dir("corpus");
  const std::string path = dir.file("three.tsv");
  write_file(path, "id\ttext_a\ttext_b\tlabel\nr1\tgood film\t\tpos\nr2\tbad film\t\tneg\nr3\tfine\t\tpos\n");
  const Dataset ds = load_dataset(path, FileFormat::kTsv, LabelSet({"neg", "pos"}), TaskKind::kSingle);
  REQUIRE(ds.size() == 3);
  CHECK(ds.examples[0].id == "r1");
  CHECK(ds.examples[1].gold_label == 0);
  CHECK(ds.examples[2].gold_label == 1);
  CHECK_FALSE(ds.examples[0].input.text_b.has_value());
}

TEST_CASE("pair rows with an empty second text are skipped") {
  ScratchDir dir("corpus");
  const std::string path = dir.file("pairs.tsv");
  write_file(path, "id\ttext_a\ttext_b\tlabel\nq1\thow do i?\twhat is?\tyes\nq2\twhy?\t\tno\n");
  const Dataset ds = load_dataset(path, FileFormat::kTsv, LabelSet({"no", "yes"}), TaskKind::kPair);
  CHECK(ds.size() == 1);
  CHECK(ds.skipped_rows == 1);
}

TEST_CASE("load_dataset errors") {
  ScratchDir dir("corpus");
  const LabelSet labels({"neg", "pos"});
  CHECK_THROWS_AS(load_dataset(dir.file("missing.tsv"), FileFormat::kTsv, labels, TaskKind::kSingle), DataError);

  write_file(dir.file("badlabel.tsv"), "id\ttext_a\ttext_b\tlabel\nr1\tx\t\tmaybe\n");
  CHECK_THROWS_AS(load_dataset(dir.file("badlabel.tsv"), FileFormat::kTsv, labels, TaskKind::kSingle), DataError);

  write_file(dir.file("dup.tsv"), "id\ttext_a\ttext_b\tlabel\nr1\tx\t\tpos\nr1\ty\t\tneg\n");
  CHECK_THROWS_AS(load_dataset(dir.file("dup.tsv"), FileFormat::kTsv, labels, TaskKind::kSingle), DataError);

  write_file(dir.file("header.tsv"), "id\ttext\n");
  CHECK_THROWS_AS(load_dataset(dir.file("header.tsv"), FileFormat::kTsv, labels, TaskKind::kSingle), DataError);

  write_file(dir.file("bad.jsonl"), "{\"id\": \"r1\", \"text_a\": \"x\"\n");
  CHECK_THROWS_AS(load_dataset(dir.file("bad.jsonl"), FileFormat::kJsonl, labels, TaskKind::kSingle), DataError);
}

TEST_CASE("bundled corpora have the documented sizes") {
  const Dataset s = testing::sentiment_corpus();
  CHECK(s.size() == 200);
  CHECK(s.labels.n_classes() == 2);
  const Dataset p = testing::pair_corpus();
  CHECK(p.size() == 300);
  CHECK(p.labels.n_classes() == 3);
  CHECK(p.skipped_rows == 0);
}

TEST_CASE("write_dataset round-trips through both formats") {
  ScratchDir dir("corpus");
  const Dataset p = testing::pair_corpus();
  const std::vector<Example> head(p.examples.begin(), p.examples.begin() + 20);
  for (FileFormat f : {FileFormat::kTsv, FileFormat::kJsonl}) {
    const std::string path = dir.file(f == FileFormat::kTsv ? "out.tsv" : "out.jsonl");
    write_dataset(path, f, head, p.labels);
    const Dataset back = load_dataset(path, f, p.labels, TaskKind::kPair);
    CHECK(back.examples == head);
  }
}

TEST_CASE("split_holdout sizes and determinism") {
  Dataset ds;
  ds.labels = LabelSet({"a", "b"});
  for (int i = 0; i < 100; ++i) ds.examples.push_back({"e" + std::to_string(i), {"text", std::nullopt}, i % 2});
  const auto [keep, hold] = split_holdout(ds, 0.1, 3);
  CHECK(keep.size() == 90);
  CHECK(hold.size() == 10);
  const auto [keep2, hold2] = split_holdout(ds, 0.1, 3);
  CHECK(keep2.examples == keep.examples);
  CHECK(hold2.examples == hold.examples);
  CHECK_THROWS_AS(split_holdout(ds, 0.0, 3), ConfigError);
  CHECK_THROWS_AS(split_holdout(ds, 1.0, 3), ConfigError);
}

TEST_CASE("split_holdout partitions the id set (property)") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Dataset ds;
    ds.labels = LabelSet({"a", "b"});
    const size_t n = 1 + rng.uniform_index(60);
    for (size_t i = 0; i < n; ++i) ds.examples.push_back({"e" + std::to_string(i), {"t", std::nullopt}, 0});
    const double fraction = 0.05 + 0.9 * rng.uniform();
    const auto [keep, hold] = split_holdout(ds, fraction, rng.next());
    std::multiset<std::string> ids;
    for (const auto& ex : keep.examples) ids.insert(ex.id);
    for (const auto& ex : hold.examples) ids.insert(ex.id);
    std::multiset<std::string> expected;
    for (const auto& ex : ds.examples) expected.insert(ex.id);
    CHECK(ids == expected);
    CHECK(hold.size() == static_cast<size_t>(std::llround(fraction * static_cast<double>(n))));
  }
}

TEST_CASE("dataset checksum depends on content only") {
  const Dataset a = testing::sentiment_corpus();
  Dataset b = a;
  CHECK(dataset_checksum(a) == dataset_checksum(b));
  b.examples[5].input.text_a += " !";
  CHECK(dataset_checksum(a) != dataset_checksum(b));
}

TEST_CASE("label sets") {
  const LabelSet l({"entailment", "neutral", "contradiction"}, 0);
  CHECK(l.index_of("neutral") == 1);
  CHECK_FALSE(l.index_of("other").has_value());
  const LabelSet w = l.with_invalid_class();
  CHECK(w.n_classes() == 4);
  CHECK(w.name(3) == "invalid");
  CHECK_THROWS_AS(LabelSet({"a"}), ConfigError);
  CHECK_THROWS_AS(LabelSet({"a", "a"}), ConfigError);
  CHECK_THROWS_AS(LabelSet({"a", "b"}, 2), ConfigError);
}

}  // namespace
}  // namespace saladbench

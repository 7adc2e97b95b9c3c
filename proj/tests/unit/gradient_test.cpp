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

#include <algorithm>
#include <set>

#include "core/errors.hpp"
#include "core/gradient.hpp"
#include "doctest.h"
#include "unit/test_util.hpp"

namespace saladbench {
namespace {

using Positions = std::vector<size_t>;

ImportancePartition manual(Positions bottom, Positions top) {
  ImportancePartition p;
  p.bottom = std::move(bottom);
  p.top = std::move(top);
  return p;
}

TEST_CASE("partition_by_importance") {
  auto p = partition_by_importance({{0, 0, 0, 0}, 0}, 0.5);
  CHECK(p.bottom == Positions{0, 1});
  CHECK(p.top == Positions{2, 3});

  p = partition_by_importance({{3, 1, 4, 2}, 0}, 0.5);
  CHECK(p.bottom == Positions{1, 3});
  CHECK(p.top == Positions{0, 2});

  p = partition_by_importance({{7}, 0}, 0.5);
  CHECK(p.bottom == Positions{0});
  CHECK(p.top.empty());

  CHECK_THROWS_AS(partition_by_importance({{}, 0}, 0.5), DataError);
  CHECK_THROWS_AS(partition_by_importance({{1, 2}, 0}, 0.0), ConfigError);
}

TEST_CASE("partition_by_importance matches a sort-by-hand oracle (property)") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const size_t n = 1 + rng.uniform_index(12);
    SaliencyScores s;
    // Few distinct values so ties are frequent.
    for (size_t i = 0; i < n; ++i) s.scores.push_back(static_cast<double>(rng.uniform_index(4)));
    const double r = 0.1 + 0.8 * rng.uniform();
    const auto p = partition_by_importance(s, r);

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return s.scores[a] < s.scores[b]; });
    const size_t k = std::max<size_t>(1, static_cast<size_t>(std::floor(r * static_cast<double>(n))));
    std::vector<size_t> bottom(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(bottom.begin(), bottom.end());
    CHECK(p.bottom == bottom);

    std::vector<size_t> by_desc(n);
    for (size_t i = 0; i < n; ++i) by_desc[i] = i;
    std::stable_sort(by_desc.begin(), by_desc.end(), [&](size_t a, size_t b) { return s.scores[a] > s.scores[b]; });
    std::vector<size_t> top;
    for (size_t i : by_desc) {
      if (top.size() == k) break;
      if (!std::binary_search(bottom.begin(), bottom.end(), i)) top.push_back(i);
    }
    std::sort(top.begin(), top.end());
    CHECK(p.top == top);
  }
}

TEST_CASE("drop_tokens") {
  const TokenSeq seq({"a", "b", "c", "d"});
  CHECK(drop_tokens(seq, manual({1, 3}, {0, 2})) == TokenSeq({"a", "c"}));
  CHECK(drop_tokens(seq, manual({}, {})) == seq);
}

TEST_CASE("repeat_tokens with a forced draw") {
  const TokenSeq seq({"a", "b", "c", "d"});
  CHECK(repeat_tokens(seq, manual({0, 1}, {2}), 9) == TokenSeq({"c", "c", "c", "d"}));
}

TEST_CASE("replace_tokens with a one-word vocabulary") {
  const std::vector<std::string> vocab = {"z"};
  CHECK(replace_tokens(TokenSeq({"a", "b", "c"}), manual({0, 2}, {1}), vocab, 4) == TokenSeq({"z", "b", "z"}));
  CHECK(replace_tokens(TokenSeq({"a", "b"}), manual({}, {}), vocab, 4) == TokenSeq({"a", "b"}));
}

TEST_CASE("gradient kinds keep their structural contracts (property)") {
  Rng rng(77);
  const std::vector<std::string> vocab = {"p", "q", "r", "s"};
  for (int trial = 0; trial < 500; ++trial) {
    TokenSeq seq = testing::random_tokens(rng, 10);
    if (seq.size() < 2) seq = TokenSeq({"a", "b", "c"});
    SaliencyScores s;
    for (size_t i = 0; i < seq.size(); ++i) s.scores.push_back(rng.normal());
    const auto part = partition_by_importance(s, 0.5);

    const TokenSeq rep = repeat_tokens(seq, part, rng.next());
    REQUIRE(rep.size() == seq.size());
    std::set<std::string> top_surfaces;
    for (size_t i : part.top) top_surfaces.insert(seq[i]);
    for (size_t i = 0; i < seq.size(); ++i) {
      const bool in_bottom = std::binary_search(part.bottom.begin(), part.bottom.end(), i);
      if (in_bottom && !part.top.empty()) {
        CHECK(top_surfaces.count(rep[i]) == 1);
      } else {
        CHECK(rep[i] == seq[i]);
      }
    }

    const TokenSeq repl = replace_tokens(seq, part, vocab, rng.next());
    REQUIRE(repl.size() == seq.size());
    for (size_t i = 0; i < seq.size(); ++i) {
      const bool in_bottom = std::binary_search(part.bottom.begin(), part.bottom.end(), i);
      if (in_bottom) {
        CHECK(std::find(vocab.begin(), vocab.end(), repl[i]) != vocab.end());
      } else {
        CHECK(repl[i] == seq[i]);
      }
    }

    const TokenSeq dropped = drop_tokens(seq, part);
    CHECK(dropped.size() == seq.size() - part.bottom.size());
  }
}

TEST_CASE("copy_one picks the most salient token") {
  Example ex{"q", {"what is quora about ?", "original question"}, 1};
  const auto t = copy_one(ex, {{0.1, 0.2, 0.9, 0.3, 0.0}, 1}, TaskKind::kPair);
  CHECK(*t.example.input.text_b == "quora");
  CHECK(t.example.input.text_a == ex.input.text_a);

  const auto u = copy_one(ex, {{0.5, 0.5, 0.5, 0.5, 0.5}, 1}, TaskKind::kPair);
  CHECK(*u.example.input.text_b == "what");

  CHECK_THROWS_AS(copy_one(Example{"s", {"a b", std::nullopt}, 0}, {{1, 2}, 0}, TaskKind::kSingle),
                  UnsupportedTransformError);
}

TEST_CASE("copy_one yields a single token (property)") {
  const Dataset ds = testing::pair_corpus();
  Rng rng(3);
  for (const auto& ex : ds.examples) {
    const size_t n = tokenize(ex.input.text_a).size();
    SaliencyScores s;
    for (size_t i = 0; i < n; ++i) s.scores.push_back(rng.normal());
    CHECK(tokenize(*copy_one(ex, s, TaskKind::kPair).example.input.text_b).size() == 1);
  }
}

TEST_CASE("apply_gradient rejects misaligned scores") {
  Example ex{"s", {"a b c", std::nullopt}, 0};
  TransformSpec spec;
  spec.kind = TransformKind::kDrop;
  const std::vector<std::string> vocab = {"z"};
  CHECK_THROWS(apply_gradient(ex, spec, TaskKind::kSingle, {{1.0, 2.0}, 0}, vocab));
  const auto t = apply_gradient(ex, spec, TaskKind::kSingle, {{3.0, 1.0, 2.0}, 0}, vocab);
  CHECK(t.example.input.text_a == "a c");
}

TEST_CASE("saliency side per kind") {
  TransformSpec spec;
  spec.kind = TransformKind::kCopyOne;
  CHECK(saliency_side(spec, TaskKind::kPair) == Side::kA);
  spec.kind = TransformKind::kDrop;
  CHECK(saliency_side(spec, TaskKind::kPair) == Side::kB);
  CHECK(saliency_side(spec, TaskKind::kSingle) == Side::kA);
}

TEST_CASE("corpus vocabulary is sorted and distinct") {
  const auto v = corpus_vocabulary(testing::pair_corpus());
  CHECK(std::is_sorted(v.begin(), v.end()));
  CHECK(std::adjacent_find(v.begin(), v.end()) == v.end());
  CHECK(std::find(v.begin(), v.end(), "premise") == v.end());
  CHECK(std::find(v.begin(), v.end(), "garden") != v.end());
}

}  // namespace
}  // namespace saladbench

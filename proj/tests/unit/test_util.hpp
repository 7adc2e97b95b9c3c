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

// Shared helpers for the unit tests: scratch directories, bundled corpora and
// small random generators for property tests.

#ifndef SALADBENCH_TESTS_UNIT_TEST_UTIL_HPP_
#define SALADBENCH_TESTS_UNIT_TEST_UTIL_HPP_

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/random.hpp"

namespace saladbench::testing {

inline std::string source_path(const std::string& rel) { return std::string(SALADBENCH_SOURCE_DIR) + "/" + rel; }

// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("saladbench_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline Dataset sentiment_corpus() {
  return load_dataset(source_path("data/toy_sentiment.tsv"), FileFormat::kTsv, LabelSet({"neg", "pos"}),
                      TaskKind::kSingle);
}

inline Dataset pair_corpus() {
  return load_dataset(source_path("data/toy_pair.tsv"), FileFormat::kTsv,
                      LabelSet({"entailment", "neutral", "contradiction"}, 0), TaskKind::kPair);
}

// Random token sequence over a small alphabet so repeats are common. The
// last token is terminal punctuation with probability one half.
inline TokenSeq random_tokens(Rng& rng, size_t max_len, size_t alphabet = 6) {
  static const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  static const std::vector<std::string> terminals = {".", "!", "?"};
  const size_t n = rng.uniform_index(max_len + 1);
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(words[rng.uniform_index(std::min(alphabet, words.size()))]);
  if (n > 0 && rng.uniform_index(2) == 0) out.back() = terminals[rng.uniform_index(terminals.size())];
  return TokenSeq(out);
}

inline std::map<std::string, int> multiset(const TokenSeq& seq) {
  std::map<std::string, int> m;
  for (const auto& s : seq) ++m[s];
  return m;
}

}  // namespace saladbench::testing

#endif  // SALADBENCH_TESTS_UNIT_TEST_UTIL_HPP_

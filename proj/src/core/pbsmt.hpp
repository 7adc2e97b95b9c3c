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

// A small phrase-based translation pipeline used as a per-label generator of
// statistically plausible but meaningless text:
//
//   IBM Model 1 (both directions) -> intersected argmax alignment
//   -> consistent phrase pairs (<= 3 tokens per side) -> relative-frequency
//   phrase table; trigram stupid-backoff language model; stack decoder with a
//   distortion limit.
//
// One generator is trained per label, only on that label's examples.

#ifndef SALADBENCH_CORE_PBSMT_HPP_
#define SALADBENCH_CORE_PBSMT_HPP_

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "core/corpus.hpp"
#include "core/transform.hpp"

namespace saladbench::pbsmt {

// Source token standing for the empty word. Upper case never survives
// tokenize(), so it cannot collide with corpus tokens.
inline constexpr std::string_view kNull = "NULL";
inline constexpr std::string_view kSentenceStart = "<s>";

struct ParallelCorpus {
  std::vector<std::pair<TokenSeq, TokenSeq>> pairs;
  int label = 0;
};

// Pair tasks map text_a -> text_b. Single-text tasks map the first ceil(n/2)
// tokens to the rest. Requires at least `min_pairs` usable examples.
ParallelCorpus build_parallel_corpus(const Dataset& ds, int label, size_t min_pairs = 50);

// t(target | source). Source kNull is the empty word.
class LexicalTable {
 public:
  double prob(const std::string& source, const std::string& target) const;
  std::map<std::string, std::map<std::string, double>>& entries() { return probs_; }
  const std::map<std::string, std::map<std::string, double>>& entries() const { return probs_; }

 private:
  std::map<std::string, std::map<std::string, double>> probs_;
};

struct Model1Result {
  LexicalTable table;
  // Corpus log-likelihood before each iteration and after the last one.
  std::vector<double> log_likelihood;
};

// IBM Model 1 EM with a NULL source word and uniform initialisation. With
// `reverse` the corpus sides are swapped.
Model1Result train_model1(const ParallelCorpus& corpus, int iterations = 10, bool reverse = false);

using Alignment = std::set<std::pair<size_t, size_t>>;  // (source, target)

// Each target word links to its most probable source word under `forward`,
// each source word to its most probable target word under `backward`
// (NULL links dropped); the result is the intersection.
Alignment align(const TokenSeq& source, const TokenSeq& target, const LexicalTable& forward,
                const LexicalTable& backward);

struct PhrasePair {
  std::string source;  // space-joined tokens
  std::string target;
  bool operator<(const PhrasePair& o) const {
    return std::tie(source, target) < std::tie(o.source, o.target);
  }
  bool operator==(const PhrasePair&) const = default;
};

// Every phrase pair up to max_len tokens per side that contains at least one
// alignment link and has no link leaving its rectangle.
std::vector<PhrasePair> extract_phrases(const TokenSeq& source, const TokenSeq& target,
                                        const Alignment& alignment, size_t max_len = 3);

struct PhraseEntry {
  double logp_target_given_source = 0.0;
  double logp_source_given_target = 0.0;
  long count = 0;
};

class PhraseTable {
 public:
  static PhraseTable from_pairs(const std::vector<PhrasePair>& pairs);

  // Target options of a source phrase, or nullptr.
  const std::map<std::string, PhraseEntry>* options(const std::string& source) const;
  void set(const std::string& source, const std::string& target, PhraseEntry entry);
  const std::map<std::string, std::map<std::string, PhraseEntry>>& entries() const {
    return table_;
  }
  size_t size() const;

 private:
  std::map<std::string, std::map<std::string, PhraseEntry>> table_;
};

// Trigram model with stupid backoff (alpha = 0.4). Sentences are padded with
// two <s> markers. Relative frequencies use continuation counts of the
// history; unseen words score 1 / (V + 1).
class LanguageModel {
 public:
  static constexpr double kBackoff = 0.4;

  static LanguageModel train(const std::vector<TokenSeq>& sentences);
  static LanguageModel from_counts(std::map<std::string, long> counts);

  // Unigram level: c(w) / total, or 1 / (V + 1) for unseen words.
  double unigram_score(const std::string& w) const;
  // S(w | u v), a score in (0, 1].
  double score(const std::string& u, const std::string& v, const std::string& w) const;
  // Sum of log S over the sequence, starting from <s> <s>.
  double log_score(const std::vector<std::string>& words) const;

  const std::map<std::string, long>& counts() const { return counts_; }
  size_t vocabulary_size() const { return vocab_size_; }

 private:
  void index();

  std::map<std::string, long> counts_;       // space-joined n-grams, n = 1..3
  std::map<std::string, long> continuation_;  // history -> sum of counts of its extensions
  long unigram_total_ = 0;
  size_t vocab_size_ = 0;
};

struct DecoderWeights {
  double tm = 1.0;
  double lm = 0.5;
  double distortion = -0.3;  // per source position jumped
  double length = -0.1;      // per output word
  int beam_size = 50;
  int distortion_limit = 3;
  int max_phrase_len = 3;
  int options_per_phrase = 20;

  void validate() const;
};

// Stack decoding over source coverage. Hypothesis score:
//   tm * sum log p(t|s) + lm * LM(output) + distortion * sum |jump|
//   + length * |output|
// Single source words without a phrase entry pass through unchanged.
// Equal scores resolve to the lexicographically smaller output.
TokenSeq decode(const TokenSeq& source, const PhraseTable& phrases, const LanguageModel& lm,
                const DecoderWeights& weights);

struct Generator {
  int label = 0;
  std::string label_name;
  LexicalTable lexicon;  // source -> target
  PhraseTable phrases;
  LanguageModel lm;
  DecoderWeights weights;
};

struct TrainOptions {
  int iterations = 10;
  size_t min_pairs = 50;
  size_t max_phrase_len = 3;
};

Generator train_generator(const Dataset& ds, int label, const TrainOptions& options,
                          const DecoderWeights& weights);

// Replaces text_b with decode(text_a) for pair tasks; for single-text tasks
// keeps the first half and replaces the rest with decode(first half). Uses
// the generator trained on the example's gold label.
TransformedExample generate_invalid(const Example& ex, TaskKind task,
                                    const std::map<int, Generator>& generators);

// Directory with lex.tsv, phrases.tsv, lm.tsv and weights.json.
void save_generator(const std::string& dir, const Generator& g);
Generator load_generator(const std::string& dir);

}  // namespace saladbench::pbsmt

#endif  // SALADBENCH_CORE_PBSMT_HPP_

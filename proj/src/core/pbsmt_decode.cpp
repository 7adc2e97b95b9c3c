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

// Trigram language model and the stack decoder.

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "core/errors.hpp"
#include "core/pbsmt.hpp"

namespace saladbench::pbsmt {

// ---------------------------------------------------------------------------
// Language model

LanguageModel LanguageModel::train(const std::vector<TokenSeq>& sentences) {
  if (sentences.empty()) throw DataError("language model: no training sentences");
  const std::string bos(kSentenceStart);
  LanguageModel lm;
  for (const auto& s : sentences) {
    std::string u = bos;
    std::string v = bos;
    for (const auto& w : s) {
      ++lm.counts_[w];
      ++lm.counts_[v + ' ' + w];
      ++lm.counts_[u + ' ' + v + ' ' + w];
      u = v;
      v = w;
    }
  }
  lm.index();
  return lm;
}

LanguageModel LanguageModel::from_counts(std::map<std::string, long> counts) {
  LanguageModel lm;
  lm.counts_ = std::move(counts);
  lm.index();
  return lm;
}

void LanguageModel::index() {
  continuation_.clear();
  unigram_total_ = 0;
  vocab_size_ = 0;
  for (const auto& [ngram, c] : counts_) {
    if (c <= 0) throw DataError("language model: non-positive count for '" + ngram + "'");
    const size_t last = ngram.rfind(' ');
    if (last == std::string::npos) {
      unigram_total_ += c;
      ++vocab_size_;
    } else {
      continuation_[ngram.substr(0, last)] += c;
    }
  }
  if (unigram_total_ == 0) throw DataError("language model: no unigram counts");
}

double LanguageModel::score(const std::string& u, const std::string& v, const std::string& w) const {
  auto count = [&](const std::string& key) -> long {
    const auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  };
  auto history = [&](const std::string& key) -> long {
    const auto it = continuation_.find(key);
    return it == continuation_.end() ? 0 : it->second;
  };
  const std::string uv = u + ' ' + v;
  if (const long c = count(uv + ' ' + w); c > 0) {
    return static_cast<double>(c) / static_cast<double>(history(uv));
  }
  if (const long c = count(v + ' ' + w); c > 0) {
    return kBackoff * static_cast<double>(c) / static_cast<double>(history(v));
  }
  return kBackoff * kBackoff * unigram_score(w);
}

double LanguageModel::unigram_score(const std::string& w) const {
  const auto it = counts_.find(w);
  if (it != counts_.end()) {
    return static_cast<double>(it->second) / static_cast<double>(unigram_total_);
  }
  return 1.0 / static_cast<double>(vocab_size_ + 1);
}

double LanguageModel::log_score(const std::vector<std::string>& words) const {
  std::string u(kSentenceStart);
  std::string v(kSentenceStart);
  double total = 0.0;
  for (const auto& w : words) {
    total += std::log(score(u, v, w));
    u = v;
    v = w;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Decoder

void DecoderWeights::validate() const {
  if (beam_size < 1) throw ConfigError("beam size must be >= 1");
  if (distortion_limit < 0) throw ConfigError("distortion limit must be >= 0");
  if (max_phrase_len < 1) throw ConfigError("max phrase length must be >= 1");
  if (options_per_phrase < 1) throw ConfigError("options per phrase must be >= 1");
}

namespace {

struct Option {
  std::vector<std::string> words;
  double logp = 0.0;
};

struct Hypothesis {
  std::string coverage;  // '0'/'1' per source position
  int last_end = -1;
  std::vector<std::string> output;
  double score = 0.0;
};

// Better score first, then the lexicographically smaller output.
bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.output < b.output;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t sp = s.find(' ', start);
    if (sp == std::string::npos) sp = s.size();
    if (sp > start) out.push_back(s.substr(start, sp - start));
    start = sp + 1;
  }
  return out;
}

std::string state_key(const Hypothesis& h) {
  const size_t n = h.output.size();
  std::string key = h.coverage;
  key += '|';
  key += std::to_string(h.last_end);
  key += '|';
  key += n >= 2 ? h.output[n - 2] : std::string(kSentenceStart);
  key += ' ';
  key += n >= 1 ? h.output[n - 1] : std::string(kSentenceStart);
  return key;
}

TokenSeq run_stacks(const TokenSeq& source,
                    const std::vector<std::vector<std::vector<Option>>>& options,
                    const LanguageModel& lm, const DecoderWeights& w, int distortion_limit) {
  const size_t n = source.size();
  std::vector<std::map<std::string, Hypothesis>> stacks(n + 1);
  Hypothesis empty;
  empty.coverage.assign(n, '0');
  stacks[0].emplace(state_key(empty), empty);

  for (size_t k = 0; k < n; ++k) {
    std::vector<Hypothesis> beam;
    beam.reserve(stacks[k].size());
    for (auto& [key, h] : stacks[k]) beam.push_back(std::move(h));
    std::sort(beam.begin(), beam.end(), better);
    if (beam.size() > static_cast<size_t>(w.beam_size)) beam.resize(static_cast<size_t>(w.beam_size));
    stacks[k].clear();

    for (const Hypothesis& h : beam) {
      for (size_t s = 0; s < n; ++s) {
        if (h.coverage[s] == '1') continue;
        const int jump = std::abs(static_cast<int>(s) - (h.last_end + 1));
        if (jump > distortion_limit) continue;
        for (size_t len = 1; len <= options[s].size() && s + len <= n; ++len) {
          if (h.coverage[s + len - 1] == '1') break;
          for (const Option& opt : options[s][len - 1]) {
            Hypothesis next;
            next.coverage = h.coverage;
            for (size_t q = s; q < s + len; ++q) next.coverage[q] = '1';
            next.last_end = static_cast<int>(s + len - 1);
            next.output = h.output;
            double lm_delta = 0.0;
            for (const auto& word : opt.words) {
              const size_t m = next.output.size();
              const std::string u = m >= 2 ? next.output[m - 2] : std::string(kSentenceStart);
              const std::string v = m >= 1 ? next.output[m - 1] : std::string(kSentenceStart);
              lm_delta += std::log(lm.score(u, v, word));
              next.output.push_back(word);
            }
            next.score = h.score + w.tm * opt.logp + w.lm * lm_delta + w.distortion * jump +
                         w.length * static_cast<double>(opt.words.size());
            auto& stack = stacks[k + len];
            const std::string key = state_key(next);
            auto it = stack.find(key);
            if (it == stack.end()) {
              stack.emplace(key, std::move(next));
            } else if (better(next, it->second)) {
              it->second = std::move(next);
            }
          }
        }
      }
    }
  }

  if (stacks[n].empty()) return TokenSeq();
  const Hypothesis* best = nullptr;
  for (const auto& [key, h] : stacks[n]) {
    if (!best || better(h, *best)) best = &h;
  }
  return TokenSeq(best->output);
}

}  // namespace

TokenSeq decode(const TokenSeq& source, const PhraseTable& phrases, const LanguageModel& lm,
                const DecoderWeights& weights) {
  weights.validate();
  if (source.empty()) throw DegenerateInputError("decode: empty source");
  const size_t n = source.size();

  // options[s][len-1]: translations of source[s, s+len).
  std::vector<std::vector<std::vector<Option>>> options(n);
  for (size_t s = 0; s < n; ++s) {
    std::string phrase;
    for (size_t len = 1; len <= static_cast<size_t>(weights.max_phrase_len) && s + len <= n; ++len) {
      if (len > 1) phrase += ' ';
      phrase += source[s + len - 1];
      std::vector<Option> opts;
      if (const auto* row = phrases.options(phrase)) {
        for (const auto& [tgt, entry] : *row) {
          opts.push_back({split_words(tgt), entry.logp_target_given_source});
        }
        std::stable_sort(opts.begin(), opts.end(),
                         [](const Option& a, const Option& b) { return a.logp > b.logp; });
        if (opts.size() > static_cast<size_t>(weights.options_per_phrase)) {
          opts.resize(static_cast<size_t>(weights.options_per_phrase));
        }
      } else if (len == 1) {
        opts.push_back({{source[s]}, 0.0});
      }
      options[s].push_back(std::move(opts));
    }
  }

  TokenSeq out = run_stacks(source, options, lm, weights, weights.distortion_limit);
  if (out.empty()) {
    // Pruning kept only hypotheses that cannot finish within the distortion
    // limit; monotone decoding always completes.
    out = run_stacks(source, options, lm, weights, 0);
  }
  return out;
}

}  // namespace saladbench::pbsmt

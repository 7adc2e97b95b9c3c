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

// Parallel corpus construction, IBM Model 1, alignment and phrase extraction.

#include <cmath>
#include <unordered_map>

#include "core/errors.hpp"
#include "core/pbsmt.hpp"

namespace saladbench::pbsmt {

ParallelCorpus build_parallel_corpus(const Dataset& ds, int label, size_t min_pairs) {
  ParallelCorpus corpus;
  corpus.label = label;
  for (const auto& ex : ds.examples) {
    if (ex.gold_label != label) continue;
    TokenSeq src;
    TokenSeq tgt;
    if (ds.task_kind == TaskKind::kPair) {
      if (!ex.input.text_b) continue;
      src = tokenize(ex.input.text_a);
      tgt = tokenize(*ex.input.text_b);
    } else {
      const TokenSeq all = tokenize(ex.input.text_a);
      const size_t half = (all.size() + 1) / 2;
      const auto& s = all.surfaces();
      src = TokenSeq({s.begin(), s.begin() + static_cast<std::ptrdiff_t>(half)});
      tgt = TokenSeq({s.begin() + static_cast<std::ptrdiff_t>(half), s.end()});
    }
    if (src.empty() || tgt.empty()) continue;
    corpus.pairs.emplace_back(std::move(src), std::move(tgt));
  }
  if (corpus.pairs.size() < min_pairs) {
    throw DataError("insufficient data for label " + std::to_string(label) + ": " +
                    std::to_string(corpus.pairs.size()) + " usable pairs, need " +
                    std::to_string(min_pairs));
  }
  return corpus;
}

double LexicalTable::prob(const std::string& source, const std::string& target) const {
  const auto it = probs_.find(source);
  if (it == probs_.end()) return 0.0;
  const auto jt = it->second.find(target);
  return jt == it->second.end() ? 0.0 : jt->second;
}

Model1Result train_model1(const ParallelCorpus& corpus, int iterations, bool reverse) {
  if (corpus.pairs.empty()) throw DataError("Model 1: empty corpus");
  if (iterations < 0) throw ConfigError("Model 1: iterations must be >= 0");

  // Integer ids; source id 0 is NULL.
  std::unordered_map<std::string, int> src_ids{{std::string(kNull), 0}};
  std::vector<std::string> src_words{std::string(kNull)};
  std::unordered_map<std::string, int> tgt_ids;
  std::vector<std::string> tgt_words;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> data;
  for (const auto& [a, b] : corpus.pairs) {
    const TokenSeq& s = reverse ? b : a;
    const TokenSeq& t = reverse ? a : b;
    std::vector<int> si{0};
    std::vector<int> ti;
    for (const auto& w : s) {
      auto [it, added] = src_ids.emplace(w, static_cast<int>(src_words.size()));
      if (added) src_words.push_back(w);
      si.push_back(it->second);
    }
    for (const auto& w : t) {
      auto [it, added] = tgt_ids.emplace(w, static_cast<int>(tgt_words.size()));
      if (added) tgt_words.push_back(w);
      ti.push_back(it->second);
    }
    data.emplace_back(std::move(si), std::move(ti));
  }

  // Uniform start over the whole target vocabulary; only co-occurring pairs
  // are ever stored.
  const double uniform = 1.0 / static_cast<double>(tgt_words.size());
  std::vector<std::unordered_map<int, double>> t(src_words.size());
  for (const auto& [si, ti] : data) {
    for (int e : si) {
      for (int f : ti) t[static_cast<size_t>(e)].emplace(f, uniform);
    }
  }

  auto log_likelihood = [&]() {
    double ll = 0.0;
    for (const auto& [si, ti] : data) {
      const double norm = std::log(static_cast<double>(si.size()));
      for (int f : ti) {
        double denom = 0.0;
        for (int e : si) denom += t[static_cast<size_t>(e)].at(f);
        ll += std::log(denom) - norm;
      }
    }
    return ll;
  };

  Model1Result result;
  for (int it = 0; it < iterations; ++it) {
    result.log_likelihood.push_back(log_likelihood());
    std::vector<std::unordered_map<int, double>> counts(src_words.size());
    std::vector<double> totals(src_words.size(), 0.0);
    for (const auto& [si, ti] : data) {
      for (int f : ti) {
        double denom = 0.0;
        for (int e : si) denom += t[static_cast<size_t>(e)].at(f);
        for (int e : si) {
          const double post = t[static_cast<size_t>(e)].at(f) / denom;
          counts[static_cast<size_t>(e)][f] += post;
          totals[static_cast<size_t>(e)] += post;
        }
      }
    }
    for (size_t e = 0; e < t.size(); ++e) {
      for (auto& [f, p] : t[e]) {
        const auto c = counts[e].find(f);
        p = c == counts[e].end() ? 0.0 : c->second / totals[e];
      }
    }
  }
  result.log_likelihood.push_back(log_likelihood());

  for (size_t e = 0; e < t.size(); ++e) {
    auto& row = result.table.entries()[src_words[e]];
    for (const auto& [f, p] : t[e]) row[tgt_words[static_cast<size_t>(f)]] = p;
  }
  return result;
}

Alignment align(const TokenSeq& source, const TokenSeq& target, const LexicalTable& forward,
                const LexicalTable& backward) {
  const std::string null(kNull);
  Alignment fwd;
  for (size_t j = 0; j < target.size(); ++j) {
    double best = forward.prob(null, target[j]);
    std::optional<size_t> arg;
    for (size_t i = 0; i < source.size(); ++i) {
      const double p = forward.prob(source[i], target[j]);
      if (p > best) {
        best = p;
        arg = i;
      }
    }
    if (arg) fwd.emplace(*arg, j);
  }
  Alignment out;
  for (size_t i = 0; i < source.size(); ++i) {
    double best = backward.prob(null, source[i]);
    std::optional<size_t> arg;
    for (size_t j = 0; j < target.size(); ++j) {
      const double p = backward.prob(target[j], source[i]);
      if (p > best) {
        best = p;
        arg = j;
      }
    }
    if (arg && fwd.count({i, *arg})) out.emplace(i, *arg);
  }
  return out;
}

namespace {

std::string span_text(const TokenSeq& seq, size_t begin, size_t end) {
  std::string out;
  for (size_t k = begin; k <= end; ++k) {
    if (k > begin) out += ' ';
    out += seq[k];
  }
  return out;
}

}  // namespace

std::vector<PhrasePair> extract_phrases(const TokenSeq& source, const TokenSeq& target,
                                        const Alignment& alignment, size_t max_len) {
  std::vector<PhrasePair> out;
  if (alignment.empty() || max_len == 0) return out;
  for (size_t i1 = 0; i1 < source.size(); ++i1) {
    for (size_t i2 = i1; i2 < source.size() && i2 - i1 < max_len; ++i2) {
      for (size_t j1 = 0; j1 < target.size(); ++j1) {
        for (size_t j2 = j1; j2 < target.size() && j2 - j1 < max_len; ++j2) {
          bool inside = false;
          bool consistent = true;
          for (const auto& [i, j] : alignment) {
            const bool in_src = i >= i1 && i <= i2;
            const bool in_tgt = j >= j1 && j <= j2;
            if (in_src != in_tgt) {
              consistent = false;
              break;
            }
            inside = inside || in_src;
          }
          if (consistent && inside) {
            out.push_back({span_text(source, i1, i2), span_text(target, j1, j2)});
          }
        }
      }
    }
  }
  return out;
}

PhraseTable PhraseTable::from_pairs(const std::vector<PhrasePair>& pairs) {
  std::map<std::string, std::map<std::string, long>> joint;
  std::map<std::string, long> src_total;
  std::map<std::string, long> tgt_total;
  for (const auto& p : pairs) {
    ++joint[p.source][p.target];
    ++src_total[p.source];
    ++tgt_total[p.target];
  }
  PhraseTable table;
  for (const auto& [src, row] : joint) {
    for (const auto& [tgt, c] : row) {
      PhraseEntry e;
      e.count = c;
      e.logp_target_given_source = std::log(static_cast<double>(c) / static_cast<double>(src_total[src]));
      e.logp_source_given_target = std::log(static_cast<double>(c) / static_cast<double>(tgt_total[tgt]));
      table.table_[src][tgt] = e;
    }
  }
  return table;
}

const std::map<std::string, PhraseEntry>* PhraseTable::options(const std::string& source) const {
  const auto it = table_.find(source);
  return it == table_.end() ? nullptr : &it->second;
}

void PhraseTable::set(const std::string& source, const std::string& target, PhraseEntry entry) {
  if (!std::isfinite(entry.logp_target_given_source) || !std::isfinite(entry.logp_source_given_target)) {
    throw DataError("phrase table log-probabilities must be finite");
  }
  table_[source][target] = entry;
}

size_t PhraseTable::size() const {
  size_t n = 0;
  for (const auto& [src, row] : table_) n += row.size();
  return n;
}

}  // namespace saladbench::pbsmt

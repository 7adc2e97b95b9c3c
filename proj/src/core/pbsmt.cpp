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

#include "core/pbsmt.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>

#include "core/errors.hpp"
#include "json.hpp"

namespace saladbench::pbsmt {

Generator train_generator(const Dataset& ds, int label, const TrainOptions& options,
                          const DecoderWeights& weights) {
  weights.validate();
  if (label < 0 || label >= ds.labels.n_classes()) {
    throw ConfigError("pbsmt: label index " + std::to_string(label) + " out of range");
  }
  const ParallelCorpus corpus = build_parallel_corpus(ds, label, options.min_pairs);
  Generator g;
  g.label = label;
  g.label_name = ds.labels.name(label);
  g.weights = weights;
  g.lexicon = train_model1(corpus, options.iterations, false).table;
  const LexicalTable backward = train_model1(corpus, options.iterations, true).table;

  std::vector<PhrasePair> extracted;
  std::vector<TokenSeq> targets;
  for (const auto& [src, tgt] : corpus.pairs) {
    const Alignment a = align(src, tgt, g.lexicon, backward);
    auto phrases = extract_phrases(src, tgt, a, options.max_phrase_len);
    extracted.insert(extracted.end(), phrases.begin(), phrases.end());
    targets.push_back(tgt);
  }
  g.phrases = PhraseTable::from_pairs(extracted);
  g.lm = LanguageModel::train(targets);
  return g;
}

TransformedExample generate_invalid(const Example& ex, TaskKind task,
                                    const std::map<int, Generator>& generators) {
  if (!ex.gold_label) {
    throw UnsupportedTransformError("pbsmt: example '" + ex.id + "' has no gold label");
  }
  const auto it = generators.find(*ex.gold_label);
  if (it == generators.end()) {
    throw ConfigError("pbsmt: no generator trained for label " + std::to_string(*ex.gold_label));
  }
  const Generator& g = it->second;
  TransformedExample out;
  out.example = ex;
  out.source_id = ex.id;
  out.transform.kind = TransformKind::kPbsmt;
  if (task == TaskKind::kPair) {
    const TokenSeq src = tokenize(ex.input.text_a);
    out.example.input.text_b = detokenize(decode(src, g.phrases, g.lm, g.weights));
    out.transform.target_side = Side::kB;
  } else {
    const TokenSeq all = tokenize(ex.input.text_a);
    if (all.empty()) throw DegenerateInputError("pbsmt: empty text in '" + ex.id + "'");
    const size_t half = (all.size() + 1) / 2;
    std::vector<std::string> words(all.surfaces().begin(),
                                   all.surfaces().begin() + static_cast<std::ptrdiff_t>(half));
    const TokenSeq generated = decode(TokenSeq(words), g.phrases, g.lm, g.weights);
    words.insert(words.end(), generated.begin(), generated.end());
    out.example.input.text_a = detokenize(TokenSeq(std::move(words)));
    out.transform.target_side = Side::kA;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

template <typename RowFn>
void read_tsv(const std::filesystem::path& path, size_t columns, RowFn fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != columns) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(columns) + " columns");
    }
    fn(f);
  }
}

double to_double(const std::string& s) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("not a number: '" + s + "'");
  }
}

}  // namespace

void save_generator(const std::string& dir, const Generator& g) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "lex.tsv");
    for (const auto& [src, row] : g.lexicon.entries()) {
      for (const auto& [tgt, p] : row) out << src << '\t' << tgt << '\t' << fmt::format("{}", p) << '\n';
    }
    if (!out) throw DataError("write failed for lex.tsv");
  }
  {
    std::ofstream out(fs::path(dir) / "phrases.tsv");
    for (const auto& [src, row] : g.phrases.entries()) {
      for (const auto& [tgt, e] : row) {
        out << src << '\t' << tgt << '\t' << fmt::format("{}", e.logp_target_given_source) << '\t'
            << fmt::format("{}", e.logp_source_given_target) << '\t' << e.count << '\n';
      }
    }
    if (!out) throw DataError("write failed for phrases.tsv");
  }
  {
    std::ofstream out(fs::path(dir) / "lm.tsv");
    for (const auto& [ngram, c] : g.lm.counts()) out << ngram << '\t' << c << '\n';
    if (!out) throw DataError("write failed for lm.tsv");
  }
  nlohmann::ordered_json w;
  w["label"] = g.label;
  w["label_name"] = g.label_name;
  w["tm"] = g.weights.tm;
  w["lm"] = g.weights.lm;
  w["distortion"] = g.weights.distortion;
  w["length"] = g.weights.length;
  w["beam_size"] = g.weights.beam_size;
  w["distortion_limit"] = g.weights.distortion_limit;
  w["max_phrase_len"] = g.weights.max_phrase_len;
  w["options_per_phrase"] = g.weights.options_per_phrase;
  std::ofstream out(fs::path(dir) / "weights.json");
  out << w.dump(2) << '\n';
  if (!out) throw DataError("write failed for weights.json");
}

Generator load_generator(const std::string& dir) {
  namespace fs = std::filesystem;
  Generator g;
  read_tsv(fs::path(dir) / "lex.tsv", 3, [&](const std::vector<std::string>& f) {
    g.lexicon.entries()[f[0]][f[1]] = to_double(f[2]);
  });
  read_tsv(fs::path(dir) / "phrases.tsv", 5, [&](const std::vector<std::string>& f) {
    PhraseEntry e;
    e.logp_target_given_source = to_double(f[2]);
    e.logp_source_given_target = to_double(f[3]);
    e.count = static_cast<long>(to_double(f[4]));
    g.phrases.set(f[0], f[1], e);
  });
  std::map<std::string, long> counts;
  read_tsv(fs::path(dir) / "lm.tsv", 2, [&](const std::vector<std::string>& f) {
    counts[f[0]] = static_cast<long>(to_double(f[1]));
  });
  g.lm = LanguageModel::from_counts(std::move(counts));

  std::ifstream in(fs::path(dir) / "weights.json");
  if (!in) throw DataError("cannot open '" + (fs::path(dir) / "weights.json").string() + "'");
  try {
    const auto w = nlohmann::json::parse(in);
    g.label = w.at("label").get<int>();
    g.label_name = w.value("label_name", std::string());
    g.weights.tm = w.at("tm").get<double>();
    g.weights.lm = w.at("lm").get<double>();
    g.weights.distortion = w.at("distortion").get<double>();
    g.weights.length = w.at("length").get<double>();
    g.weights.beam_size = w.at("beam_size").get<int>();
    g.weights.distortion_limit = w.at("distortion_limit").get<int>();
    g.weights.max_phrase_len = w.value("max_phrase_len", 3);
    g.weights.options_per_phrase = w.value("options_per_phrase", 20);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("weights.json: " + std::string(e.what()));
  }
  g.weights.validate();
  return g;
}

}  // namespace saladbench::pbsmt

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

#include "saladbench/saladbench.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "core/corpus.hpp"
#include "core/errors.hpp"
#include "core/lexical.hpp"
#include "core/pbsmt.hpp"
#include "core/pipeline.hpp"
#include "core/providers.hpp"
#include "core/toyclf.hpp"
#include "json.hpp"

struct sb_dataset {
  saladbench::Dataset ds;
};

struct sb_model {
  std::shared_ptr<const saladbench::ToyModelParams> params;
};

struct sb_provider {
  std::unique_ptr<saladbench::Provider> provider;
};

struct sb_pbsmt {
  saladbench::pbsmt::Generator generator;
};

namespace {

using saladbench::ConfigError;

thread_local std::string g_last_error;

sb_status fail(sb_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
sb_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SB_OK;
  } catch (const saladbench::Error& e) {
    return fail(static_cast<sb_status>(static_cast<int>(e.kind())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(SB_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SB_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw ConfigError(std::string(what) + " must not be NULL");
}

saladbench::TrainConfig train_config(const char* json, uint64_t seed, saladbench::LossConfig* loss) {
  saladbench::TrainConfig cfg;
  cfg.seed = seed;
  if (!json) return cfg;
  const auto j = nlohmann::json::parse(json);
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "epochs") cfg.epochs = value.get<int>();
    else if (key == "batch_size") cfg.batch_size = value.get<int>();
    else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
    else if (key == "dim") cfg.dim = value.get<size_t>();
    else if (key == "init_scale") cfg.init_scale = value.get<double>();
    else if (key == "loss") loss->kind = saladbench::parse_loss_kind(value.get<std::string>());
    else if (key == "label_smoothing") loss->label_smoothing = value.get<double>();
    else if (key == "focal_gamma") loss->focal_gamma = value.get<double>();
    else throw ConfigError("unknown train config key '" + key + "'");
  }
  cfg.validate();
  loss->validate();
  return cfg;
}

}  // namespace

extern "C" {

const char* sb_version(void) { return "0.1.0"; }

const char* sb_last_error(void) { return g_last_error.c_str(); }

void sb_string_free(char* s) { std::free(s); }

sb_status sb_default_config(char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    *out_json = copy_string(saladbench::default_run_config());
  });
}

sb_status sb_resolve_config(const char* config_json, char** out_json) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out_json, "out_json");
    *out_json = copy_string(saladbench::resolve_run_config(config_json));
  });
}

sb_status sb_run(const char* config_json, char** out_summary_json) {
  return guarded([&] {
    require(config_json, "config_json");
    const std::string summary = saladbench::run_command(config_json);
    if (out_summary_json) *out_summary_json = copy_string(summary);
  });
}

sb_status sb_tokenize(const char* text, char** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = copy_string(saladbench::detokenize(saladbench::tokenize(text)));
  });
}

sb_status sb_reorder_text(const char* kind, const char* text, uint64_t seed, char** out) {
  return guarded([&] {
    require(kind, "kind");
    require(text, "text");
    require(out, "out");
    const auto k = saladbench::parse_transform_kind(kind);
    const auto tokens = saladbench::tokenize(text);
    saladbench::TokenSeq result;
    switch (k) {
      case saladbench::TransformKind::kSort: result = saladbench::sort_tokens(tokens); break;
      case saladbench::TransformKind::kReverse: result = saladbench::reverse_tokens(tokens); break;
      case saladbench::TransformKind::kShuffle:
        result = saladbench::shuffle_tokens(tokens, seed).tokens;
        break;
      default: throw ConfigError(std::string("'") + kind + "' is not a reordering");
    }
    *out = copy_string(saladbench::detokenize(result));
  });
}

sb_status sb_dataset_load(const char* path, const char* format, const char* task,
                          const char* const* labels, size_t n_labels, const char* default_label,
                          sb_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(format, "format");
    require(task, "task");
    require(out, "out");
    if (n_labels > 0) require(labels, "labels");
    std::vector<std::string> names;
    for (size_t i = 0; i < n_labels; ++i) {
      require(labels[i], "label name");
      names.emplace_back(labels[i]);
    }
    std::optional<int> def;
    if (default_label) {
      auto it = std::find(names.begin(), names.end(), default_label);
      if (it == names.end()) throw ConfigError(std::string("default label '") + default_label + "' is not a label");
      def = static_cast<int>(it - names.begin());
    }
    auto handle = std::make_unique<sb_dataset>();
    handle->ds = saladbench::load_dataset(path, saladbench::parse_file_format(format),
                                          saladbench::LabelSet(names, def), saladbench::parse_task_kind(task));
    *out = handle.release();
  });
}

void sb_dataset_free(sb_dataset* ds) { delete ds; }

size_t sb_dataset_size(const sb_dataset* ds) { return ds ? ds->ds.size() : 0; }

sb_status sb_dataset_checksum(const sb_dataset* ds, char** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    *out = copy_string(saladbench::dataset_checksum(ds->ds));
  });
}

sb_status sb_model_train(const sb_dataset* ds, const char* train_config_json, uint64_t seed, sb_model** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    saladbench::LossConfig loss;
    const auto cfg = train_config(train_config_json, seed, &loss);
    if (loss.kind == saladbench::LossKind::kEntropic) {
      throw ConfigError("the entropic loss is only available through mitigation");
    }
    auto handle = std::make_unique<sb_model>();
    handle->params = std::make_shared<const saladbench::ToyModelParams>(saladbench::train(ds->ds, loss, cfg));
    *out = handle.release();
  });
}

sb_status sb_model_load(const char* path, sb_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<sb_model>();
    handle->params = std::make_shared<const saladbench::ToyModelParams>(saladbench::load_params(path));
    *out = handle.release();
  });
}

sb_status sb_model_save(const sb_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    saladbench::save_params(path, *model->params);
  });
}

void sb_model_free(sb_model* model) { delete model; }

size_t sb_model_classes(const sb_model* model) { return model ? model->params->n_classes : 0; }

sb_status sb_model_predict(const sb_model* model, const char* text_a, const char* text_b, double* probs,
                           size_t n_probs) {
  return guarded([&] {
    require(model, "model");
    require(text_a, "text_a");
    require(probs, "probs");
    const auto& params = *model->params;
    if (n_probs != params.n_classes) throw ConfigError("probs buffer size must equal the class count");
    if ((params.sides == 2) != (text_b != nullptr)) {
      throw ConfigError(params.sides == 2 ? "pair model needs text_b" : "single-text model takes no text_b");
    }
    saladbench::Example ex;
    ex.id = "input";
    ex.input.text_a = text_a;
    if (text_b) ex.input.text_b = std::string(text_b);
    const auto p = saladbench::forward(params, ex);
    std::copy(p.begin(), p.end(), probs);
  });
}

sb_status sb_provider_open(const char* kind, const char* location, size_t n_classes, const char* saliency_path,
                           int supports_saliency, sb_provider** out) {
  return guarded([&] {
    require(kind, "kind");
    require(location, "location");
    require(out, "out");
    auto handle = std::make_unique<sb_provider>();
    const int n = static_cast<int>(n_classes);
    switch (saladbench::parse_provider_kind(kind)) {
      case saladbench::ProviderKind::kEmbedded: {
        auto params = std::make_shared<const saladbench::ToyModelParams>(saladbench::load_params(location));
        if (params->n_classes != n_classes) throw ConfigError("model output count does not match n_classes");
        handle->provider = std::make_unique<saladbench::EmbeddedProvider>(params, location);
        break;
      }
      case saladbench::ProviderKind::kReplay:
        handle->provider =
            std::make_unique<saladbench::ReplayProvider>(location, n, saliency_path ? saliency_path : "");
        break;
      case saladbench::ProviderKind::kHttp:
        handle->provider = std::make_unique<saladbench::HttpProvider>(location, n, supports_saliency != 0);
        break;
    }
    *out = handle.release();
  });
}

sb_status sb_provider_from_model(const sb_model* model, sb_provider** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    auto handle = std::make_unique<sb_provider>();
    handle->provider = std::make_unique<saladbench::EmbeddedProvider>(model->params, "memory");
    *out = handle.release();
  });
}

void sb_provider_free(sb_provider* provider) { delete provider; }

sb_status sb_provider_predict(const sb_provider* provider, const sb_dataset* ds, char** out_jsonl) {
  return guarded([&] {
    require(provider, "provider");
    require(ds, "dataset");
    require(out_jsonl, "out_jsonl");
    std::string s;
    for (const auto& p : provider->provider->predict_batch(ds->ds.examples)) {
      nlohmann::ordered_json j;
      j["id"] = p.id;
      j["probs"] = p.probs;
      s += j.dump() + "\n";
    }
    *out_jsonl = copy_string(s);
  });
}

sb_status sb_pbsmt_train(const sb_dataset* ds, int label, sb_pbsmt** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    auto handle = std::make_unique<sb_pbsmt>();
    handle->generator = saladbench::pbsmt::train_generator(ds->ds, label, {}, {});
    *out = handle.release();
  });
}

sb_status sb_pbsmt_load(const char* dir, sb_pbsmt** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    auto handle = std::make_unique<sb_pbsmt>();
    handle->generator = saladbench::pbsmt::load_generator(dir);
    *out = handle.release();
  });
}

sb_status sb_pbsmt_save(const sb_pbsmt* g, const char* dir) {
  return guarded([&] {
    require(g, "generator");
    require(dir, "dir");
    saladbench::pbsmt::save_generator(dir, g->generator);
  });
}

void sb_pbsmt_free(sb_pbsmt* g) { delete g; }

sb_status sb_pbsmt_decode(const sb_pbsmt* g, const char* text, char** out) {
  return guarded([&] {
    require(g, "generator");
    require(text, "text");
    require(out, "out");
    const auto& gen = g->generator;
    const auto result = saladbench::pbsmt::decode(saladbench::tokenize(text), gen.phrases, gen.lm, gen.weights);
    *out = copy_string(saladbench::detokenize(result));
  });
}

}  // extern "C"

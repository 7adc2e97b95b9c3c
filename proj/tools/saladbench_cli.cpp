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

// Command-line front end. Flags are folded into a JSON run config over the
// optional --config file and handed to the library through its C interface.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error, 3 provider
// error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "saladbench/saladbench.h"

namespace {

using Json = nlohmann::json;

struct Flags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> dataset;
  std::optional<std::string> validation;
  std::optional<std::string> format;
  std::optional<std::string> task;
  std::vector<std::string> labels;
  std::optional<std::string> default_label;
  std::optional<double> holdout;
  std::optional<std::string> provider;
  std::optional<std::string> location;
  std::optional<std::string> saliency;
  bool supports_saliency = false;
  std::optional<std::string> transforms;

  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<std::string> loss;

  std::optional<std::string> strategy;
  std::optional<double> entropy_weight;
  std::optional<double> augment_fraction;
  std::optional<double> threshold;
  bool transfer = false;
  bool penalize_invalid_entropy = false;

  std::optional<std::string> label;
  std::optional<std::string> models;
  std::optional<std::string> input;

  bool print_config = false;
};

template <typename T>
void set_if(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

int exit_code(sb_status s) {
  switch (s) {
    case SB_OK: return 0;
    case SB_ERR_CONFIG: return 1;
    case SB_ERR_PROVIDER: return 3;
    default: return 2;
  }
}

Json load_config_file(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  Json j = Json::parse(ss.str());
  if (!j.is_object()) throw std::runtime_error("config file must hold a JSON object");
  return j;
}

Json build_config(const Flags& f, const std::string& command, const std::optional<std::string>& pbsmt_action) {
  Json c = load_config_file(f.config);
  c["command"] = command;
  set_if(c, "seed", f.seed);
  set_if(c, "out", f.out);
  Json& d = c["dataset"];
  if (d.is_null()) d = Json::object();
  set_if(d, "path", f.dataset);
  set_if(d, "validation", f.validation);
  set_if(d, "format", f.format);
  set_if(d, "task", f.task);
  if (!f.labels.empty()) d["labels"] = f.labels;
  set_if(d, "default_label", f.default_label);
  set_if(d, "holdout", f.holdout);
  if (d.empty()) c.erase("dataset");

  Json p = c.contains("provider") ? c["provider"] : Json::object();
  set_if(p, "kind", f.provider);
  set_if(p, "location", f.location);
  set_if(p, "saliency", f.saliency);
  if (f.supports_saliency) p["supports_saliency"] = true;
  if (!p.empty()) c["provider"] = p;

  if (f.transforms) {
    if (command == "mitigate") c["mitigation"]["transforms"] = *f.transforms;
    else c["transforms"] = *f.transforms;
  }

  Json t = c.contains("train") ? c["train"] : Json::object();
  set_if(t, "epochs", f.epochs);
  set_if(t, "learning_rate", f.learning_rate);
  set_if(t, "loss", f.loss);
  if (!t.empty()) c["train"] = t;

  Json m = c.contains("mitigation") ? c["mitigation"] : Json::object();
  set_if(m, "strategy", f.strategy);
  set_if(m, "entropy_weight", f.entropy_weight);
  set_if(m, "augment_fraction", f.augment_fraction);
  set_if(m, "threshold", f.threshold);
  if (f.transfer) m["transfer"] = true;
  if (f.penalize_invalid_entropy) m["penalize_invalid_entropy"] = true;
  if (!m.empty()) c["mitigation"] = m;

  Json pb = c.contains("pbsmt") ? c["pbsmt"] : Json::object();
  set_if(pb, "action", pbsmt_action);
  if (f.label) {
    // Numeric labels are indices; anything else is a label name.
    const std::string& s = *f.label;
    const bool numeric = !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
    pb["label"] = numeric ? Json(std::stoi(s)) : Json(s);
  }
  set_if(pb, "models", f.models);
  if (!pb.empty()) c["pbsmt"] = pb;

  if (f.input) c["report"]["input"] = *f.input;
  return c;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  sb_string_free(s);
  return out;
}

int run(const Json& config, bool print_config) {
  const std::string text = config.dump();
  char* out = nullptr;
  if (print_config) {
    const sb_status s = sb_resolve_config(text.c_str(), &out);
    if (s != SB_OK) {
      std::cerr << "error: " << sb_last_error() << "\n";
      return exit_code(s);
    }
    std::cout << take(out);
    return 0;
  }
  const sb_status s = sb_run(text.c_str(), &out);
  if (s != SB_OK) {
    std::cerr << "error: " << sb_last_error() << "\n";
    return exit_code(s);
  }
  const std::string summary = take(out);
  const Json j = Json::parse(summary);
  if (j["command"] == "calibrate") {
    const Json& d = j["details"];
    std::cerr << "temperature " << d["temperature"].get<double>() << ", ECE " << d["ece_before"].get<double>()
              << " -> " << d["ece_after"].get<double>() << "\n";
  }
  for (const auto& w : j["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  std::cout << summary << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Destructive text transformations and robustness reports for text classifiers", "saladbench"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;

  app.add_option("--config", f.config, "JSON run config")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "Run seed");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--dataset", f.dataset, "Dataset file");
  app.add_option("--validation", f.validation, "Validation file (otherwise a holdout split)");
  app.add_option("--format", f.format, "tsv or jsonl");
  app.add_option("--task", f.task, "single or pair");
  app.add_option("--labels", f.labels, "Label names in index order")->delimiter(',');
  app.add_option("--default-label", f.default_label, "Label expected for copy transforms");
  app.add_option("--holdout", f.holdout, "Share of the dataset held out for evaluation");
  app.add_option("--provider", f.provider, "embedded, replay or http");
  app.add_option("--location", f.location, "Params file, prediction file or base URL");
  app.add_option("--saliency", f.saliency, "Replay saliency file");
  app.add_flag("--supports-saliency", f.supports_saliency, "HTTP provider serves saliency");
  app.add_option("--epochs", f.epochs, "Training epochs of the embedded model");
  app.add_option("--lr", f.learning_rate, "Learning rate of the embedded model");
  app.add_option("--loss", f.loss, "cross_entropy, label_smoothing or focal");
  app.add_flag("--print-config", f.print_config, "Print the resolved config and exit");

  auto* transform = app.add_subcommand("transform", "Write transformed copies of a dataset");
  transform->add_option("--transforms", f.transforms, "Comma-separated kinds or 'all'");

  auto* evaluate = app.add_subcommand("evaluate", "Agreement and confidence report");
  evaluate->add_option("--transforms", f.transforms, "Comma-separated kinds or 'all'");

  app.add_subcommand("train", "Train the embedded classifier");
  app.add_subcommand("calibrate", "Fit a temperature and report ECE");

  auto* mitigate = app.add_subcommand("mitigate", "Train and score an invalid-input detector");
  mitigate->add_option("--strategy", f.strategy, "threshold, entropic-threshold or invalid-class");
  mitigate->add_option("--transforms", f.transforms, "Comma-separated kinds or 'all'");
  mitigate->add_option("--entropy-weight", f.entropy_weight, "Entropy weight");
  mitigate->add_option("--augment-fraction", f.augment_fraction, "Share of examples augmented");
  mitigate->add_option("--threshold", f.threshold, "Fixed threshold instead of the grid search");
  mitigate->add_flag("--transfer", f.transfer, "Also write the transfer matrix");
  mitigate->add_flag("--penalize-invalid-entropy", f.penalize_invalid_entropy,
                     "Add the entropy term instead of subtracting it");

  auto* pbsmt = app.add_subcommand("pbsmt", "Train or apply phrase-based generators");
  pbsmt->require_subcommand(1);
  auto* pbsmt_train = pbsmt->add_subcommand("train", "Train generators");
  pbsmt_train->add_option("--label", f.label, "Label index or name (default: all labels)");
  auto* pbsmt_generate = pbsmt->add_subcommand("generate", "Write the pbsmt transformed file");
  pbsmt_generate->add_option("--models", f.models, "Directory written by 'pbsmt train'");

  auto* report = app.add_subcommand("report", "Render a report.json as CSV and Markdown");
  report->add_option("--input", f.input, "report.json to render");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::string command;
  std::optional<std::string> action;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  if (command == "pbsmt") action = pbsmt_train->parsed() ? "train" : "generate";

  Json config;
  try {
    config = build_config(f, command, action);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return run(config, f.print_config);
}

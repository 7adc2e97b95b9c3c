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

// Run configurations and the commands behind the command-line tool.
//
// A run config is a JSON object. Missing fields take the defaults returned by
// default_run_config(); unknown fields are rejected. Every command writes the
// resolved config to <out>/config.json before producing anything else, and
// stamps its artifacts with the config hash and seed.

#ifndef SALADBENCH_CORE_PIPELINE_HPP_
#define SALADBENCH_CORE_PIPELINE_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace saladbench {

inline constexpr std::string_view kCommands[] = {
    "transform", "evaluate", "train", "calibrate", "mitigate", "pbsmt", "report",
};

// The full default config as pretty-printed JSON.
std::string default_run_config();

// Merges `config_json` over the defaults and validates the result. Throws
// ConfigError on unknown keys, wrong types or invalid values.
std::string resolve_run_config(const std::string& config_json);

// FNV-1a over the canonical resolved config, excluding the output directory.
std::string config_hash(const std::string& resolved_json);

// Runs the configured command and returns a JSON summary: the command, the
// output directory, the artifacts written, warnings and command-specific
// figures.
std::string run_command(const std::string& config_json);

}  // namespace saladbench

#endif  // SALADBENCH_CORE_PIPELINE_HPP_

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

#ifndef SALADBENCH_CORE_ERRORS_HPP_
#define SALADBENCH_CORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace saladbench {

// Error categories. The numeric values double as CLI exit codes, except
// kRuntime which the CLI reports as a data error.
enum class ErrorKind {
  kConfig = 1,    // bad arguments, unsupported transform for the task shape
  kData = 2,      // malformed files, degenerate inputs, insufficient data
  kProvider = 3,  // prediction provider transport or contract violations
  kRuntime = 4,   // training divergence and other numerical failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

// An input too small or empty for the requested operation.
class DegenerateInputError : public DataError {
 public:
  explicit DegenerateInputError(const std::string& what) : DataError(what) {}
};

// The transform is not defined for this task shape (e.g. copysort on a
// single-text task).
class UnsupportedTransformError : public ConfigError {
 public:
  explicit UnsupportedTransformError(const std::string& what)
      : ConfigError(what) {}
};

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& what)
      : Error(ErrorKind::kProvider, what) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what)
      : Error(ErrorKind::kRuntime, what) {}
};

}  // namespace saladbench

#endif  // SALADBENCH_CORE_ERRORS_HPP_

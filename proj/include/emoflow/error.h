//
// Copyright 2026 The emoflow Authors
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
//

#ifndef EMOFLOW_ERROR_H_
#define EMOFLOW_ERROR_H_

#include <stdexcept>
#include <string>

namespace emoflow {

// Failure classes; the CLI maps each to its own exit code.
enum class ErrorKind {
  kConfig,
  kData,
  kTranslation,
  kTraining,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::kConfig, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorKind::kData, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorKind::kIo, message) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& message)
      : Error(ErrorKind::kTraining, message) {}
};

}  // namespace emoflow

#endif  // EMOFLOW_ERROR_H_

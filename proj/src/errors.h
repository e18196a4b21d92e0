// Copyright 2026 The evsound Authors
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

#ifndef EVSOUND_ERRORS_H_
#define EVSOUND_ERRORS_H_

#include <stdexcept>
#include <string>

namespace evsound {

// Status codes shared with the C API and the CLI exit codes.
enum class Status : int {
  kOk = 0,
  kError = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericError = 4,
};

class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(Status::kConfigError, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(Status::kDataError, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(Status::kNumericError, what) {}
};

}  // namespace evsound

#endif  // EVSOUND_ERRORS_H_

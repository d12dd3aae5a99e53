// Copyright 2026 The invio Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace invio {

/// Root of every error thrown by the library. `kind()` gives a stable
/// machine-readable class used by the CLI to pick an exit code.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    kInvalidArgument,
    kStateCorruption,
    kNumericDomain,
    kNumeric,
    kDegenerateGeometry,
    kConvergence,
    kCheirality,
    kParse,
    kData,
    kInsufficientData,
    kTrainingDiverged,
    kConfig,
    kIo,
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

#define INVIO_DEFINE_ERROR(Name, K)                                        \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(Kind::K, what) {}       \
  };

INVIO_DEFINE_ERROR(InvalidArgument, kInvalidArgument)
INVIO_DEFINE_ERROR(StateCorruption, kStateCorruption)
INVIO_DEFINE_ERROR(NumericError, kNumeric)
INVIO_DEFINE_ERROR(DegenerateGeometry, kDegenerateGeometry)
INVIO_DEFINE_ERROR(ConvergenceError, kConvergence)
INVIO_DEFINE_ERROR(CheiralityError, kCheirality)
INVIO_DEFINE_ERROR(DataError, kData)
INVIO_DEFINE_ERROR(InsufficientData, kInsufficientData)
INVIO_DEFINE_ERROR(ConfigError, kConfig)
INVIO_DEFINE_ERROR(IoError, kIo)

#undef INVIO_DEFINE_ERROR

/// Log-branch failure while rolling out kinematics; carries the step index.
class NumericDomainError : public Error {
 public:
  NumericDomainError(const std::string& what, long step)
      : Error(Kind::kNumericDomain, what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Malformed text input; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, long line, const std::string& what)
      : Error(Kind::kParse, source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(int epoch, const std::string& what)
      : Error(Kind::kTrainingDiverged, "training diverged at epoch " + std::to_string(epoch) + ": " + what),
        epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace invio

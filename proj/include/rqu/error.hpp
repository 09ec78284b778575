// Copyright 2026 The RQU Model Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace rqu {

/// Process exit codes used by the command-line front end. Every library
/// error type maps onto exactly one of these.
enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kUnsupportedRegime = 3,
  kConvergence = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kInternal; }
};

/// A physical parameter violates a domain invariant (non-positive rate,
/// Q_b <= 1/2, ...). The message names the violated invariant.
class ParameterError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

/// Malformed or inconsistent configuration (unknown JSON keys, bad sweep
/// grid, simulation step too coarse, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

/// Caller asked for a quantity outside the regime in which the linearized
/// model was derived (detuned single-tone budget, omega not << kappa/2).
class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override {
    return ExitCode::kUnsupportedRegime;
  }
};

/// Flux too close to an odd multiple of Phi0/2 where the SQUID inductance
/// diverges.
class SingularityError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// A fit cannot be posed on the supplied data (too few points, degenerate
/// sweep).
class FitDomainError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kConvergence; }
};

class ResourceError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kConvergence; }
};

/// Throws ParameterError(what) unless cond holds.
inline void require(bool cond, const std::string& what) {
  if (!cond) throw ParameterError(what);
}

}  // namespace rqu

// Copyright 2026 The qlmp Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qlmp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel failed to converge within its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Unknown builtin name or missing entry.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A configuration value violates a precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File-system failure while persisting or reading run artefacts.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The exponent guard tripped while evaluating a functional.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::size_t node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}

  [[nodiscard]] std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

}  // namespace qlmp

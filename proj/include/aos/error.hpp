// Copyright 2026 The aoscnn Authors.
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

namespace aos {

enum class ErrorKind {
  Usage,       // bad flags or configuration values
  Io,          // file missing or unreadable
  Parse,       // malformed input text or bytes
  Validation,  // well-formed input violating a domain invariant
  Index,       // id outside the embedding table
  Shape,       // tensor shapes disagree
  Domain,      // argument outside a function's domain
  EmptyInput,  // zero-length sentence or map
  Numerical,   // gradient check above tolerance
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit status for an error surfaced by the command-line tool:
// 1 usage/config, 2 validation, 3 numerical-check failure.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Io:
      return 1;
    case ErrorKind::Numerical:
      return 3;
    default:
      return 2;
  }
}

}  // namespace aos

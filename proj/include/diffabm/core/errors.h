// Copyright 2026 The DiffABM Authors
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

#ifndef DIFFABM_CORE_ERRORS_H_
#define DIFFABM_CORE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace diffabm {

enum class ErrorKind {
  kConfig,           // unresolved names, unknown keys, invalid parameters
  kValidation,       // size mismatches and malformed inputs caught before a run
  kRuntimeState,     // a substep produced an invalid state
  kContract,         // a caller violated an operation precondition
  kPartition,        // archetype predicates do not partition the population
  kIngestion,        // malformed observed-data file
  kIo,               // filesystem failures
  kProvider,         // behavior provider failed after its retry budget
  kIncompleteShares, // reconstruct() called without a full share set
  kProtocolAbort,    // secure session aborted
  kInternal,         // broken internal invariant
};

const char* ErrorKindName(ErrorKind kind);

// Process exit code for the command-line tool: 2 config, 3 runtime, 4 abort.
int ExitCodeFor(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& message);

// Throws kContract with `message` when `condition` is false.
inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorKind::kContract, message);
}

}  // namespace diffabm

#endif  // DIFFABM_CORE_ERRORS_H_

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

#include "diffabm/core/errors.h"

namespace diffabm {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config error";
    case ErrorKind::kValidation:
      return "validation error";
    case ErrorKind::kRuntimeState:
      return "runtime state error";
    case ErrorKind::kContract:
      return "contract error";
    case ErrorKind::kPartition:
      return "partition error";
    case ErrorKind::kIngestion:
      return "ingestion error";
    case ErrorKind::kIo:
      return "I/O error";
    case ErrorKind::kProvider:
      return "provider error";
    case ErrorKind::kIncompleteShares:
      return "incomplete share set";
    case ErrorKind::kProtocolAbort:
      return "protocol abort";
    case ErrorKind::kInternal:
      return "internal error";
  }
  return "error";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kValidation:
    case ErrorKind::kPartition:
    case ErrorKind::kIngestion:
      return 2;
    case ErrorKind::kProtocolAbort:
      return 4;
    default:
      return 3;
  }
}

void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(ErrorKindName(kind)) + ": " + message);
}

}  // namespace diffabm

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

#include "diffabm/autodiff/reparam.h"

#include <string>

namespace diffabm::ad {

SamplingMode ParseSamplingMode(std::string_view name) {
  if (name == "hard") return SamplingMode::kHard;
  if (name == "relaxed" || name == "soft") return SamplingMode::kRelaxed;
  if (name == "straight-through") return SamplingMode::kStraightThrough;
  if (name == "expected") return SamplingMode::kExpected;
  Fail(ErrorKind::kConfig, "unknown sampling mode '" + std::string(name) + "'");
}

std::string_view SamplingModeName(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::kHard:
      return "hard";
    case SamplingMode::kRelaxed:
      return "relaxed";
    case SamplingMode::kStraightThrough:
      return "straight-through";
    case SamplingMode::kExpected:
      return "expected";
  }
  return "hard";
}

}  // namespace diffabm::ad

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

#ifndef DIFFABM_CORE_ENV_STATE_H_
#define DIFFABM_CORE_ENV_STATE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diffabm/core/errors.h"

namespace diffabm {

// Environment e(t): named scalars (e.g. "dt") and vectors plus the step index.
struct EnvState {
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> vectors;
  int64_t step_index = 0;

  double Scalar(const std::string& name) const {
    auto it = scalars.find(name);
    if (it == scalars.end()) {
      Fail(ErrorKind::kConfig, "environment has no scalar '" + name + "'");
    }
    return it->second;
  }
  double ScalarOr(const std::string& name, double fallback) const {
    auto it = scalars.find(name);
    return it == scalars.end() ? fallback : it->second;
  }
};

}  // namespace diffabm

#endif  // DIFFABM_CORE_ENV_STATE_H_

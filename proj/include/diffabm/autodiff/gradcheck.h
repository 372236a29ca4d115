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

#ifndef DIFFABM_AUTODIFF_GRADCHECK_H_
#define DIFFABM_AUTODIFF_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "diffabm/autodiff/tape.h"

namespace diffabm::ad {

struct GradientCheck {
  std::vector<double> reverse;      // tape gradient
  std::vector<double> finite_diff;  // central differences
  double max_relative_error = 0.0;  // max_k |ad - fd| / max(1, |fd|)
};

// Compares reverse-mode gradients of `f` against central finite differences.
// `f` must be callable with both `const std::vector<Var>&` and
// `const std::vector<double>&` and be deterministic (common random numbers).
template <typename F>
GradientCheck CheckGradient(F&& f, const std::vector<double>& inputs,
                            double eps) {
  GradientCheck result;
  {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      vars.push_back(tape.Input("x" + std::to_string(k), inputs[k]));
    }
    const Var out = f(vars);
    result.reverse = tape.Backward(out);
  }
  std::vector<double> x = inputs;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    x[k] = inputs[k] + eps;
    const double up = f(x);
    x[k] = inputs[k] - eps;
    const double down = f(x);
    x[k] = inputs[k];
    const double fd = (up - down) / (2.0 * eps);
    result.finite_diff.push_back(fd);
    result.max_relative_error =
        std::max(result.max_relative_error,
                 std::abs(result.reverse[k] - fd) / std::max(1.0, std::abs(fd)));
  }
  return result;
}

}  // namespace diffabm::ad

#endif  // DIFFABM_AUTODIFF_GRADCHECK_H_

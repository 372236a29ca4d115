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

#include "diffabm/calibration/objective.h"

namespace diffabm::calib {
namespace {

template <int N>
LossGradient ForwardWith(Objective& objective, std::span<const double> theta,
                         uint64_t seed) {
  std::vector<ad::Dual<N>> x;
  x.reserve(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    x.push_back(ad::Dual<N>::Seeded(theta[k], static_cast<int>(k)));
  }
  const ad::Dual<N> out =
      objective.Loss(std::span<const ad::Dual<N>>(x), seed);
  LossGradient result;
  result.loss = out.v;
  result.gradient.assign(out.d.begin(), out.d.begin() + theta.size());
  return result;
}

}  // namespace

SimulationObjective::SimulationObjective(
    std::shared_ptr<const SimulationSetup> setup,
    std::vector<std::string> theta_names,
    std::map<std::string, std::vector<double>> observed)
    : setup_(std::move(setup)),
      names_(std::move(theta_names)),
      observed_(std::move(observed)),
      sampling_(setup_->sampling) {
  if (observed_.empty()) Fail(ErrorKind::kConfig, "no observed streams");
  for (const auto& [metric, y] : observed_) {
    if (static_cast<int64_t>(y.size()) > setup_->steps) {
      Fail(ErrorKind::kValidation,
           "observed stream '" + metric + "' is longer than the simulation");
    }
    if (y.empty()) {
      Fail(ErrorKind::kValidation, "observed stream '" + metric + "' is empty");
    }
  }
}

LossGradient ForwardLossGradient(Objective& objective,
                                 std::span<const double> theta, uint64_t seed) {
  if (theta.size() <= 1) return ForwardWith<1>(objective, theta, seed);
  if (theta.size() <= 4) return ForwardWith<4>(objective, theta, seed);
  if (theta.size() <= 32) return ForwardWith<32>(objective, theta, seed);
  Fail(ErrorKind::kContract, "forward mode supports at most 32 parameters");
}

}  // namespace diffabm::calib

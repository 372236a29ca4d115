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

#ifndef DIFFABM_TESTS_SUPPORT_RECOVERY_BENCHMARK_H_
#define DIFFABM_TESTS_SUPPORT_RECOVERY_BENCHMARK_H_

// Synthetic beta recovery: observed new infections come from a hard-mode run
// at beta* = 0.3 on 10,000 agents for 30 steps, then the posterior network
// is fitted for 500 steps.

#include <memory>
#include <vector>

#include "diffabm/calibration/calibrator.h"
#include "support/seirm_fixture.h"

namespace diffabm::testing {

struct RecoveryResult {
  double posterior_mean = 0.0;
  std::vector<double> losses;
};

inline constexpr double kRecoveryBetaStar = 0.3;

inline RecoveryResult RunRecoveryBenchmark(uint64_t seed) {
  const uint32_t n = 10000;
  auto setup = std::make_shared<calib::SimulationSetup>();
  setup->graph = ContactGraph(n);
  setup->graph.AddLayerFromEdges("l", RandomEdges(n, 5 * n, seed));
  setup->state0 = SeirmPopulation(n, FirstAgents(100), setup->disease);
  setup->env0 = UnitEnv();
  setup->pipeline = epi::DefaultSeirmPipeline({"l"}, false);
  setup->steps = 30;
  setup->sampling = {ad::SamplingMode::kStraightThrough, 0.5};

  const std::vector<double> star = {kRecoveryBetaStar};
  const auto observed =
      calib::RunSetup<double>(*setup, {"beta"}, std::span<const double>(star),
                              seed + 1000, {ad::SamplingMode::kHard, 0.5})
          .Values("new_infections");
  calib::SimulationObjective objective(setup, {"beta"},
                                       {{"new_infections", observed}});

  ThetaVector bounds;
  bounds.Add("beta", 0.5, 0.0, 1.0);
  calib::CalibConfig config;
  config.steps = 500;
  config.adam.learning_rate = 0.01;
  config.seed = seed;
  config.sim_seed = seed + 1000;
  calib::Calibrator calibrator(config, calib::PosteriorNet(config.net, bounds),
                               objective);
  RecoveryResult result;
  for (int s = 0; s < config.steps; ++s) {
    result.losses.push_back(calibrator.ServerStep({}).loss);
  }
  const auto draws = calibrator.SampleTheta({}, 1000, 1u << 20);
  for (const auto& t : draws) result.posterior_mean += t[0];
  result.posterior_mean /= static_cast<double>(draws.size());
  return result;
}

// Whether the `window`-step moving average never increases.
inline bool MovingAverageNonIncreasing(const std::vector<double>& losses,
                                       std::size_t window) {
  if (losses.size() <= window) return true;
  double sum = 0;
  for (std::size_t i = 0; i < window; ++i) sum += losses[i];
  double previous = sum / window;
  for (std::size_t i = window; i < losses.size(); ++i) {
    sum += losses[i] - losses[i - window];
    const double current = sum / window;
    if (current > previous) return false;
    previous = current;
  }
  return true;
}

}  // namespace diffabm::testing

#endif  // DIFFABM_TESTS_SUPPORT_RECOVERY_BENCHMARK_H_

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

#ifndef DIFFABM_IO_SCENARIO_H_
#define DIFFABM_IO_SCENARIO_H_

// Runnable model assembled from a SimConfig, and the run modes on top of it.

#include <memory>
#include <string>
#include <vector>

#include "diffabm/calibration/objective.h"
#include "diffabm/io/config.h"
#include "diffabm/sensitivity/sensitivity.h"

namespace diffabm::io {

struct Scenario {
  std::unique_ptr<behavior::LineTransport> transport;  // external provider
  std::unique_ptr<behavior::BehaviorProvider> provider;
  std::shared_ptr<calib::SimulationSetup> setup;
};

// Population and network are drawn from `seed`. The external provider's
// child process starts on first use.
Scenario BuildScenario(const SimConfig& config, uint64_t seed);

std::unique_ptr<behavior::BehaviorProvider> MakeProvider(
    const ProviderSpec& spec,
    std::unique_ptr<behavior::LineTransport>& transport);

Trajectory<double> Simulate(const Scenario& scenario, uint64_t seed,
                            const ad::SamplingSpec& sampling);

// Current disease values of the named parameters, with their natural bounds.
ThetaVector DiseaseTheta(const epi::DiseaseParams& disease,
                         const std::vector<std::string>& names);

struct AnalyzeResult {
  Trajectory<double> trajectory;
  SensitivityReport report;  // partials of each metric's run total
};

AnalyzeResult Analyze(const Scenario& scenario, const AnalyzeSpec& spec,
                      const epi::DiseaseParams& disease, uint64_t seed,
                      const ad::SamplingSpec& sampling);

struct CalibrationResult {
  std::vector<std::string> parameters;
  std::vector<calib::StepOutcome> steps;
  std::vector<std::vector<double>> posterior;
};

// Observed series are read relative to `base_dir`.
CalibrationResult Calibrate(const Scenario& scenario,
                            const CalibrationSpec& spec,
                            const std::string& base_dir);

// Runs the decentralized protocol over a simulated network. Throws kConfig
// when the scenario has behavior archetypes.
Trajectory<double> SimulateSecure(const Scenario& scenario,
                                  const SimConfig& config, uint64_t seed);

}  // namespace diffabm::io

#endif  // DIFFABM_IO_SCENARIO_H_

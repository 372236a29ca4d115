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

#ifndef DIFFABM_SENSITIVITY_SENSITIVITY_H_
#define DIFFABM_SENSITIVITY_SENSITIVITY_H_

// Local sensitivities dM/dtheta read off a tape retained from a
// differentiable run. No simulation is executed.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diffabm/autodiff/tape.h"
#include "diffabm/core/simulation.h"
#include "diffabm/core/theta.h"

namespace diffabm {

struct NamedNode {
  std::string name;
  ad::NodeId node = ad::kNoNode;  // kNoNode marks a constant metric
};

struct SensitivityReport {
  std::vector<std::string> metrics;
  std::vector<std::string> parameters;
  std::vector<std::vector<double>> partials;  // [metric][parameter]
  uint64_t simulations_consumed = 0;

  // Throws kConfig for unknown names.
  double Get(const std::string& metric, const std::string& parameter) const;
};

// One reverse sweep per metric. Throws kContract for a metric or parameter
// node that is not on the tape.
SensitivityReport Sensitivities(const ad::Tape& tape,
                                std::span<const NamedNode> metrics,
                                std::span<const NamedNode> parameters);

// A differentiable run whose tape is kept for later analysis. The tape is
// heap-allocated so the trajectory's handles survive moves.
struct RecordedRun {
  std::unique_ptr<ad::Tape> tape;
  std::vector<NamedNode> parameters;
  Trajectory<ad::Var> trajectory;

  // For each metric, one node per step named "<metric>[t]" and the
  // cumulative sum named "<metric>.total" (recorded on demand).
  std::vector<NamedNode> MetricNodes(const std::vector<std::string>& metrics);
};

// Registers every theta entry as a tape input and runs the simulation on
// the tape.
RecordedRun RecordRun(const SubstepRegistry<ad::Var>& registry,
                      const std::vector<SubstepSpec>& pipeline,
                      const ThetaVector& theta, const AgentStateTable& state0,
                      const EnvState& env0, const ContactGraph& graph,
                      const RunOptions& options);

}  // namespace diffabm

#endif  // DIFFABM_SENSITIVITY_SENSITIVITY_H_

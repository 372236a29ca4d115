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

#ifndef DIFFABM_EPI_SEIRM_H_
#define DIFFABM_EPI_SEIRM_H_

// SEIRM disease model. Every agent carries a probability mass over disease
// stages: "mass.S", "mass.E<k>" (exposed, k steps left), "mass.I<k>"
// (infectious, k steps left), "mass.R" and "mass.M". In hard mode the masses
// are exact one-hot vectors; in relaxed mode they are soft, which is what
// makes trajectories differentiable. The categorical columns disease_state
// and state_timer always hold the most likely stage.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "diffabm/core/simulation.h"

namespace diffabm::epi {

enum DiseaseState : int32_t { kS = 0, kE = 1, kI = 2, kR = 3, kM = 4 };

inline const std::vector<std::string>& DiseaseStateDomain() {
  static const std::vector<std::string> domain = {"S", "E", "I", "R", "M"};
  return domain;
}

inline const std::vector<std::string>& FlagDomain() {
  static const std::vector<std::string> domain = {"no", "yes"};
  return domain;
}

struct DiseaseParams {
  double beta = 0.0;
  int exposed_steps = 3;
  int infectious_steps = 5;
  double mortality_prob = 0.02;
  double vaccine_efficacy = 0.0;
  double vaccination_coverage = 0.0;  // per step

  // Throws kConfig for negative beta, durations < 1 or probabilities outside
  // [0, 1].
  void Validate() const;
};

std::string StageColumn(DiseaseState state, int steps_left = 0);

// p = 1 - exp(-(beta * S_i * dt / n_i) * infected_sum); 0 when n_i == 0.
// The decentralized protocol calls the same function so hard-mode decisions
// agree bit for bit with the centralized run.
template <ad::Scalar Real>
Real InfectionProbability(const Real& beta, const Real& susceptibility,
                          double dt, uint32_t degree,
                          const Real& infected_sum) {
  if (degree == 0) return Real(0.0);
  const Real rate = beta * susceptibility * Real(dt) / Real(double(degree));
  return -ad::Expm1(-(rate * infected_sum));
}

// Adds the stage-mass columns (and, when absent, susceptibility, vaccinated
// and isolating) derived from disease_state and state_timer. A timer of 0
// for an E or I agent means the full stage duration.
template <ad::Scalar Real>
void InitializeDiseaseColumns(BasicStateTable<Real>& state,
                              const DiseaseParams& params);

// Writes the most likely stage of every active agent into disease_state and
// state_timer.
template <ad::Scalar Real>
void SyncDiseaseState(BasicStateTable<Real>& state, const DiseaseParams& params,
                      std::span<const uint8_t> active = {});

// Per-agent infectious mass (sum of the I stages).
template <ad::Scalar Real>
std::vector<Real> InfectiousMass(const BasicStateTable<Real>& state,
                                 const DiseaseParams& params);

// Per-agent 0/1 mask of agents that take part in a layer's transmission:
// everyone, or non-isolating agents if the layer honours isolation.
template <ad::Scalar Real>
std::vector<uint8_t> TransmissionMask(const BasicStateTable<Real>& state,
                                      const GraphLayer& layer);

// Compartment totals S, E, I, R, M. They sum to N.
template <ad::Scalar Real>
std::array<Real, 5> ComputeAggregates(const BasicStateTable<Real>& state,
                                      const DiseaseParams& params);

// Registers transitions "seirm.progression", "seirm.vaccination" and
// "seirm.transmission" plus the SEIRM aggregate function. Parameters named
// beta, mortality_prob and vaccine_efficacy in the run's ParameterSet
// override the values in `params`.
template <ad::Scalar Real>
void RegisterSeirm(SubstepRegistry<Real>& registry,
                   const DiseaseParams& params);

// progression, vaccination, then one transmission substep per layer.
std::vector<SubstepSpec> DefaultSeirmPipeline(
    const std::vector<std::string>& layers, bool with_vaccination);

// Metric names emitted by the SEIRM aggregate function.
const std::vector<std::string>& SeirmMetrics();

}  // namespace diffabm::epi

#endif  // DIFFABM_EPI_SEIRM_H_

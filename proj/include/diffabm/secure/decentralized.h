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

#ifndef DIFFABM_SECURE_DECENTRALIZED_H_
#define DIFFABM_SECURE_DECENTRALIZED_H_

// SEIRM run as a network of agent nodes. Each node holds only its own row of
// the state; neighbour infection totals arrive through secure neighbourhood
// sums and the daily aggregates are revealed through secure sums. Random
// streams are keyed exactly as in RunSimulation with the default SEIRM
// pipeline, so hard-mode runs reproduce the centralized trajectory.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diffabm/epi/seirm.h"
#include "diffabm/secure/ring.h"
#include "diffabm/secure/transport.h"

namespace diffabm::secure {

struct DecentralizedConfig {
  epi::DiseaseParams disease;
  std::vector<std::string> layers;  // transmission order
  bool with_vaccination = false;
  ad::SamplingSpec sampling{ad::SamplingMode::kHard, 0.5};
  uint64_t seed = 0;           // agent-keyed simulation streams
  uint64_t protocol_seed = 0;  // share randomness
  double dt = 1.0;
  // Codec for neighbourhood sums and revealed aggregates. Hard-mode values
  // are integers and round-trip exactly at any precision.
  int fractional_bits = 16;
};

template <ad::Scalar Real>
struct AgentNode {
  uint32_t id = 0;
  // Stage masses: S, E1..E_de, I1..I_di, R, M.
  std::vector<Real> mass;
  Real susceptibility = Real(1.0);
  bool isolating = false;
  bool vaccinated = false;
  // This node's share of the last step's new infections and deaths.
  Real new_infections = Real(0.0);
  Real new_deaths = Real(0.0);
};

// Revealed aggregates of one step, keyed like the SEIRM aggregate function
// (S, E, I, R, M, new_infections, new_deaths, new_vaccinations).
using RevealedAggregates = std::map<std::string, double>;

template <ad::Scalar Real>
class DecentralizedSeirm {
 public:
  // `initial` must already carry the SEIRM columns. Layers must be
  // unweighted so neighbour sums stay integral in hard mode; weighted
  // layers throw kConfig. Parameters beta, mortality_prob and
  // vaccine_efficacy in `params` override the disease defaults.
  DecentralizedSeirm(DecentralizedConfig config,
                     const BasicStateTable<Real>& initial,
                     const ContactGraph& graph, ParameterSet<Real> params);

  // One step at `step_index`. Every node updates locally from secure
  // neighbourhood sums, then the aggregates are revealed. On
  // kProtocolAbort no node's state changes.
  RevealedAggregates Step(SimulatedNetwork& network, int64_t step_index);

  const std::vector<AgentNode<Real>>& nodes() const { return nodes_; }
  uint64_t sessions_used() const { return next_session_; }

 private:
  std::vector<Real> NeighborSums(const GraphLayer& layer,
                                 const std::vector<Real>& values,
                                 SimulatedNetwork& network);
  double Reveal(std::span<const double> values, SimulatedNetwork& network);

  DecentralizedConfig config_;
  const ContactGraph& graph_;
  ParameterSet<Real> params_;
  FixedPointCodec codec_;
  std::vector<AgentNode<Real>> nodes_;
  uint64_t next_session_ = 0;
};

// Securely summed local gradients, decoded.
struct AggregatedGradient {
  double value = 0.0;
  // Nodes whose gradient exceeded the codec range and was clamped; the
  // flags are secure-summed as well.
  uint64_t saturated_nodes = 0;
};

AggregatedGradient SecureGradientAggregation(
    std::span<const double> local_gradients, const FixedPointCodec& codec,
    SimulatedNetwork& network, uint64_t first_session, uint64_t seed);

}  // namespace diffabm::secure

#endif  // DIFFABM_SECURE_DECENTRALIZED_H_

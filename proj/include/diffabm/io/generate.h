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

#ifndef DIFFABM_IO_GENERATE_H_
#define DIFFABM_IO_GENERATE_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "diffabm/core/contact_graph.h"
#include "diffabm/io/config.h"

namespace diffabm::io {

using Edge = std::pair<uint32_t, uint32_t>;

// Agents with every declared property drawn from its distribution, SEIRM
// columns initialised, and `initial_infected` distinct agents infectious.
// Throws kConfig when a distribution does not sum to 1 within 1e-9.
AgentStateTable GeneratePopulation(const PopulationSpec& spec,
                                   const epi::DiseaseParams& disease,
                                   uint64_t seed);

// Disjoint complete blocks of consecutive ids; the last may be smaller.
std::vector<Edge> HouseholdEdges(uint32_t n, uint32_t household_size);

// Ring lattice of degree 2k; each lattice edge (i, i + j) has its far end
// moved with probability p to a uniform node that is neither i nor already
// adjacent to i.
std::vector<Edge> SmallWorldEdges(uint32_t n, uint32_t k, double p,
                                  uint64_t seed);

std::vector<Edge> CompleteGraphEdges(uint32_t n);

// Validates parameters (kConfig) and dispatches to the generators above.
std::vector<Edge> GenerateLayerEdges(const LayerSpec& spec, uint32_t n,
                                     uint64_t seed);

ContactGraph GenerateNetwork(const std::vector<LayerSpec>& layers, uint32_t n,
                             uint64_t seed);

}  // namespace diffabm::io

#endif  // DIFFABM_IO_GENERATE_H_

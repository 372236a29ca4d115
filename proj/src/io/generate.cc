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

#include "diffabm/io/generate.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "diffabm/core/rng.h"

namespace diffabm::io {
namespace {

constexpr std::size_t kMaxCompleteEdges = 50'000'000;

uint32_t UniformBelow(CounterRng& rng, uint32_t bound) {
  return std::uniform_int_distribution<uint32_t>(0, bound - 1)(rng);
}

void CheckDistribution(const PropertySpec& p) {
  if (p.categories.empty()) {
    Fail(ErrorKind::kConfig, "property '" + p.name + "' has no categories");
  }
  double total = 0.0;
  for (const auto& c : p.categories) {
    if (!(c.weight >= 0.0)) {
      Fail(ErrorKind::kConfig, "property '" + p.name + "' has a negative weight");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(ErrorKind::kConfig, "property '" + p.name + "' weights sum to " +
                                 std::to_string(total) + ", not 1");
  }
}

bool Adjacent(const std::vector<std::vector<uint32_t>>& adj, uint32_t a,
              uint32_t b) {
  return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
}

void Unlink(std::vector<std::vector<uint32_t>>& adj, uint32_t a, uint32_t b) {
  auto drop = [](std::vector<uint32_t>& list, uint32_t v) {
    list.erase(std::find(list.begin(), list.end(), v));
  };
  drop(adj[a], b);
  drop(adj[b], a);
}

}  // namespace

AgentStateTable GeneratePopulation(const PopulationSpec& spec,
                                   const epi::DiseaseParams& disease,
                                   uint64_t seed) {
  if (spec.size < 1 || spec.size > UINT32_MAX) {
    Fail(ErrorKind::kConfig, "population size must lie in [1, 2^32)");
  }
  if (spec.initial_infected > spec.size) {
    Fail(ErrorKind::kConfig, "initial_infected exceeds the population size");
  }
  const auto n = static_cast<uint32_t>(spec.size);
  AgentStateTable state(n);

  for (const PropertySpec& p : spec.properties) {
    CheckDistribution(p);
    std::vector<std::string> labels;
    std::vector<double> cdf;
    double acc = 0.0;
    for (const auto& c : p.categories) {
      labels.push_back(c.label);
      acc += c.weight;
      cdf.push_back(acc);
    }
    CounterRng rng(seed, {0, 0, StreamTag("population/" + p.name)});
    std::vector<int32_t> codes(n);
    for (uint32_t i = 0; i < n; ++i) {
      const double u = rng.Uniform() * acc;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      codes[i] = static_cast<int32_t>(
          std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
    }
    state.AddCategorical(p.name,
                         p.dynamic ? ColumnRole::kDynamic : ColumnRole::kStatic,
                         std::move(labels), std::move(codes));
  }

  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  std::vector<uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  CounterRng rng(seed, {0, 0, StreamTag("population/infected")});
  std::vector<int32_t> disease_state(n, epi::kS);
  for (uint64_t k = 0; k < spec.initial_infected; ++k) {
    const uint32_t j =
        static_cast<uint32_t>(k) + UniformBelow(rng, n - static_cast<uint32_t>(k));
    std::swap(ids[k], ids[j]);
    disease_state[ids[k]] = epi::kI;
  }
  state.AddCategorical("disease_state", ColumnRole::kDynamic,
                       epi::DiseaseStateDomain(), std::move(disease_state));
  epi::InitializeDiseaseColumns(state, disease);
  return state;
}

std::vector<Edge> HouseholdEdges(uint32_t n, uint32_t household_size) {
  if (household_size < 1) {
    Fail(ErrorKind::kConfig, "household_size must be >= 1");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (household_size - 1) / 2);
  for (uint32_t start = 0; start < n; start += household_size) {
    const uint32_t end = std::min<uint64_t>(uint64_t{start} + household_size, n);
    for (uint32_t a = start; a < end; ++a) {
      for (uint32_t b = a + 1; b < end; ++b) edges.emplace_back(a, b);
    }
  }
  return edges;
}

std::vector<Edge> SmallWorldEdges(uint32_t n, uint32_t k, double p,
                                  uint64_t seed) {
  if (k < 1) Fail(ErrorKind::kConfig, "small-world k must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) {
    Fail(ErrorKind::kConfig, "small-world rewire_p must lie in [0, 1]");
  }
  if (uint64_t{n} <= 2 * uint64_t{k}) {
    Fail(ErrorKind::kConfig, "small-world needs more than 2k agents, got " +
                                 std::to_string(n) + " for k = " +
                                 std::to_string(k));
  }
  std::vector<std::vector<uint32_t>> adj(n);
  for (uint32_t i = 0; i < n; ++i) {
    adj[i].reserve(2 * k + 2);
    for (uint32_t j = 1; j <= k; ++j) {
      const uint32_t b = (i + j) % n;
      adj[i].push_back(b);
      adj[b].push_back(i);
    }
  }
  CounterRng rng(seed, {0, 0, StreamTag("network/small-world")});
  for (uint32_t j = 1; j <= k; ++j) {
    for (uint32_t i = 0; i < n; ++i) {
      const uint32_t b = (i + j) % n;
      if (rng.Uniform() >= p) continue;
      if (!Adjacent(adj, i, b) || adj[i].size() + 1 >= n) continue;
      uint32_t w;
      do {
        w = UniformBelow(rng, n);
      } while (w == i || Adjacent(adj, i, w));
      Unlink(adj, i, b);
      adj[i].push_back(w);
      adj[w].push_back(i);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * k);
  for (uint32_t a = 0; a < n; ++a) {
    for (uint32_t b : adj[a]) {
      if (a < b) edges.emplace_back(a, b);
    }
  }
  return edges;
}

std::vector<Edge> CompleteGraphEdges(uint32_t n) {
  if (uint64_t{n} * (n - (n > 0)) / 2 > kMaxCompleteEdges) {
    Fail(ErrorKind::kConfig, "complete graph on " + std::to_string(n) +
                                 " agents is too large");
  }
  std::vector<Edge> edges;
  edges.reserve(uint64_t{n} * (n - (n > 0)) / 2);
  for (uint32_t a = 0; a < n; ++a) {
    for (uint32_t b = a + 1; b < n; ++b) edges.emplace_back(a, b);
  }
  return edges;
}

std::vector<Edge> GenerateLayerEdges(const LayerSpec& spec, uint32_t n,
                                     uint64_t seed) {
  try {
    switch (spec.generator) {
      case NetworkGenerator::kHouseholdBlocks:
        return HouseholdEdges(n, spec.household_size);
      case NetworkGenerator::kSmallWorld:
        return SmallWorldEdges(n, spec.k, spec.rewire_p, seed);
      case NetworkGenerator::kComplete:
        return CompleteGraphEdges(n);
    }
  } catch (const Error& e) {
    Fail(e.kind(), "layer '" + spec.name + "': " + e.what());
  }
  Fail(ErrorKind::kInternal, "unhandled network generator");
}

ContactGraph GenerateNetwork(const std::vector<LayerSpec>& layers, uint32_t n,
                             uint64_t seed) {
  ContactGraph graph(n);
  for (const LayerSpec& spec : layers) {
    const uint64_t layer_seed =
        seed ^ (uint64_t{StreamTag("network/" + spec.name)} << 32);
    const auto edges = GenerateLayerEdges(spec, n, layer_seed);
    graph.AddLayerFromEdges(spec.name, edges, spec.honors_isolation);
  }
  return graph;
}

}  // namespace diffabm::io

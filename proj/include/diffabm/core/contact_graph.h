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

#ifndef DIFFABM_CORE_CONTACT_GRAPH_H_
#define DIFFABM_CORE_CONTACT_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diffabm/autodiff/scalar.h"
#include "diffabm/core/errors.h"

namespace diffabm {

// One interaction layer in compressed-row form. Rows are stored in canonical
// (sorted) neighbour order, so any permutation of a row's input edges yields
// the same layer.
struct GraphLayer {
  std::string name;
  std::vector<uint64_t> offsets;   // num_agents + 1
  std::vector<uint32_t> neighbors;
  std::vector<double> weights;     // empty, or one per neighbour entry
  bool honors_isolation = false;

  std::size_t num_agents() const { return offsets.size() - 1; }
  std::size_t num_entries() const { return neighbors.size(); }
  uint32_t degree(std::size_t i) const {
    return static_cast<uint32_t>(offsets[i + 1] - offsets[i]);
  }
  std::span<const uint32_t> row(std::size_t i) const {
    return {neighbors.data() + offsets[i], degree(i)};
  }
  bool weighted() const { return !weights.empty(); }
  double weight(uint64_t entry) const {
    return weights.empty() ? 1.0 : weights[entry];
  }
};

class ContactGraph {
 public:
  ContactGraph() = default;
  explicit ContactGraph(std::size_t num_agents) : num_agents_(num_agents) {}

  // Validates and canonicalises a compressed-row layer. Throws kValidation on
  // non-monotone offsets, wrong lengths or out-of-range neighbour ids, and
  // kConfig on duplicate layer names.
  void AddLayer(std::string name, std::vector<uint64_t> offsets,
                std::vector<uint32_t> neighbors,
                std::vector<double> weights = {},
                bool honors_isolation = false);

  // Builds a symmetric layer from an undirected edge list.
  void AddLayerFromEdges(std::string name,
                         std::span<const std::pair<uint32_t, uint32_t>> edges,
                         bool honors_isolation = false);

  std::size_t num_agents() const { return num_agents_; }
  const std::vector<GraphLayer>& layers() const { return layers_; }
  bool HasLayer(std::string_view name) const;
  // Throws kConfig for an unknown layer.
  const GraphLayer& layer(std::string_view name) const;

  std::size_t num_entries() const;
  std::size_t MemoryBytes() const;

 private:
  std::size_t num_agents_ = 0;
  std::vector<GraphLayer> layers_;
};

enum class Reduction { kSum, kMean, kMax };

Reduction ParseReduction(std::string_view name);

// Per-agent reduction of neighbour values over one layer. When `include` is
// non-empty only neighbours with include[j] != 0 send messages, and for kMean
// the divisor counts only those neighbours. Empty neighbourhoods yield 0.
template <typename Real>
std::vector<Real> AggregateMessages(const GraphLayer& layer,
                                    std::span<const Real> values,
                                    Reduction reduction,
                                    std::span<const uint8_t> include = {}) {
  const std::size_t n = layer.num_agents();
  if (values.size() != n) {
    Fail(ErrorKind::kValidation, "aggregate values length " +
                                     std::to_string(values.size()) +
                                     " != agents " + std::to_string(n));
  }
  const bool masked = !include.empty();
  std::vector<Real> out(n, Real(0.0));
  ad::Accumulator<Real> acc;
  for (std::size_t i = 0; i < n; ++i) {
    const uint64_t begin = layer.offsets[i];
    const uint64_t end = layer.offsets[i + 1];
    if (reduction == Reduction::kMax) {
      bool any = false;
      Real best(0.0);
      for (uint64_t e = begin; e < end; ++e) {
        const uint32_t j = layer.neighbors[e];
        if (masked && !include[j]) continue;
        const Real msg = layer.weighted() ? Real(layer.weights[e]) * values[j]
                                          : values[j];
        best = any ? ad::Max(best, msg) : msg;
        any = true;
      }
      out[i] = best;
      continue;
    }
    acc.Clear();
    uint32_t count = 0;
    for (uint64_t e = begin; e < end; ++e) {
      const uint32_t j = layer.neighbors[e];
      if (masked && !include[j]) continue;
      if (layer.weighted()) {
        acc.Add(values[j], layer.weights[e]);
      } else {
        acc.Add(values[j]);
      }
      ++count;
    }
    if (count == 0) continue;
    out[i] = acc.Result();
    if (reduction == Reduction::kMean) out[i] = out[i] / Real(count);
  }
  return out;
}

template <typename Real>
std::vector<Real> AggregateMessages(const ContactGraph& graph,
                                    std::string_view layer,
                                    std::span<const Real> values,
                                    Reduction reduction,
                                    std::span<const uint8_t> include = {}) {
  return AggregateMessages(graph.layer(layer), values, reduction, include);
}

// Number of neighbours j with include[j] != 0 (all neighbours if empty).
std::vector<uint32_t> EffectiveDegrees(const GraphLayer& layer,
                                       std::span<const uint8_t> include = {});

}  // namespace diffabm

#endif  // DIFFABM_CORE_CONTACT_GRAPH_H_

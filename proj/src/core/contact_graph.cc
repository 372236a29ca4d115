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

#include "diffabm/core/contact_graph.h"

#include <algorithm>
#include <numeric>

namespace diffabm {

void ContactGraph::AddLayer(std::string name, std::vector<uint64_t> offsets,
                            std::vector<uint32_t> neighbors,
                            std::vector<double> weights,
                            bool honors_isolation) {
  if (HasLayer(name)) Fail(ErrorKind::kConfig, "duplicate layer '" + name + "'");
  if (offsets.size() != num_agents_ + 1) {
    Fail(ErrorKind::kValidation, "layer '" + name + "' has " +
                                     std::to_string(offsets.size()) +
                                     " row offsets, expected " +
                                     std::to_string(num_agents_ + 1));
  }
  if (offsets.front() != 0 || offsets.back() != neighbors.size()) {
    Fail(ErrorKind::kValidation,
         "layer '" + name + "' offsets do not span the neighbour array");
  }
  for (std::size_t i = 0; i < num_agents_; ++i) {
    if (offsets[i + 1] < offsets[i]) {
      Fail(ErrorKind::kValidation, "layer '" + name +
                                       "' offsets decrease at row " +
                                       std::to_string(i));
    }
  }
  for (uint32_t j : neighbors) {
    if (j >= num_agents_) {
      Fail(ErrorKind::kValidation, "layer '" + name + "' neighbour id " +
                                       std::to_string(j) + " >= " +
                                       std::to_string(num_agents_));
    }
  }
  if (!weights.empty() && weights.size() != neighbors.size()) {
    Fail(ErrorKind::kValidation,
         "layer '" + name + "' needs one weight per neighbour entry");
  }

  // Canonical row order.
  std::vector<uint32_t> order;
  for (std::size_t i = 0; i < num_agents_; ++i) {
    const uint64_t begin = offsets[i];
    const uint64_t end = offsets[i + 1];
    if (end - begin < 2) continue;
    if (weights.empty()) {
      std::sort(neighbors.begin() + begin, neighbors.begin() + end);
      continue;
    }
    order.resize(end - begin);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      const auto ka = std::pair(neighbors[begin + a], weights[begin + a]);
      const auto kb = std::pair(neighbors[begin + b], weights[begin + b]);
      return ka < kb;
    });
    std::vector<uint32_t> n2(order.size());
    std::vector<double> w2(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      n2[k] = neighbors[begin + order[k]];
      w2[k] = weights[begin + order[k]];
    }
    std::copy(n2.begin(), n2.end(), neighbors.begin() + begin);
    std::copy(w2.begin(), w2.end(), weights.begin() + begin);
  }

  layers_.push_back(GraphLayer{std::move(name), std::move(offsets),
                               std::move(neighbors), std::move(weights),
                               honors_isolation});
}

void ContactGraph::AddLayerFromEdges(
    std::string name, std::span<const std::pair<uint32_t, uint32_t>> edges,
    bool honors_isolation) {
  std::vector<uint64_t> offsets(num_agents_ + 1, 0);
  for (const auto& [a, b] : edges) {
    if (a >= num_agents_ || b >= num_agents_) {
      Fail(ErrorKind::kValidation, "edge endpoint out of range in layer '" +
                                       name + "'");
    }
    ++offsets[a + 1];
    ++offsets[b + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<uint32_t> neighbors(offsets.back());
  std::vector<uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [a, b] : edges) {
    neighbors[cursor[a]++] = b;
    neighbors[cursor[b]++] = a;
  }
  AddLayer(std::move(name), std::move(offsets), std::move(neighbors), {},
           honors_isolation);
}

bool ContactGraph::HasLayer(std::string_view name) const {
  return std::any_of(layers_.begin(), layers_.end(),
                     [&](const GraphLayer& l) { return l.name == name; });
}

const GraphLayer& ContactGraph::layer(std::string_view name) const {
  for (const auto& l : layers_) {
    if (l.name == name) return l;
  }
  Fail(ErrorKind::kConfig, "unknown layer '" + std::string(name) + "'");
}

std::size_t ContactGraph::num_entries() const {
  std::size_t total = 0;
  for (const auto& l : layers_) total += l.num_entries();
  return total;
}

std::size_t ContactGraph::MemoryBytes() const {
  std::size_t bytes = 0;
  for (const auto& l : layers_) {
    bytes += l.offsets.capacity() * sizeof(uint64_t) +
             l.neighbors.capacity() * sizeof(uint32_t) +
             l.weights.capacity() * sizeof(double);
  }
  return bytes;
}

Reduction ParseReduction(std::string_view name) {
  if (name == "sum") return Reduction::kSum;
  if (name == "mean") return Reduction::kMean;
  if (name == "max") return Reduction::kMax;
  Fail(ErrorKind::kConfig, "unknown reduction '" + std::string(name) + "'");
}

std::vector<uint32_t> EffectiveDegrees(const GraphLayer& layer,
                                       std::span<const uint8_t> include) {
  const std::size_t n = layer.num_agents();
  std::vector<uint32_t> degrees(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (include.empty()) {
      degrees[i] = layer.degree(i);
      continue;
    }
    uint32_t count = 0;
    for (uint32_t j : layer.row(i)) count += include[j] ? 1 : 0;
    degrees[i] = count;
  }
  return degrees;
}

}  // namespace diffabm

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

#include "diffabm/core/simulation.h"

#include <atomic>

namespace diffabm {
namespace {

std::atomic<uint64_t> simulation_count{0};

}  // namespace

uint64_t SimulationCount() { return simulation_count.load(); }

void CountSimulation() { simulation_count.fetch_add(1); }

}  // namespace diffabm

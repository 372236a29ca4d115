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

#ifndef DIFFABM_SECURE_SHARING_H_
#define DIFFABM_SECURE_SHARING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "diffabm/core/rng.h"
#include "diffabm/secure/ring.h"

namespace diffabm::secure {

// s_ij: the share of node i's secret held by node j.
struct Share {
  uint32_t origin = 0;
  uint32_t holder = 0;
  RingElement value = 0;
};

// One share per holder. All but the last are uniform draws from `rng`; the
// last is the secret minus their sum. Throws kContract for no holders.
std::vector<Share> ShareSecret(RingElement secret, uint32_t origin,
                               std::span<const uint32_t> holders,
                               CounterRng& rng);

// Modular sum of exactly one share per expected holder. Throws
// kIncompleteShares when a holder's share is missing and kContract for
// duplicates or unexpected holders.
RingElement Reconstruct(std::span<const Share> shares,
                        std::span<const uint32_t> holders);

// Plain modular sum.
RingElement RingSum(std::span<const RingElement> values);

}  // namespace diffabm::secure

#endif  // DIFFABM_SECURE_SHARING_H_

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

#include "diffabm/secure/sharing.h"

#include <string>

#include "diffabm/core/errors.h"

namespace diffabm::secure {

std::vector<Share> ShareSecret(RingElement secret, uint32_t origin,
                               std::span<const uint32_t> holders,
                               CounterRng& rng) {
  Require(!holders.empty(), "sharing needs at least one party");
  std::vector<Share> shares;
  shares.reserve(holders.size());
  RingElement sum = 0;
  for (std::size_t k = 0; k + 1 < holders.size(); ++k) {
    const RingElement r = rng.NextU64();
    sum += r;
    shares.push_back({origin, holders[k], r});
  }
  shares.push_back({origin, holders.back(), secret - sum});
  return shares;
}

RingElement Reconstruct(std::span<const Share> shares,
                        std::span<const uint32_t> holders) {
  std::vector<uint8_t> seen(holders.size(), 0);
  RingElement sum = 0;
  for (const Share& s : shares) {
    std::size_t k = 0;
    while (k < holders.size() && holders[k] != s.holder) ++k;
    Require(k < holders.size(),
            "share from unexpected holder " + std::to_string(s.holder));
    Require(!seen[k], "duplicate share from holder " + std::to_string(s.holder));
    seen[k] = 1;
    sum += s.value;
  }
  for (std::size_t k = 0; k < holders.size(); ++k) {
    if (!seen[k]) {
      Fail(ErrorKind::kIncompleteShares,
           "missing share from holder " + std::to_string(holders[k]));
    }
  }
  return sum;
}

RingElement RingSum(std::span<const RingElement> values) {
  RingElement sum = 0;
  for (RingElement v : values) sum += v;
  return sum;
}

}  // namespace diffabm::secure

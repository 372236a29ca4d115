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

#include "diffabm/secure/session.h"

#include <algorithm>
#include <map>
#include <string>

#include "diffabm/core/errors.h"

namespace diffabm::secure {

SecureSession::SecureSession(uint64_t session_id,
                             std::vector<uint32_t> participants,
                             SimulatedNetwork& network, uint64_t seed)
    : id_(session_id),
      participants_(std::move(participants)),
      network_(network),
      seed_(seed) {
  Require(!participants_.empty(), "session needs at least one participant");
  auto sorted = participants_;
  std::sort(sorted.begin(), sorted.end());
  Require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "duplicate session participant");
}

void SecureSession::Enter(Phase phase) {
  phase_ = phase;
  history_.push_back(phase);
}

void SecureSession::Abort(const std::string& why) {
  Enter(Phase::kAborted);
  Fail(ErrorKind::kProtocolAbort,
       "session " + std::to_string(id_) + " aborted: " + why);
}

RingElement SecureSession::Run(std::span<const RingElement> secrets,
                               std::span<const uint32_t> recipients) {
  Require(phase_ == Phase::kSharing, "session already ran");
  Require(secrets.size() == participants_.size(),
          "one secret per participant required");
  for (uint32_t r : recipients) {
    Require(std::find(participants_.begin(), participants_.end(), r) !=
                participants_.end(),
            "recipient " + std::to_string(r) + " is not a participant");
  }
  const std::size_t n = participants_.size();
  std::map<uint32_t, std::vector<Share>> held;

  for (std::size_t p = 0; p < n; ++p) {
    const uint32_t origin = participants_[p];
    if (!network_.online(origin)) continue;
    CounterRng rng(seed_, StreamKey{origin, static_cast<uint32_t>(id_),
                                    StreamTag("secure.share") ^
                                        static_cast<uint32_t>(id_ >> 32)});
    for (const Share& s :
         ShareSecret(secrets[p], origin, participants_, rng)) {
      if (s.holder == origin) {
        held[origin].push_back({origin, origin, s.value});
        continue;
      }
      network_.Send(origin, s.holder,
                    EncodeWire({WireType::kShare, id_, origin, s.holder,
                                s.value}));
    }
  }
  for (auto& [to, frames] : network_.DeliverAll()) {
    for (const Frame& f : frames) {
      const WireMessage m = DecodeWire(f);
      if (m.type != WireType::kShare || m.session != id_ || m.holder != to) {
        Abort("unexpected message during sharing");
      }
      held[to].push_back({m.holder, m.origin, m.value});
    }
  }

  // Every participant must hold one share from every origin.
  std::map<uint32_t, RingElement> partial;
  for (uint32_t k : participants_) {
    if (!network_.online(k)) Abort("node " + std::to_string(k) + " dropped");
    try {
      // Shares are indexed by origin here, so reuse Reconstruct's
      // completeness check with origins in the holder slot.
      partial[k] = Reconstruct(held[k], participants_);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kIncompleteShares) throw;
      Abort(e.what());
    }
  }
  Enter(Phase::kPartialSum);

  std::map<uint32_t, std::vector<Share>> sigmas;
  for (uint32_t k : participants_) {
    for (uint32_t r : recipients) {
      if (r == k) {
        sigmas[r].push_back({k, k, partial[k]});
        continue;
      }
      network_.Send(k, r,
                    EncodeWire({WireType::kPartialSum, id_, k, r, partial[k]}));
    }
  }
  for (auto& [to, frames] : network_.DeliverAll()) {
    for (const Frame& f : frames) {
      const WireMessage m = DecodeWire(f);
      if (m.type != WireType::kPartialSum || m.session != id_ ||
          m.holder != to) {
        Abort("unexpected message during partial-sum exchange");
      }
      sigmas[to].push_back({m.holder, m.origin, m.value});
    }
  }
  Enter(Phase::kReconstruction);

  std::optional<RingElement> total;
  for (uint32_t r : recipients) {
    RingElement sum = 0;
    try {
      sum = Reconstruct(sigmas[r], participants_);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kIncompleteShares) throw;
      Abort(e.what());
    }
    Require(!total || *total == sum, "recipients disagree on the total");
    total = sum;
  }
  Enter(Phase::kDone);
  return total.value_or(0);
}

RingElement SecureSum(std::span<const RingElement> secrets,
                      SimulatedNetwork& network, uint64_t session_id,
                      uint64_t seed) {
  std::vector<uint32_t> nodes(secrets.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i] = static_cast<uint32_t>(i);
  }
  SecureSession session(session_id, nodes, network, seed);
  return session.Run(secrets, nodes);
}

std::vector<RingElement> SecureNeighborhoodSums(
    const GraphLayer& layer, std::span<const RingElement> values,
    SimulatedNetwork& network, uint64_t first_session, uint64_t seed) {
  const std::size_t n = layer.num_agents();
  if (values.size() != n) {
    Fail(ErrorKind::kValidation, "one value per node required");
  }
  std::vector<RingElement> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = layer.row(i);
    if (row.empty()) continue;
    std::map<uint32_t, RingElement> multiplicity;
    for (uint32_t j : row) multiplicity[j] += 1;
    const auto self = static_cast<uint32_t>(i);
    std::vector<uint32_t> parties;
    std::vector<RingElement> secrets;
    if (!multiplicity.contains(self)) {
      parties.push_back(self);
      secrets.push_back(0);
    }
    for (const auto& [j, count] : multiplicity) {
      parties.push_back(j);
      secrets.push_back(values[j] * count);
    }
    SecureSession session(first_session + i, parties, network, seed);
    const uint32_t recipient[] = {self};
    out[i] = session.Run(secrets, recipient);
  }
  return out;
}

}  // namespace diffabm::secure

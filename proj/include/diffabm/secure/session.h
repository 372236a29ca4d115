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

#ifndef DIFFABM_SECURE_SESSION_H_
#define DIFFABM_SECURE_SESSION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "diffabm/core/contact_graph.h"
#include "diffabm/secure/sharing.h"
#include "diffabm/secure/transport.h"

namespace diffabm::secure {

enum class Phase { kSharing, kPartialSum, kReconstruction, kDone, kAborted };

// One additive-sharing sum among `participants`:
//   sharing:        node i splits its secret and sends s_ij to every j;
//   partial sum:    node k adds what it holds, sigma_k = sum_i s_ik, and
//                   sends sigma_k to every recipient;
//   reconstruction: recipients add all sigma_k.
// Only the recipients learn the total. Share randomness for node i comes
// from (seed, i, session id).
class SecureSession {
 public:
  SecureSession(uint64_t session_id, std::vector<uint32_t> participants,
                SimulatedNetwork& network, uint64_t seed);

  // `secrets` is parallel to the participants; every recipient must be a
  // participant. Throws kProtocolAbort if any share or partial sum is lost
  // (a node dropped out), leaving the session in kAborted.
  RingElement Run(std::span<const RingElement> secrets,
                  std::span<const uint32_t> recipients);

  Phase phase() const { return phase_; }
  // Phases entered, in order.
  const std::vector<Phase>& history() const { return history_; }
  uint64_t id() const { return id_; }

 private:
  void Enter(Phase phase);
  [[noreturn]] void Abort(const std::string& why);

  uint64_t id_;
  std::vector<uint32_t> participants_;
  SimulatedNetwork& network_;
  uint64_t seed_;
  Phase phase_ = Phase::kSharing;
  std::vector<Phase> history_ = {Phase::kSharing};
};

// Sum of every participant's secret, revealed to all of them.
RingElement SecureSum(std::span<const RingElement> secrets,
                      SimulatedNetwork& network, uint64_t session_id,
                      uint64_t seed);

// Node i learns sum_{j in N(i)} values[j] (neighbour multiplicity counted)
// from a session over N(i) and i, in which i contributes 0 and is the only
// recipient. Empty neighbourhoods yield 0 without any messages. Session ids
// are first_session + i. A node with a single neighbour learns that
// neighbour's value exactly.
std::vector<RingElement> SecureNeighborhoodSums(
    const GraphLayer& layer, std::span<const RingElement> values,
    SimulatedNetwork& network, uint64_t first_session, uint64_t seed);

}  // namespace diffabm::secure

#endif  // DIFFABM_SECURE_SESSION_H_

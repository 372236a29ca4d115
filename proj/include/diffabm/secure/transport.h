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

#ifndef DIFFABM_SECURE_TRANSPORT_H_
#define DIFFABM_SECURE_TRANSPORT_H_

// Simulated network for the sharing protocol. Frames are bytes in the wire
// format below so an out-of-process transport can stand in unchanged.
//
// Frame (all integers little-endian):
//   offset 0   u32  payload length, always 25
//   offset 4   u8   message type (1 = share, 2 = partial sum)
//   offset 5   u64  session id
//   offset 13  u32  origin node
//   offset 17  u32  holder node
//   offset 21  u64  ring value

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "diffabm/secure/ring.h"

namespace diffabm::secure {

enum class WireType : uint8_t { kShare = 1, kPartialSum = 2 };

struct WireMessage {
  WireType type = WireType::kShare;
  uint64_t session = 0;
  uint32_t origin = 0;
  uint32_t holder = 0;
  RingElement value = 0;

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

inline constexpr std::size_t kWirePayloadBytes = 25;
inline constexpr std::size_t kWireFrameBytes = 4 + kWirePayloadBytes;

using Frame = std::vector<uint8_t>;

Frame EncodeWire(const WireMessage& message);
// Throws kValidation for a wrong length prefix, size or type byte.
WireMessage DecodeWire(std::span<const uint8_t> frame);

struct SentFrame {
  uint32_t from = 0;
  uint32_t to = 0;
  Frame frame;
};

// Per-link FIFO queues. Delivery picks the next non-empty link at random
// from a seeded stream, so links interleave arbitrarily but each link keeps
// its order. Frames from or to an offline node are dropped.
class SimulatedNetwork {
 public:
  explicit SimulatedNetwork(uint64_t delivery_seed = 0)
      : delivery_seed_(delivery_seed) {}

  void Send(uint32_t from, uint32_t to, Frame frame);
  // Empties every queue; returns each recipient's frames in arrival order.
  std::map<uint32_t, std::vector<Frame>> DeliverAll();

  void SetOnline(uint32_t node, bool online);
  bool online(uint32_t node) const { return !offline_.contains(node); }

  void set_record_transcript(bool on) { record_ = on; }
  const std::vector<SentFrame>& transcript() const { return transcript_; }
  void ClearTranscript() { transcript_.clear(); }
  uint64_t frames_sent() const { return frames_sent_; }

 private:
  uint64_t delivery_seed_;
  uint64_t delivery_round_ = 0;
  std::map<std::pair<uint32_t, uint32_t>, std::deque<Frame>> links_;
  std::set<uint32_t> offline_;
  bool record_ = false;
  std::vector<SentFrame> transcript_;
  uint64_t frames_sent_ = 0;
};

}  // namespace diffabm::secure

#endif  // DIFFABM_SECURE_TRANSPORT_H_

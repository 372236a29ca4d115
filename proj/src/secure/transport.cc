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

#include "diffabm/secure/transport.h"

#include "diffabm/core/errors.h"
#include "diffabm/core/rng.h"

namespace diffabm::secure {
namespace {

template <typename T>
void Put(Frame& out, T v) {
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<uint8_t>(v >> (8 * b)));
  }
}

template <typename T>
T Get(std::span<const uint8_t> in, std::size_t offset) {
  T v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    v |= static_cast<T>(in[offset + b]) << (8 * b);
  }
  return v;
}

}  // namespace

Frame EncodeWire(const WireMessage& m) {
  Frame out;
  out.reserve(kWireFrameBytes);
  Put<uint32_t>(out, kWirePayloadBytes);
  Put<uint8_t>(out, static_cast<uint8_t>(m.type));
  Put<uint64_t>(out, m.session);
  Put<uint32_t>(out, m.origin);
  Put<uint32_t>(out, m.holder);
  Put<uint64_t>(out, m.value);
  return out;
}

WireMessage DecodeWire(std::span<const uint8_t> frame) {
  if (frame.size() != kWireFrameBytes ||
      Get<uint32_t>(frame, 0) != kWirePayloadBytes) {
    Fail(ErrorKind::kValidation, "malformed frame of " +
                                     std::to_string(frame.size()) + " bytes");
  }
  const uint8_t type = frame[4];
  if (type != static_cast<uint8_t>(WireType::kShare) &&
      type != static_cast<uint8_t>(WireType::kPartialSum)) {
    Fail(ErrorKind::kValidation,
         "unknown message type " + std::to_string(type));
  }
  WireMessage m;
  m.type = static_cast<WireType>(type);
  m.session = Get<uint64_t>(frame, 5);
  m.origin = Get<uint32_t>(frame, 13);
  m.holder = Get<uint32_t>(frame, 17);
  m.value = Get<uint64_t>(frame, 21);
  return m;
}

void SimulatedNetwork::Send(uint32_t from, uint32_t to, Frame frame) {
  if (!online(from) || !online(to)) return;
  ++frames_sent_;
  if (record_) transcript_.push_back({from, to, frame});
  links_[{from, to}].push_back(std::move(frame));
}

std::map<uint32_t, std::vector<Frame>> SimulatedNetwork::DeliverAll() {
  std::map<uint32_t, std::vector<Frame>> inbox;
  std::vector<std::pair<const std::pair<uint32_t, uint32_t>, std::deque<Frame>>*>
      open;
  for (auto& entry : links_) {
    if (!entry.second.empty()) open.push_back(&entry);
  }
  CounterRng rng(delivery_seed_,
                 StreamKey{static_cast<uint32_t>(delivery_round_),
                           static_cast<uint32_t>(delivery_round_ >> 32),
                           StreamTag("secure.delivery")});
  ++delivery_round_;
  while (!open.empty()) {
    const std::size_t k = rng.NextU64() % open.size();
    auto& [link, queue] = *open[k];
    inbox[link.second].push_back(std::move(queue.front()));
    queue.pop_front();
    if (queue.empty()) {
      open[k] = open.back();
      open.pop_back();
    }
  }
  links_.clear();
  return inbox;
}

void SimulatedNetwork::SetOnline(uint32_t node, bool online) {
  if (online) {
    offline_.erase(node);
  } else {
    offline_.insert(node);
  }
}

}  // namespace diffabm::secure

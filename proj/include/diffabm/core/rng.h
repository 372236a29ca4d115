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

#ifndef DIFFABM_CORE_RNG_H_
#define DIFFABM_CORE_RNG_H_

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace diffabm {

// Philox4x32-10 block function (Salmon et al., Random123).
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// 32-bit FNV-1a; used to turn substep names into stream tags.
constexpr uint32_t StreamTag(std::string_view name) {
  uint32_t h = 2166136261u;
  for (char c : name) {
    h ^= static_cast<uint8_t>(c);
    h *= 16777619u;
  }
  return h;
}

// Identifies one independent random stream. For agent draws this is
// (agent id, step, substep tag); other subsystems use their own tags.
struct StreamKey {
  uint32_t entity = 0;
  uint32_t step = 0;
  uint32_t tag = 0;
};

// Counter-based generator: every draw is a pure function of
// (seed, key, draw index), so results do not depend on the order in which
// streams are consumed.
class CounterRng {
 public:
  using result_type = uint64_t;

  CounterRng(uint64_t seed, StreamKey key)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        stream_(key) {}

  uint64_t NextU64();

  // Uniform on the open interval (0, 1); safe to pass to log().
  double Uniform() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double Normal();

  // Logistic(0, 1) noise log(1-u) - log(u).
  double Logistic();

  // Gumbel(0, 1) noise -log(-log u).
  double Gumbel();

  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() {
    return std::numeric_limits<uint64_t>::max();
  }
  uint64_t operator()() { return NextU64(); }

 private:
  std::array<uint32_t, 2> key_;
  StreamKey stream_;
  uint32_t block_ = 0;
  std::array<uint32_t, 4> buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
};

}  // namespace diffabm

#endif  // DIFFABM_CORE_RNG_H_

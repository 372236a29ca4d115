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

#ifndef DIFFABM_SECURE_RING_H_
#define DIFFABM_SECURE_RING_H_

#include <cstdint>
#include <optional>

namespace diffabm::secure {

// Residue modulo 2^64. Native unsigned arithmetic wraps, which is exactly
// the ring operation.
using RingElement = uint64_t;

// Reals as ring elements: round(v * 2^f), negatives in two's complement.
class FixedPointCodec {
 public:
  // Throws kConfig unless 0 <= fractional_bits <= 52.
  explicit FixedPointCodec(int fractional_bits = 16);

  int fractional_bits() const { return bits_; }
  // Largest magnitude that encodes without saturating: 2^(62 - f).
  double max_magnitude() const { return max_; }

  // nullopt for non-finite or out-of-range values.
  std::optional<RingElement> Encode(double v) const;
  // Clamps to +-max_magnitude (NaN encodes as 0) and sets
  // *saturated when that happened.
  RingElement EncodeClamped(double v, bool* saturated) const;
  double Decode(RingElement r) const;

 private:
  int bits_;
  double scale_;
  double max_;
};

}  // namespace diffabm::secure

#endif  // DIFFABM_SECURE_RING_H_

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

#include "diffabm/secure/ring.h"

#include <cmath>

#include "diffabm/core/errors.h"

namespace diffabm::secure {

FixedPointCodec::FixedPointCodec(int fractional_bits)
    : bits_(fractional_bits),
      scale_(std::ldexp(1.0, fractional_bits)),
      max_(std::ldexp(1.0, 62 - fractional_bits)) {
  if (fractional_bits < 0 || fractional_bits > 52) {
    Fail(ErrorKind::kConfig, "fractional bits must lie in [0, 52]");
  }
}

std::optional<RingElement> FixedPointCodec::Encode(double v) const {
  if (!std::isfinite(v) || std::abs(v) >= max_) return std::nullopt;
  return static_cast<RingElement>(std::llround(v * scale_));
}

RingElement FixedPointCodec::EncodeClamped(double v, bool* saturated) const {
  if (auto r = Encode(v)) return *r;
  if (saturated != nullptr) *saturated = true;
  if (std::isnan(v)) return 0;
  const double limit = std::nextafter(max_, 0.0);
  return static_cast<RingElement>(std::llround((v > 0 ? limit : -limit) * scale_));
}

double FixedPointCodec::Decode(RingElement r) const {
  return static_cast<double>(static_cast<int64_t>(r)) / scale_;
}

}  // namespace diffabm::secure

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

#ifndef DIFFABM_AUTODIFF_DUAL_H_
#define DIFFABM_AUTODIFF_DUAL_H_

#include <array>

namespace diffabm::ad {

// Forward-mode number carrying N directional derivatives alongside the
// value. Dual<N> with unit tangents on N parameters yields N Jacobian columns
// from one evaluation.
template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit constants
  Dual(double value, const std::array<double, N>& tangent)
      : v(value), d(tangent) {}

  double value() const { return v; }

  static Dual Seeded(double value, int direction) {
    Dual x(value);
    x.d[direction] = 1.0;
    return x;
  }

  // Returns a Dual with the same tangent scaled by `k` and value `value`.
  Dual Chain(double value, double k) const {
    Dual out(value);
    for (int i = 0; i < N; ++i) out.d[i] = k * d[i];
    return out;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator-(const Dual& a) { return a.Chain(-a.v, -1.0); }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual out(a.v * b.v);
    for (int i = 0; i < N; ++i) out.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return out;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const double q = a.v / b.v;
    Dual out(q);
    for (int i = 0; i < N; ++i) out.d[i] = (a.d[i] - q * b.d[i]) / b.v;
    return out;
  }
};

}  // namespace diffabm::ad

#endif  // DIFFABM_AUTODIFF_DUAL_H_

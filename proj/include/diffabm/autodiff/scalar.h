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

#ifndef DIFFABM_AUTODIFF_SCALAR_H_
#define DIFFABM_AUTODIFF_SCALAR_H_

// Uniform math vocabulary over the three scalar types the simulation is
// instantiated with: double (plain evaluation), Dual<N> (forward mode) and
// Var (reverse mode on a Tape).

#include <cmath>
#include <type_traits>

#include "diffabm/autodiff/dual.h"
#include "diffabm/autodiff/tape.h"

namespace diffabm::ad {

template <typename T>
struct IsDual : std::false_type {};
template <int N>
struct IsDual<Dual<N>> : std::true_type {};

template <typename Real>
concept Scalar = std::is_same_v<Real, double> || std::is_same_v<Real, Var> ||
                 IsDual<Real>::value;

inline double ValueOf(double x) { return x; }
inline double ValueOf(const Var& x) { return x.value(); }
template <int N>
double ValueOf(const Dual<N>& x) {
  return x.v;
}

inline double StableSigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// double
inline double Exp(double x) { return std::exp(x); }
inline double Log(double x) { return std::log(x); }
inline double Expm1(double x) { return std::expm1(x); }
inline double Log1p(double x) { return std::log1p(x); }
inline double Sigmoid(double x) { return StableSigmoid(x); }
inline double Tanh(double x) { return std::tanh(x); }
inline double Sqrt(double x) { return std::sqrt(x); }

// Var
inline Var Exp(const Var& x) {
  const double e = std::exp(x.value());
  return Unary(x, OpKind::kExp, e, e);
}
inline Var Log(const Var& x) {
  return Unary(x, OpKind::kLog, std::log(x.value()), 1.0 / x.value());
}
inline Var Expm1(const Var& x) {
  return Unary(x, OpKind::kExpm1, std::expm1(x.value()), std::exp(x.value()));
}
inline Var Log1p(const Var& x) {
  return Unary(x, OpKind::kLog1p, std::log1p(x.value()),
               1.0 / (1.0 + x.value()));
}
inline Var Sigmoid(const Var& x) {
  const double s = StableSigmoid(x.value());
  return Unary(x, OpKind::kSigmoid, s, s * (1.0 - s));
}
inline Var Tanh(const Var& x) {
  const double t = std::tanh(x.value());
  return Unary(x, OpKind::kTanh, t, 1.0 - t * t);
}
inline Var Sqrt(const Var& x) {
  const double r = std::sqrt(x.value());
  return Unary(x, OpKind::kSqrt, r, 0.5 / r);
}

// Dual
template <int N>
Dual<N> Exp(const Dual<N>& x) {
  const double e = std::exp(x.v);
  return x.Chain(e, e);
}
template <int N>
Dual<N> Log(const Dual<N>& x) {
  return x.Chain(std::log(x.v), 1.0 / x.v);
}
template <int N>
Dual<N> Expm1(const Dual<N>& x) {
  return x.Chain(std::expm1(x.v), std::exp(x.v));
}
template <int N>
Dual<N> Log1p(const Dual<N>& x) {
  return x.Chain(std::log1p(x.v), 1.0 / (1.0 + x.v));
}
template <int N>
Dual<N> Sigmoid(const Dual<N>& x) {
  const double s = StableSigmoid(x.v);
  return x.Chain(s, s * (1.0 - s));
}
template <int N>
Dual<N> Tanh(const Dual<N>& x) {
  const double t = std::tanh(x.v);
  return x.Chain(t, 1.0 - t * t);
}
template <int N>
Dual<N> Sqrt(const Dual<N>& x) {
  const double r = std::sqrt(x.v);
  return x.Chain(r, 0.5 / r);
}

// Clamps the value into [lo, hi]; outside the interval the result is a
// constant and carries no derivative.
template <Scalar Real>
Real Clamp(const Real& x, double lo, double hi) {
  const double v = ValueOf(x);
  if (v < lo) return Real(lo);
  if (v > hi) return Real(hi);
  return x;
}

// Larger of two values; the derivative follows the selected operand.
template <Scalar Real>
Real Max(const Real& a, const Real& b) {
  return ValueOf(b) > ValueOf(a) ? b : a;
}

// Forward value `hard`, derivative of `soft`.
inline double StraightThrough(double hard, double /*soft*/) { return hard; }
inline Var StraightThrough(double hard, const Var& soft) {
  return Unary(soft, OpKind::kStraightThrough, hard, 1.0);
}
template <int N>
Dual<N> StraightThrough(double hard, const Dual<N>& soft) {
  return Dual<N>(hard, soft.d);
}

// Running sum that becomes one tape node for Var.
template <Scalar Real>
class Accumulator {
 public:
  void Clear() { sum_ = Real(0.0); }
  void Add(const Real& x) { sum_ += x; }
  void Add(const Real& x, double weight) { sum_ += Real(weight) * x; }
  Real Result() const { return sum_; }

 private:
  Real sum_ = Real(0.0);
};

template <>
class Accumulator<Var> {
 public:
  void Clear() { sum_.Clear(); }
  void Add(const Var& x) { sum_.Add(x); }
  void Add(const Var& x, double weight) { sum_.Add(x, weight); }
  Var Result() const { return sum_.Result(); }

 private:
  VarSum sum_;
};

}  // namespace diffabm::ad

#endif  // DIFFABM_AUTODIFF_SCALAR_H_

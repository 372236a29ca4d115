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

#ifndef DIFFABM_AUTODIFF_REPARAM_H_
#define DIFFABM_AUTODIFF_REPARAM_H_

// Reparameterised discrete sampling. Bernoulli draws use the binary
// Gumbel-softmax (logistic-noise) relaxation; categorical draws use the
// Gumbel-softmax relaxation. Every call consumes the same number of uniforms
// in every mode, so a hard run and a relaxed run with the same stream make
// identical discrete choices wherever the relaxation is not saturated.

#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "diffabm/autodiff/scalar.h"
#include "diffabm/core/errors.h"
#include "diffabm/core/rng.h"

namespace diffabm::ad {

enum class SamplingMode {
  kHard,             // exact 0/1 draws, no derivative
  kRelaxed,          // soft sample in (0, 1)
  kStraightThrough,  // hard value forward, relaxed derivative backward
  kExpected,         // the probability itself (mean-field)
};

SamplingMode ParseSamplingMode(std::string_view name);
std::string_view SamplingModeName(SamplingMode mode);

struct SamplingSpec {
  SamplingMode mode = SamplingMode::kHard;
  double temperature = 0.5;
};

inline constexpr double kProbabilityFloor = 1e-6;
inline constexpr double kProbabilityCeiling = 1.0 - 1e-6;

inline void CheckTemperature(double temperature) {
  if (!(temperature > 0.0)) {
    Fail(ErrorKind::kContract, "temperature must be > 0");
  }
}

// Hard decision shared by every code path that needs bit-identical choices:
// the event fires iff u < p.
inline bool BernoulliFires(double u, double p) { return u < p; }

template <Scalar Real>
Real ReparamBernoulli(const Real& p, const SamplingSpec& spec,
                      CounterRng& rng) {
  CheckTemperature(spec.temperature);
  const double u = rng.Uniform();
  const double hard = BernoulliFires(u, ValueOf(p)) ? 1.0 : 0.0;
  switch (spec.mode) {
    case SamplingMode::kHard:
      return Real(hard);
    case SamplingMode::kExpected:
      return p;
    case SamplingMode::kRelaxed:
    case SamplingMode::kStraightThrough:
      break;
  }
  const Real clamped = Clamp(p, kProbabilityFloor, kProbabilityCeiling);
  const Real logit = Log(clamped) - Log1p(-clamped);
  const double noise = std::log1p(-u) - std::log(u);
  const Real soft = Sigmoid((logit + Real(noise)) / Real(spec.temperature));
  if (spec.mode == SamplingMode::kRelaxed) return soft;
  return StraightThrough(hard, soft);
}

template <Scalar Real>
std::vector<Real> Softmax(std::span<const Real> logits) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (const Real& l : logits) max_logit = std::max(max_logit, ValueOf(l));
  std::vector<Real> out;
  out.reserve(logits.size());
  Accumulator<Real> total;
  for (const Real& l : logits) {
    out.push_back(Exp(l - Real(max_logit)));
    total.Add(out.back());
  }
  const Real z = total.Result();
  for (Real& x : out) x = x / z;
  return out;
}

template <Scalar Real>
std::vector<Real> ReparamCategorical(std::span<const Real> logits,
                                     const SamplingSpec& spec,
                                     CounterRng& rng) {
  CheckTemperature(spec.temperature);
  if (logits.empty()) Fail(ErrorKind::kContract, "categorical needs logits");
  std::vector<double> gumbel(logits.size());
  std::size_t argmax = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double l = ValueOf(logits[k]);
    if (!std::isfinite(l)) Fail(ErrorKind::kContract, "logits must be finite");
    gumbel[k] = rng.Gumbel();
    if (l + gumbel[k] > best) {
      best = l + gumbel[k];
      argmax = k;
    }
  }
  std::vector<Real> out;
  if (spec.mode == SamplingMode::kHard) {
    out.assign(logits.size(), Real(0.0));
    out[argmax] = Real(1.0);
    return out;
  }
  if (spec.mode == SamplingMode::kExpected) return Softmax(logits);
  std::vector<Real> perturbed;
  perturbed.reserve(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    perturbed.push_back((logits[k] + Real(gumbel[k])) /
                        Real(spec.temperature));
  }
  out = Softmax(std::span<const Real>(perturbed));
  if (spec.mode == SamplingMode::kStraightThrough) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = StraightThrough(k == argmax ? 1.0 : 0.0, out[k]);
    }
  }
  return out;
}

}  // namespace diffabm::ad

#endif  // DIFFABM_AUTODIFF_REPARAM_H_

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

#ifndef DIFFABM_CALIBRATION_POSTERIOR_NET_H_
#define DIFFABM_CALIBRATION_POSTERIOR_NET_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "diffabm/autodiff/scalar.h"
#include "diffabm/core/errors.h"
#include "diffabm/core/theta.h"

namespace diffabm::calib {

struct NetShape {
  int noise_dim = 4;
  int context_dim = 0;
  std::vector<int> hidden = {16};
};

// Feed-forward tanh network mapping (z, context) to one unconstrained value
// per theta entry, followed by theta_k = lo_k + (hi_k - lo_k) * sigmoid(u_k).
// Parameters live outside the net as a flat vector so any scalar type can be
// pushed through it.
class PosteriorNet {
 public:
  PosteriorNet(NetShape shape, ThetaVector bounds);

  const NetShape& shape() const { return shape_; }
  const ThetaVector& bounds() const { return bounds_; }
  std::size_t input_dim() const {
    return static_cast<std::size_t>(shape_.noise_dim + shape_.context_dim);
  }
  std::size_t output_dim() const { return bounds_.size(); }
  std::size_t num_params() const { return num_params_; }

  // Scaled-normal weights (std 1/sqrt(fan_in); the output layer further
  // scaled by output_scale) and zero biases.
  std::vector<double> InitParams(uint64_t seed, double output_scale) const;

  template <typename Real>
  std::vector<Real> Unconstrained(std::span<const Real> phi,
                                  std::span<const double> z,
                                  std::span<const Real> context) const {
    Require(phi.size() == num_params_, "parameter vector has wrong length");
    Require(z.size() == static_cast<std::size_t>(shape_.noise_dim),
            "noise vector has wrong length");
    Require(context.size() == static_cast<std::size_t>(shape_.context_dim),
            "context vector has wrong length");
    std::vector<Real> x;
    x.reserve(input_dim());
    for (double v : z) x.emplace_back(v);
    for (const Real& v : context) x.push_back(v);
    std::size_t offset = 0;
    const auto layers = LayerSizes();
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
      const int in = layers[l], out = layers[l + 1];
      const bool last = l + 2 == layers.size();
      std::vector<Real> y;
      y.reserve(out);
      for (int o = 0; o < out; ++o) {
        ad::Accumulator<Real> acc;
        for (int i = 0; i < in; ++i) {
          acc.Add(phi[offset + static_cast<std::size_t>(o) * in + i] * x[i]);
        }
        acc.Add(phi[offset + static_cast<std::size_t>(out) * in + o]);
        y.push_back(last ? acc.Result() : ad::Tanh(acc.Result()));
      }
      offset += static_cast<std::size_t>(out) * in + out;
      x = std::move(y);
    }
    return x;
  }

  template <typename Real>
  std::vector<Real> Squash(std::span<const Real> u) const {
    std::vector<Real> theta;
    theta.reserve(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double lo = bounds_[k].lower, hi = bounds_[k].upper;
      theta.push_back(Real(lo) + Real(hi - lo) * ad::Sigmoid(u[k]));
    }
    return theta;
  }

  template <typename Real>
  std::vector<Real> Theta(std::span<const Real> phi, std::span<const double> z,
                          std::span<const Real> context) const {
    const auto u = Unconstrained<Real>(phi, z, context);
    return Squash<Real>(u);
  }

 private:
  std::vector<int> LayerSizes() const;

  NetShape shape_;
  ThetaVector bounds_;
  std::size_t num_params_ = 0;
};

// Standard normal noise for draw `sample` of calibration step `step` on the
// stream named `purpose`.
std::vector<double> NoiseDraw(uint64_t seed, uint32_t step, uint32_t sample,
                              int dim,
                              std::string_view purpose = "calibration.noise");

}  // namespace diffabm::calib

#endif  // DIFFABM_CALIBRATION_POSTERIOR_NET_H_

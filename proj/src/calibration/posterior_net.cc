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

#include "diffabm/calibration/posterior_net.h"

#include <cmath>

#include "diffabm/core/rng.h"

namespace diffabm::calib {

PosteriorNet::PosteriorNet(NetShape shape, ThetaVector bounds)
    : shape_(std::move(shape)), bounds_(std::move(bounds)) {
  if (shape_.noise_dim < 0 || shape_.context_dim < 0) {
    Fail(ErrorKind::kConfig, "negative network input size");
  }
  for (int h : shape_.hidden) {
    if (h < 1) Fail(ErrorKind::kConfig, "hidden layer sizes must be >= 1");
  }
  if (bounds_.empty()) Fail(ErrorKind::kConfig, "no parameters to calibrate");
  const auto layers = LayerSizes();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    num_params_ += static_cast<std::size_t>(layers[l + 1]) * layers[l] +
                   layers[l + 1];
  }
}

std::vector<int> PosteriorNet::LayerSizes() const {
  std::vector<int> sizes = {shape_.noise_dim + shape_.context_dim};
  sizes.insert(sizes.end(), shape_.hidden.begin(), shape_.hidden.end());
  sizes.push_back(static_cast<int>(bounds_.size()));
  return sizes;
}

std::vector<double> PosteriorNet::InitParams(uint64_t seed,
                                             double output_scale) const {
  std::vector<double> phi;
  phi.reserve(num_params_);
  CounterRng rng(seed, StreamKey{0, 0, StreamTag("calibration.init")});
  const auto layers = LayerSizes();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    const int in = layers[l], out = layers[l + 1];
    const bool last = l + 2 == layers.size();
    const double scale =
        (in > 0 ? 1.0 / std::sqrt(static_cast<double>(in)) : 0.0) *
        (last ? output_scale : 1.0);
    for (int k = 0; k < in * out; ++k) phi.push_back(scale * rng.Normal());
    for (int k = 0; k < out; ++k) phi.push_back(0.0);
  }
  return phi;
}

std::vector<double> NoiseDraw(uint64_t seed, uint32_t step, uint32_t sample,
                              int dim, std::string_view purpose) {
  CounterRng rng(seed, StreamKey{sample, step, StreamTag(purpose)});
  std::vector<double> z(static_cast<std::size_t>(dim));
  for (double& v : z) v = rng.Normal();
  return z;
}

}  // namespace diffabm::calib

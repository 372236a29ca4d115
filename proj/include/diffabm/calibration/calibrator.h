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

#ifndef DIFFABM_CALIBRATION_CALIBRATOR_H_
#define DIFFABM_CALIBRATION_CALIBRATOR_H_

// Variational calibration: a posterior network q_phi pushes Gaussian noise
// (and a context embedding of the observed data) to theta, and phi is fitted
// by Adam on
//
//   L(phi) = E_q[loss(x(theta), y)] + w * KL(q_phi || prior).
//
// The data term's gradient is assembled as (dtheta/dphi)^T (dloss/dtheta):
// dloss/dtheta by one forward-mode simulation per theta sample, then a
// single reverse sweep through the network.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffabm/autodiff/tape.h"
#include "diffabm/calibration/objective.h"
#include "diffabm/calibration/posterior_net.h"

namespace diffabm::calib {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive moment estimation with bias correction. For gradient g at update
// t (starting at 1):
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
//   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps).
class Adam {
 public:
  Adam(std::size_t num_params, AdamConfig config);
  void Step(std::span<double> params, std::span<const double> gradient);
  double learning_rate() const { return config_.learning_rate; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  int64_t updates() const { return t_; }

 private:
  AdamConfig config_;
  int64_t t_ = 0;
  std::vector<double> m_, v_;
};

// Independent Gaussian prior on the unconstrained outputs u.
struct GaussianPrior {
  std::vector<double> mean;
  std::vector<double> stddev;
  static GaussianPrior Standard(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
  }
};

// KL(q || prior) where q is the diagonal Gaussian fitted (by moments) to n
// draws of u from the network. Requires n >= 2.
template <typename Real>
Real KlSurrogate(const PosteriorNet& net, std::span<const Real> phi,
                 std::span<const Real> context, const GaussianPrior& prior,
                 int n, uint64_t seed, uint32_t step) {
  Require(n >= 2, "KL surrogate needs at least two samples");
  const std::size_t dim = net.output_dim();
  Require(prior.mean.size() == dim && prior.stddev.size() == dim,
          "prior dimension differs from theta");
  std::vector<std::vector<Real>> draws;
  draws.reserve(n);
  for (int s = 0; s < n; ++s) {
    const auto z = NoiseDraw(seed, step, static_cast<uint32_t>(s),
                             net.shape().noise_dim, "calibration.kl");
    draws.push_back(net.Unconstrained<Real>(phi, z, context));
  }
  ad::Accumulator<Real> kl;
  for (std::size_t k = 0; k < dim; ++k) {
    ad::Accumulator<Real> sum;
    for (const auto& u : draws) sum.Add(u[k]);
    const Real mean = sum.Result() / Real(n);
    ad::Accumulator<Real> sq;
    for (const auto& u : draws) {
      const Real d = u[k] - mean;
      sq.Add(d * d);
    }
    const Real var = sq.Result() / Real(n);
    const double s0 = prior.stddev[k];
    const Real dm = mean - Real(prior.mean[k]);
    kl.Add(Real(std::log(s0)) - Real(0.5) * ad::Log(var) +
           (var + dm * dm) / Real(2.0 * s0 * s0) - Real(0.5));
  }
  return kl.Result();
}

enum class GradientRoute { kAuto, kForward, kReverse };

struct CalibConfig {
  int steps = 500;
  int samples_per_step = 1;
  double kl_weight = 0.01;
  int kl_samples = 64;
  AdamConfig adam;
  NetShape net;
  double init_output_scale = 1.0;
  std::optional<GaussianPrior> prior;  // standard normal when unset
  GradientRoute route = GradientRoute::kAuto;
  uint64_t seed = 0;  // network init and noise streams
  // When set, every simulation uses sim_seed (common random numbers);
  // otherwise each (step, sample) gets its own stream.
  bool common_random_numbers = false;
  uint64_t sim_seed = 0;
  // Optional linear anneal of the relaxation temperature over the run.
  std::optional<std::pair<double, double>> temperature_schedule;
  int report_samples = 32;

  // Throws kConfig on invalid settings.
  void Validate() const;
};

struct StepOutcome {
  int64_t step = 0;
  bool accepted = true;
  double loss = 0.0;       // data term + w * KL
  double data_loss = 0.0;  // mean over samples
  std::optional<double> kl;  // unset when w == 0
  double learning_rate = 0.0;
  std::vector<double> theta_mean;
  std::vector<double> theta_std;
  std::vector<double> context_gradient;  // dL/d(context)
};

// Owns the network head and its optimizer. Encoders that produce the
// context live elsewhere (EncoderParty).
class Calibrator {
 public:
  Calibrator(CalibConfig config, PosteriorNet net, Objective& objective);

  const CalibConfig& config() const { return config_; }
  const PosteriorNet& net() const { return net_; }
  const std::vector<double>& params() const { return phi_; }
  void set_params(std::vector<double> phi);
  int64_t step() const { return step_; }
  double learning_rate() const { return adam_.learning_rate(); }

  // One update of phi given the (already computed) context embedding.
  // Non-finite loss or gradient rejects the step and halves the learning
  // rate.
  StepOutcome ServerStep(std::span<const double> context);

  // End-to-end reverse-mode gradient of the data term (no KL) at the
  // current phi for the draws ServerStep would use at this step. For
  // checking the assembled gradient.
  std::vector<double> ReverseDataGradient(std::span<const double> context);
  std::vector<double> AssembledDataGradient(std::span<const double> context);

  // n posterior draws of theta on the "calibration.report" stream.
  std::vector<std::vector<double>> SampleTheta(std::span<const double> context,
                                               int n, uint32_t stream) const;

 private:
  struct Gradients {
    double data_loss = 0.0;
    std::optional<double> kl;
    std::vector<double> phi;
    std::vector<double> context;
  };
  Gradients Compute(std::span<const double> context, GradientRoute route,
                    bool with_kl);
  GradientRoute ResolvedRoute() const;
  uint64_t SimSeed(uint32_t sample) const;

  CalibConfig config_;
  PosteriorNet net_;
  Objective& objective_;
  GaussianPrior prior_;
  std::vector<double> phi_;
  Adam adam_;
  int64_t step_ = 0;
};

// Learned encoder of one observed stream: e = tanh(W f + b), where f are
// per-bin means of log1p(max(0, y_t)) over `bins` equal time slices.
struct EncoderShape {
  int bins = 8;
  int output_dim = 4;
};

std::vector<double> StreamFeatures(std::span<const double> series, int bins);

template <typename Real>
std::vector<Real> EncodeStream(const EncoderShape& shape,
                               std::span<const Real> psi,
                               std::span<const double> features) {
  std::vector<Real> out;
  out.reserve(shape.output_dim);
  for (int o = 0; o < shape.output_dim; ++o) {
    ad::Accumulator<Real> acc;
    for (int i = 0; i < shape.bins; ++i) {
      acc.Add(psi[static_cast<std::size_t>(o) * shape.bins + i] *
              Real(features[i]));
    }
    acc.Add(psi[static_cast<std::size_t>(shape.output_dim) * shape.bins + o]);
    out.push_back(ad::Tanh(acc.Result()));
  }
  return out;
}

// A holder of one private data stream and its encoder.
class EncoderParty {
 public:
  EncoderParty(std::string name, std::vector<double> series,
               EncoderShape shape, uint64_t seed, AdamConfig adam);

  const std::string& name() const { return name_; }
  int embedding_dim() const { return shape_.output_dim; }
  const std::vector<double>& params() const { return psi_; }
  const std::vector<double>& series() const { return series_; }

  std::vector<double> Embed() const;
  // Backpropagates dL/d(embedding) through the encoder and takes one Adam
  // step at `learning_rate`.
  void ApplyGradient(std::span<const double> embedding_gradient,
                     double learning_rate);

 private:
  std::string name_;
  std::vector<double> series_;
  std::vector<double> features_;
  EncoderShape shape_;
  std::vector<double> psi_;
  Adam adam_;
};

// Centralized step: local encoders embed, the head updates, encoders update
// with their slice of the context gradient.
StepOutcome CalibrationStep(Calibrator& calibrator,
                            std::span<EncoderParty> parties);

// Simulated link between split-calibration clients and the server. Only two
// message kinds exist, so raw data cannot be sent.
enum class MessageType : uint8_t { kEmbedding, kEmbeddingGradient };

struct ChannelMessage {
  MessageType type;
  std::string from;
  std::string to;
  int64_t round = 0;
  std::vector<double> payload;
  double learning_rate = 0.0;  // set on gradient messages
};

class SimulatedChannel {
 public:
  void Send(ChannelMessage message);
  // Oldest pending message for `to` from `from`, if any.
  std::optional<ChannelMessage> Receive(const std::string& to,
                                        const std::string& from);
  const std::vector<ChannelMessage>& transcript() const { return transcript_; }

 private:
  std::deque<ChannelMessage> pending_;
  std::vector<ChannelMessage> transcript_;
};

struct SplitClient {
  EncoderParty party;
  bool online = true;
};

// One round of split calibration. Offline clients contribute a zero
// embedding slot (with a logged warning) and receive no gradient.
StepOutcome SplitCalibrationRound(Calibrator& server,
                                  std::span<SplitClient> clients,
                                  SimulatedChannel& channel);

inline constexpr const char* kServerName = "server";

}  // namespace diffabm::calib

#endif  // DIFFABM_CALIBRATION_CALIBRATOR_H_

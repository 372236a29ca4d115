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

#include "diffabm/calibration/calibrator.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

#include "diffabm/core/rng.h"

namespace diffabm::calib {
namespace {

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

std::vector<ad::Var> Inputs(ad::Tape& tape, const std::string& prefix,
                            std::span<const double> values) {
  std::vector<ad::Var> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back(tape.Input(prefix + std::to_string(i), values[i]));
  }
  return out;
}

std::vector<double> Gather(const std::vector<double>& adjoint,
                           const std::vector<ad::Var>& vars) {
  std::vector<double> out(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) out[i] = adjoint[vars[i].id()];
  return out;
}

}  // namespace

Adam::Adam(std::size_t num_params, AdamConfig config)
    : config_(config), m_(num_params, 0.0), v_(num_params, 0.0) {}

void Adam::Step(std::span<double> params, std::span<const double> gradient) {
  Require(params.size() == m_.size() && gradient.size() == m_.size(),
          "optimizer size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = gradient[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= config_.learning_rate * m_hat /
                 (std::sqrt(v_hat) + config_.epsilon);
  }
}

void CalibConfig::Validate() const {
  if (steps < 1) Fail(ErrorKind::kConfig, "calibration steps must be >= 1");
  if (samples_per_step < 1) {
    Fail(ErrorKind::kConfig, "samples_per_step must be >= 1");
  }
  if (!(kl_weight >= 0.0)) Fail(ErrorKind::kConfig, "kl_weight must be >= 0");
  if (kl_weight > 0.0 && kl_samples < 2) {
    Fail(ErrorKind::kConfig, "kl_samples must be >= 2");
  }
  if (!(adam.learning_rate > 0.0)) {
    Fail(ErrorKind::kConfig, "learning rate must be positive");
  }
  if (report_samples < 1) Fail(ErrorKind::kConfig, "report_samples must be >= 1");
  if (temperature_schedule && (temperature_schedule->first <= 0.0 ||
                               temperature_schedule->second <= 0.0)) {
    Fail(ErrorKind::kConfig, "temperatures must be positive");
  }
}

Calibrator::Calibrator(CalibConfig config, PosteriorNet net,
                       Objective& objective)
    : config_(std::move(config)),
      net_(std::move(net)),
      objective_(objective),
      prior_(config_.prior ? *config_.prior
                           : GaussianPrior::Standard(net_.output_dim())),
      phi_(net_.InitParams(config_.seed, config_.init_output_scale)),
      adam_(net_.num_params(), config_.adam) {
  config_.Validate();
  if (prior_.mean.size() != net_.output_dim() ||
      prior_.stddev.size() != net_.output_dim()) {
    Fail(ErrorKind::kConfig, "prior dimension differs from theta");
  }
  for (double s : prior_.stddev) {
    if (!(s > 0.0)) Fail(ErrorKind::kConfig, "prior stddev must be positive");
  }
}

void Calibrator::set_params(std::vector<double> phi) {
  Require(phi.size() == net_.num_params(), "parameter vector has wrong length");
  phi_ = std::move(phi);
}

GradientRoute Calibrator::ResolvedRoute() const {
  if (config_.route != GradientRoute::kAuto) return config_.route;
  return net_.output_dim() <= 32 ? GradientRoute::kForward
                                 : GradientRoute::kReverse;
}

uint64_t Calibrator::SimSeed(uint32_t sample) const {
  if (config_.common_random_numbers) return config_.sim_seed;
  CounterRng rng(config_.sim_seed,
                 StreamKey{sample, static_cast<uint32_t>(step_),
                           StreamTag("calibration.sim")});
  return rng.NextU64();
}

Calibrator::Gradients Calibrator::Compute(std::span<const double> context,
                                          GradientRoute route, bool with_kl) {
  ad::Tape tape;
  const auto phi = Inputs(tape, "phi.", phi_);
  const auto ctx = Inputs(tape, "context.", context);
  const std::span<const ad::Var> phi_span(phi), ctx_span(ctx);
  const int samples = config_.samples_per_step;
  const uint32_t step = static_cast<uint32_t>(step_);

  std::vector<std::pair<ad::NodeId, double>> seeds;
  Gradients out;
  for (int s = 0; s < samples; ++s) {
    const auto z = NoiseDraw(config_.seed, step, static_cast<uint32_t>(s),
                             net_.shape().noise_dim);
    const auto theta = net_.Theta<ad::Var>(phi_span, z, ctx_span);
    const uint64_t sim_seed = SimSeed(static_cast<uint32_t>(s));
    if (route == GradientRoute::kReverse) {
      const ad::Var loss =
          objective_.Loss(std::span<const ad::Var>(theta), sim_seed);
      out.data_loss += loss.value();
      if (!loss.is_constant()) seeds.emplace_back(loss.id(), 1.0 / samples);
    } else {
      std::vector<double> values(theta.size());
      for (std::size_t k = 0; k < theta.size(); ++k) values[k] = theta[k].value();
      const LossGradient lg = ForwardLossGradient(objective_, values, sim_seed);
      out.data_loss += lg.loss;
      for (std::size_t k = 0; k < theta.size(); ++k) {
        if (!theta[k].is_constant()) {
          seeds.emplace_back(theta[k].id(), lg.gradient[k] / samples);
        }
      }
    }
  }
  out.data_loss /= samples;
  if (with_kl && config_.kl_weight > 0.0) {
    const ad::Var kl =
        KlSurrogate<ad::Var>(net_, phi_span, ctx_span, prior_,
                             config_.kl_samples, config_.seed, step);
    out.kl = kl.value();
    if (!kl.is_constant()) seeds.emplace_back(kl.id(), config_.kl_weight);
  }
  const std::vector<double> adjoint =
      seeds.empty() ? std::vector<double>(tape.size(), 0.0)
                    : tape.Adjoints(seeds);
  out.phi = Gather(adjoint, phi);
  out.context = Gather(adjoint, ctx);
  return out;
}

StepOutcome Calibrator::ServerStep(std::span<const double> context) {
  if (config_.temperature_schedule) {
    const auto [start, end] = *config_.temperature_schedule;
    const double frac =
        config_.steps > 1
            ? std::min(1.0, static_cast<double>(step_) / (config_.steps - 1))
            : 1.0;
    objective_.SetTemperature(start + (end - start) * frac);
  }
  const Gradients g = Compute(context, ResolvedRoute(), true);
  StepOutcome outcome;
  outcome.step = step_;
  outcome.data_loss = g.data_loss;
  outcome.kl = g.kl;
  outcome.loss = g.data_loss + (g.kl ? config_.kl_weight * *g.kl : 0.0);
  if (!std::isfinite(outcome.loss) || !AllFinite(g.phi) ||
      !AllFinite(g.context)) {
    outcome.accepted = false;
    adam_.set_learning_rate(adam_.learning_rate() / 2);
    spdlog::warn(
        "calibration step {} rejected: non-finite loss or gradient; learning "
        "rate halved to {}",
        step_, adam_.learning_rate());
  } else {
    adam_.Step(phi_, g.phi);
    outcome.context_gradient = g.context;
  }
  outcome.learning_rate = adam_.learning_rate();
  const auto draws = SampleTheta(context, config_.report_samples,
                                 static_cast<uint32_t>(step_));
  const std::size_t dim = net_.output_dim();
  outcome.theta_mean.assign(dim, 0.0);
  outcome.theta_std.assign(dim, 0.0);
  for (const auto& theta : draws) {
    for (std::size_t k = 0; k < dim; ++k) outcome.theta_mean[k] += theta[k];
  }
  for (double& m : outcome.theta_mean) m /= draws.size();
  for (const auto& theta : draws) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = theta[k] - outcome.theta_mean[k];
      outcome.theta_std[k] += d * d;
    }
  }
  for (double& s : outcome.theta_std) s = std::sqrt(s / draws.size());
  ++step_;
  return outcome;
}

std::vector<double> Calibrator::ReverseDataGradient(
    std::span<const double> context) {
  return Compute(context, GradientRoute::kReverse, false).phi;
}

std::vector<double> Calibrator::AssembledDataGradient(
    std::span<const double> context) {
  return Compute(context, GradientRoute::kForward, false).phi;
}

std::vector<std::vector<double>> Calibrator::SampleTheta(
    std::span<const double> context, int n, uint32_t stream) const {
  std::vector<std::vector<double>> out;
  out.reserve(n);
  for (int s = 0; s < n; ++s) {
    const auto z = NoiseDraw(config_.seed, stream, static_cast<uint32_t>(s),
                             net_.shape().noise_dim, "calibration.report");
    out.push_back(net_.Theta<double>(phi_, z, context));
  }
  return out;
}

std::vector<double> StreamFeatures(std::span<const double> series, int bins) {
  Require(bins >= 1, "encoder needs at least one bin");
  std::vector<double> features(bins, 0.0);
  if (series.empty()) return features;
  const std::size_t n = series.size();
  for (int b = 0; b < bins; ++b) {
    const std::size_t lo = n * b / bins;
    const std::size_t hi = std::max(lo + 1, n * (b + 1) / bins);
    double sum = 0.0;
    for (std::size_t t = lo; t < hi && t < n; ++t) {
      sum += std::log1p(std::max(0.0, series[t]));
    }
    features[b] = sum / static_cast<double>(hi - lo);
  }
  return features;
}

EncoderParty::EncoderParty(std::string name, std::vector<double> series,
                           EncoderShape shape, uint64_t seed, AdamConfig adam)
    : name_(std::move(name)),
      series_(std::move(series)),
      features_(StreamFeatures(series_, shape.bins)),
      shape_(shape),
      adam_(static_cast<std::size_t>(shape.output_dim) * (shape.bins + 1),
            adam) {
  if (shape_.bins < 1 || shape_.output_dim < 1) {
    Fail(ErrorKind::kConfig, "encoder sizes must be >= 1");
  }
  CounterRng rng(seed, StreamKey{0, 0, StreamTag("calibration.encoder." + name_)});
  const double scale = 1.0 / std::sqrt(static_cast<double>(shape_.bins));
  psi_.reserve(static_cast<std::size_t>(shape_.output_dim) * (shape_.bins + 1));
  for (int k = 0; k < shape_.output_dim * shape_.bins; ++k) {
    psi_.push_back(scale * rng.Normal());
  }
  for (int k = 0; k < shape_.output_dim; ++k) psi_.push_back(0.0);
}

std::vector<double> EncoderParty::Embed() const {
  return EncodeStream<double>(shape_, psi_, features_);
}

void EncoderParty::ApplyGradient(std::span<const double> embedding_gradient,
                                 double learning_rate) {
  Require(embedding_gradient.size() ==
              static_cast<std::size_t>(shape_.output_dim),
          "embedding gradient has wrong length");
  ad::Tape tape;
  const auto psi = Inputs(tape, "psi.", psi_);
  const auto e = EncodeStream<ad::Var>(shape_, std::span<const ad::Var>(psi),
                                       features_);
  std::vector<std::pair<ad::NodeId, double>> seeds;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (!e[j].is_constant()) seeds.emplace_back(e[j].id(), embedding_gradient[j]);
  }
  const auto adjoint = seeds.empty() ? std::vector<double>(tape.size(), 0.0)
                                     : tape.Adjoints(seeds);
  adam_.set_learning_rate(learning_rate);
  adam_.Step(psi_, Gather(adjoint, psi));
}

StepOutcome CalibrationStep(Calibrator& calibrator,
                            std::span<EncoderParty> parties) {
  std::vector<double> context;
  for (const EncoderParty& party : parties) {
    const auto e = party.Embed();
    context.insert(context.end(), e.begin(), e.end());
  }
  StepOutcome outcome = calibrator.ServerStep(context);
  if (outcome.accepted) {
    std::size_t offset = 0;
    for (EncoderParty& party : parties) {
      const std::size_t dim = static_cast<std::size_t>(party.embedding_dim());
      party.ApplyGradient(
          std::span<const double>(outcome.context_gradient).subspan(offset, dim),
          outcome.learning_rate);
      offset += dim;
    }
  }
  return outcome;
}

void SimulatedChannel::Send(ChannelMessage message) {
  transcript_.push_back(message);
  pending_.push_back(std::move(message));
}

std::optional<ChannelMessage> SimulatedChannel::Receive(const std::string& to,
                                                        const std::string& from) {
  for (auto it = pending_.begin(); it != pending_.end(); ++it) {
    if (it->to == to && it->from == from) {
      ChannelMessage message = std::move(*it);
      pending_.erase(it);
      return message;
    }
  }
  return std::nullopt;
}

StepOutcome SplitCalibrationRound(Calibrator& server,
                                  std::span<SplitClient> clients,
                                  SimulatedChannel& channel) {
  const int64_t round = server.step();
  for (SplitClient& client : clients) {
    if (!client.online) continue;
    channel.Send({MessageType::kEmbedding, client.party.name(), kServerName,
                  round, client.party.Embed(), 0.0});
  }
  std::vector<double> context;
  std::vector<bool> present;
  for (SplitClient& client : clients) {
    const std::size_t dim = static_cast<std::size_t>(client.party.embedding_dim());
    auto message = channel.Receive(kServerName, client.party.name());
    if (message && message->type == MessageType::kEmbedding &&
        message->payload.size() == dim) {
      context.insert(context.end(), message->payload.begin(),
                     message->payload.end());
      present.push_back(true);
    } else {
      spdlog::warn("split round {}: client '{}' dropped out; zero-filling its "
                   "embedding slot",
                   round, client.party.name());
      context.insert(context.end(), dim, 0.0);
      present.push_back(false);
    }
  }
  StepOutcome outcome = server.ServerStep(context);
  if (outcome.accepted) {
    std::size_t offset = 0;
    for (std::size_t c = 0; c < clients.size(); ++c) {
      const std::size_t dim =
          static_cast<std::size_t>(clients[c].party.embedding_dim());
      if (present[c]) {
        channel.Send({MessageType::kEmbeddingGradient, kServerName,
                      clients[c].party.name(), round,
                      std::vector<double>(
                          outcome.context_gradient.begin() + offset,
                          outcome.context_gradient.begin() + offset + dim),
                      outcome.learning_rate});
      }
      offset += dim;
    }
    for (SplitClient& client : clients) {
      auto message = channel.Receive(client.party.name(), kServerName);
      if (message && message->type == MessageType::kEmbeddingGradient) {
        client.party.ApplyGradient(message->payload, message->learning_rate);
      }
    }
  }
  return outcome;
}

}  // namespace diffabm::calib

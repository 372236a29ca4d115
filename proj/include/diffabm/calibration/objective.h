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

#ifndef DIFFABM_CALIBRATION_OBJECTIVE_H_
#define DIFFABM_CALIBRATION_OBJECTIVE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diffabm/autodiff/dual.h"
#include "diffabm/autodiff/scalar.h"
#include "diffabm/autodiff/tape.h"
#include "diffabm/behavior/archetypes.h"
#include "diffabm/core/simulation.h"
#include "diffabm/epi/seirm.h"

namespace diffabm::calib {

// Per-series normalized squared error: sum_t (x_t - y_t)^2 / sum_t y_t^2
// (plain sum of squares when y is identically zero). Only the first
// y.size() entries of x are compared.
template <typename Real>
Real NormalizedMse(std::span<const Real> x, std::span<const double> y) {
  Require(x.size() >= y.size(), "simulated series shorter than observed");
  double norm = 0.0;
  for (double v : y) norm += v * v;
  if (norm == 0.0) norm = 1.0;
  ad::Accumulator<Real> acc;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const Real diff = x[t] - Real(y[t]);
    acc.Add(diff * diff);
  }
  return acc.Result() / Real(norm);
}

// Scalar loss of theta, evaluable in every scalar mode the calibrator uses.
// `seed` selects the simulator's random streams.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double Loss(std::span<const double> theta, uint64_t seed) = 0;
  virtual ad::Dual<1> Loss(std::span<const ad::Dual<1>> theta,
                           uint64_t seed) = 0;
  virtual ad::Dual<4> Loss(std::span<const ad::Dual<4>> theta,
                           uint64_t seed) = 0;
  virtual ad::Dual<32> Loss(std::span<const ad::Dual<32>> theta,
                            uint64_t seed) = 0;
  virtual ad::Var Loss(std::span<const ad::Var> theta, uint64_t seed) = 0;
  // Relaxation temperature for objectives with relaxed sampling.
  virtual void SetTemperature(double /*temperature*/) {}
};

// Adapts a generic callable f(span<const Real>, uint64_t) -> Real.
template <typename F>
class GenericObjective : public Objective {
 public:
  explicit GenericObjective(F f) : f_(std::move(f)) {}
  double Loss(std::span<const double> t, uint64_t s) override { return f_(t, s); }
  ad::Dual<1> Loss(std::span<const ad::Dual<1>> t, uint64_t s) override {
    return f_(t, s);
  }
  ad::Dual<4> Loss(std::span<const ad::Dual<4>> t, uint64_t s) override {
    return f_(t, s);
  }
  ad::Dual<32> Loss(std::span<const ad::Dual<32>> t, uint64_t s) override {
    return f_(t, s);
  }
  ad::Var Loss(std::span<const ad::Var> t, uint64_t s) override {
    return f_(t, s);
  }

 private:
  F f_;
};

template <typename F>
std::unique_ptr<Objective> MakeObjective(F f) {
  return std::make_unique<GenericObjective<F>>(std::move(f));
}

// Everything needed to run the SEIRM simulation from a fixed start.
struct SimulationSetup {
  epi::DiseaseParams disease;
  ContactGraph graph;
  AgentStateTable state0;
  EnvState env0;
  std::vector<SubstepSpec> pipeline;
  int64_t steps = 1;
  ad::SamplingSpec sampling{ad::SamplingMode::kRelaxed, 0.5};
  std::shared_ptr<behavior::BehaviorModel> behavior;  // optional
};

template <ad::Scalar Real>
Trajectory<Real> RunSetup(const SimulationSetup& setup,
                          const std::vector<std::string>& names,
                          std::span<const Real> theta, uint64_t seed,
                          const ad::SamplingSpec& sampling) {
  SubstepRegistry<Real> registry;
  epi::RegisterSeirm(registry, setup.disease);
  if (setup.behavior) behavior::RegisterArchetypes(registry, setup.behavior);
  ParameterSet<Real> params;
  for (std::size_t k = 0; k < names.size(); ++k) params.Set(names[k], theta[k]);
  auto state = setup.state0.template Convert<Real>();
  EnvState env = setup.env0;
  return RunSimulation(registry, setup.pipeline, params, state, env,
                       setup.graph, RunOptions{setup.steps, seed, sampling});
}

// Sum over observed streams of NormalizedMse between the simulated metric
// and its observations. Every evaluation is one simulation execution.
class SimulationObjective : public Objective {
 public:
  SimulationObjective(std::shared_ptr<const SimulationSetup> setup,
                      std::vector<std::string> theta_names,
                      std::map<std::string, std::vector<double>> observed);

  double Loss(std::span<const double> t, uint64_t s) override {
    return Evaluate(t, s);
  }
  ad::Dual<1> Loss(std::span<const ad::Dual<1>> t, uint64_t s) override {
    return Evaluate(t, s);
  }
  ad::Dual<4> Loss(std::span<const ad::Dual<4>> t, uint64_t s) override {
    return Evaluate(t, s);
  }
  ad::Dual<32> Loss(std::span<const ad::Dual<32>> t, uint64_t s) override {
    return Evaluate(t, s);
  }
  ad::Var Loss(std::span<const ad::Var> t, uint64_t s) override {
    return Evaluate(t, s);
  }

  void SetTemperature(double temperature) override {
    sampling_.temperature = temperature;
  }
  const SimulationSetup& setup() const { return *setup_; }

 private:
  template <ad::Scalar Real>
  Real Evaluate(std::span<const Real> theta, uint64_t seed) const {
    const auto traj = RunSetup<Real>(*setup_, names_, theta, seed, sampling_);
    ad::Accumulator<Real> total;
    for (const auto& [metric, y] : observed_) {
      total.Add(NormalizedMse<Real>(traj.Series(metric), y));
    }
    return total.Result();
  }

  std::shared_ptr<const SimulationSetup> setup_;
  std::vector<std::string> names_;
  std::map<std::string, std::vector<double>> observed_;
  ad::SamplingSpec sampling_;
};

// Loss and dLoss/dtheta by forward mode: one evaluation carrying one tangent
// per theta entry. Requires theta.size() <= 32.
struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};
LossGradient ForwardLossGradient(Objective& objective,
                                 std::span<const double> theta, uint64_t seed);

}  // namespace diffabm::calib

#endif  // DIFFABM_CALIBRATION_OBJECTIVE_H_

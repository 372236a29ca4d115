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

#include "diffabm/io/scenario.h"

#include <filesystem>
#include <limits>

#include "diffabm/calibration/calibrator.h"
#include "diffabm/io/generate.h"
#include "diffabm/io/series.h"
#include "diffabm/secure/decentralized.h"

namespace diffabm::io {
namespace {

template <ad::Scalar Real>
SubstepRegistry<Real> MakeRegistry(const calib::SimulationSetup& setup) {
  SubstepRegistry<Real> registry;
  epi::RegisterSeirm(registry, setup.disease);
  if (setup.behavior) behavior::RegisterArchetypes(registry, setup.behavior);
  return registry;
}

template <ad::Scalar Real>
Trajectory<double> ToValues(const Trajectory<Real>& trajectory) {
  std::map<std::string, std::vector<double>> series;
  for (const auto& name : trajectory.metric_names()) {
    series[name] = trajectory.Values(name);
  }
  return Trajectory<double>::FromSeries(std::move(series));
}

}  // namespace

std::unique_ptr<behavior::BehaviorProvider> MakeProvider(
    const ProviderSpec& spec,
    std::unique_ptr<behavior::LineTransport>& transport) {
  switch (spec.kind) {
    case ProviderKind::kStub:
      return std::make_unique<behavior::LogisticStubProvider>(spec.stub);
    case ProviderKind::kConstant:
      return std::make_unique<behavior::ConstantProvider>(spec.constant_option);
    case ProviderKind::kExternal:
      transport = std::make_unique<behavior::SubprocessTransport>(spec.command);
      return std::make_unique<behavior::ExternalProvider>(*transport,
                                                          spec.external);
  }
  Fail(ErrorKind::kInternal, "unhandled provider kind");
}

Scenario BuildScenario(const SimConfig& config, uint64_t seed) {
  Scenario scenario;
  auto setup = std::make_shared<calib::SimulationSetup>();
  const auto n = static_cast<uint32_t>(config.population.size);
  setup->disease = config.disease;
  setup->state0 = GeneratePopulation(config.population, config.disease, seed);
  setup->graph = GenerateNetwork(config.layers, n, seed);
  setup->env0.scalars["dt"] = 1.0;
  setup->steps = config.run.steps;
  setup->sampling = config.run.sampling;

  std::vector<std::string> layers;
  for (const auto& l : config.layers) layers.push_back(l.name);
  if (!config.behavior.archetypes.empty()) {
    scenario.provider = MakeProvider(config.behavior.provider, scenario.transport);
    setup->behavior = std::make_shared<behavior::BehaviorModel>(
        config.behavior.archetypes, *scenario.provider);
    setup->pipeline.push_back(behavior::ArchetypeSubstep());
  }
  for (auto& s : epi::DefaultSeirmPipeline(
           layers, config.disease.vaccination_coverage > 0.0)) {
    setup->pipeline.push_back(std::move(s));
  }
  scenario.setup = std::move(setup);
  return scenario;
}

Trajectory<double> Simulate(const Scenario& scenario, uint64_t seed,
                            const ad::SamplingSpec& sampling) {
  return calib::RunSetup<double>(*scenario.setup, {}, {}, seed, sampling);
}

ThetaVector DiseaseTheta(const epi::DiseaseParams& disease,
                         const std::vector<std::string>& names) {
  ThetaVector theta;
  for (const auto& name : names) {
    if (name == "beta") {
      theta.Add(name, disease.beta, 0.0, std::numeric_limits<double>::max());
    } else if (name == "mortality_prob") {
      theta.Add(name, disease.mortality_prob, 0.0, 1.0);
    } else if (name == "vaccine_efficacy") {
      theta.Add(name, disease.vaccine_efficacy, 0.0, 1.0);
    } else {
      Fail(ErrorKind::kConfig, "unknown model parameter '" + name + "'");
    }
  }
  return theta;
}

AnalyzeResult Analyze(const Scenario& scenario, const AnalyzeSpec& spec,
                      const epi::DiseaseParams& disease, uint64_t seed,
                      const ad::SamplingSpec& sampling) {
  const auto& setup = *scenario.setup;
  const auto registry = MakeRegistry<ad::Var>(setup);
  auto run = RecordRun(registry, setup.pipeline,
                       DiseaseTheta(disease, spec.parameters), setup.state0,
                       setup.env0, setup.graph,
                       RunOptions{setup.steps, seed, sampling});
  const auto metrics = run.MetricNodes(spec.metrics);
  AnalyzeResult result;
  result.report = Sensitivities(*run.tape, metrics, run.parameters);
  result.trajectory = ToValues(run.trajectory);
  return result;
}

CalibrationResult Calibrate(const Scenario& scenario,
                            const CalibrationSpec& spec,
                            const std::string& base_dir) {
  if (spec.observed.empty()) {
    Fail(ErrorKind::kConfig, "calibration.observed names no series");
  }
  if (spec.parameters.empty()) {
    Fail(ErrorKind::kConfig, "calibration.parameters is empty");
  }
  std::map<std::string, std::vector<double>> observed;
  for (const auto& o : spec.observed) {
    const auto path = (std::filesystem::path(base_dir) / o.path).string();
    auto series = IngestObserved(path, o.metric).values;
    if (static_cast<int64_t>(series.size()) != scenario.setup->steps) {
      Fail(ErrorKind::kIngestion,
           path + ": has " + std::to_string(series.size()) +
               " steps but the run has " +
               std::to_string(scenario.setup->steps));
    }
    observed[o.metric] = std::move(series);
  }
  auto setup = std::make_shared<calib::SimulationSetup>(*scenario.setup);
  setup->sampling = spec.sampling;

  CalibrationResult result;
  for (const auto& e : spec.parameters.entries()) result.parameters.push_back(e.name);
  calib::SimulationObjective objective(setup, result.parameters,
                                       std::move(observed));
  calib::Calibrator calibrator(
      spec.config, calib::PosteriorNet(spec.config.net, spec.parameters),
      objective);
  for (int s = 0; s < spec.config.steps; ++s) {
    result.steps.push_back(calibrator.ServerStep({}));
  }
  result.posterior =
      calibrator.SampleTheta({}, spec.posterior_samples, 1u << 20);
  return result;
}

Trajectory<double> SimulateSecure(const Scenario& scenario,
                                  const SimConfig& config, uint64_t seed) {
  if (!config.behavior.archetypes.empty()) {
    Fail(ErrorKind::kConfig,
         "secure-sim runs the disease model only; remove behavior.archetypes");
  }
  secure::DecentralizedConfig dc;
  dc.disease = config.disease;
  for (const auto& l : config.layers) dc.layers.push_back(l.name);
  dc.with_vaccination = config.disease.vaccination_coverage > 0.0;
  dc.sampling = config.run.sampling;
  dc.seed = seed;
  dc.protocol_seed = config.secure.protocol_seed;
  dc.fractional_bits = config.secure.fractional_bits;
  const auto& setup = *scenario.setup;
  secure::DecentralizedSeirm<double> sim(dc, setup.state0, setup.graph, {});
  secure::SimulatedNetwork net(config.secure.delivery_seed);
  std::map<std::string, std::vector<double>> series;
  for (int64_t t = 0; t < config.run.steps; ++t) {
    for (const auto& [name, value] : sim.Step(net, t)) {
      series[name].push_back(value);
    }
  }
  return Trajectory<double>::FromSeries(std::move(series));
}

}  // namespace diffabm::io

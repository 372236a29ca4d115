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

#include "diffabm/sensitivity/sensitivity.h"

#include "diffabm/autodiff/scalar.h"

namespace diffabm {

double SensitivityReport::Get(const std::string& metric,
                              const std::string& parameter) const {
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    if (metrics[m] != metric) continue;
    for (std::size_t p = 0; p < parameters.size(); ++p) {
      if (parameters[p] == parameter) return partials[m][p];
    }
  }
  Fail(ErrorKind::kConfig,
       "no sensitivity of '" + metric + "' to '" + parameter + "'");
}

SensitivityReport Sensitivities(const ad::Tape& tape,
                                std::span<const NamedNode> metrics,
                                std::span<const NamedNode> parameters) {
  const uint64_t runs_before = SimulationCount();
  for (const NamedNode& p : parameters) {
    Require(p.node < tape.size(),
            "parameter '" + p.name + "' is not on the tape");
  }
  SensitivityReport report;
  for (const NamedNode& p : parameters) report.parameters.push_back(p.name);
  for (const NamedNode& m : metrics) {
    report.metrics.push_back(m.name);
    std::vector<double> row(parameters.size(), 0.0);
    if (m.node != ad::kNoNode) {
      Require(m.node < tape.size(), "metric '" + m.name + "' is not on the tape");
      const std::vector<double> adjoint = tape.Adjoints(m.node);
      for (std::size_t p = 0; p < parameters.size(); ++p) {
        row[p] = adjoint[parameters[p].node];
      }
    }
    report.partials.push_back(std::move(row));
  }
  report.simulations_consumed = SimulationCount() - runs_before;
  return report;
}

std::vector<NamedNode> RecordedRun::MetricNodes(
    const std::vector<std::string>& metrics) {
  std::vector<NamedNode> out;
  for (const std::string& metric : metrics) {
    const auto& series = trajectory.Series(metric);
    ad::Accumulator<ad::Var> total;
    for (std::size_t t = 0; t < series.size(); ++t) {
      out.push_back({metric + "[" + std::to_string(t) + "]", series[t].id()});
      total.Add(series[t]);
    }
    out.push_back({metric + ".total", total.Result().id()});
  }
  return out;
}

RecordedRun RecordRun(const SubstepRegistry<ad::Var>& registry,
                      const std::vector<SubstepSpec>& pipeline,
                      const ThetaVector& theta, const AgentStateTable& state0,
                      const EnvState& env0, const ContactGraph& graph,
                      const RunOptions& options) {
  RecordedRun run;
  run.tape = std::make_unique<ad::Tape>();
  ParameterSet<ad::Var> params;
  for (const ThetaEntry& e : theta.entries()) {
    const ad::Var x = run.tape->Input(e.name, e.value);
    params.Set(e.name, x);
    run.parameters.push_back({e.name, x.id()});
  }
  auto state = state0.Convert<ad::Var>();
  EnvState env = env0;
  run.trajectory =
      RunSimulation(registry, pipeline, params, state, env, graph, options);
  return run;
}

}  // namespace diffabm

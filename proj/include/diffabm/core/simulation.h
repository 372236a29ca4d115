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

#ifndef DIFFABM_CORE_SIMULATION_H_
#define DIFFABM_CORE_SIMULATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diffabm/core/substep.h"

namespace diffabm {

// Per-step aggregate series x_1..x_T, one series per metric name.
template <ad::Scalar Real>
class Trajectory {
 public:
  std::size_t steps() const { return steps_; }
  std::vector<std::string> metric_names() const {
    std::vector<std::string> names;
    for (const auto& [name, series] : series_) names.push_back(name);
    return names;
  }
  bool HasMetric(const std::string& name) const {
    return series_.contains(name);
  }

  const std::vector<Real>& Series(const std::string& name) const {
    auto it = series_.find(name);
    if (it == series_.end()) {
      Fail(ErrorKind::kConfig, "trajectory has no metric '" + name + "'");
    }
    return it->second;
  }
  std::vector<double> Values(const std::string& name) const {
    std::vector<double> out;
    for (const Real& v : Series(name)) out.push_back(ad::ValueOf(v));
    return out;
  }

  // The first record fixes the metric set; later records must match it.
  void Append(const StepRecord<Real>& record) {
    if (steps_ > 0 && record.values.size() != series_.size()) {
      Fail(ErrorKind::kInternal, "step record metric set changed");
    }
    for (const auto& [name, v] : record.values) {
      auto& series = series_[name];
      if (series.size() != steps_) {
        Fail(ErrorKind::kInternal, "step record metric set changed");
      }
      series.push_back(v);
    }
    ++steps_;
  }

  // Builds a trajectory directly from value series (all of equal length).
  static Trajectory FromSeries(std::map<std::string, std::vector<Real>> s) {
    Trajectory t;
    std::optional<std::size_t> length;
    for (const auto& [name, series] : s) {
      if (length && *length != series.size()) {
        Fail(ErrorKind::kValidation, "series lengths differ");
      }
      length = series.size();
    }
    t.series_ = std::move(s);
    t.steps_ = length.value_or(0);
    return t;
  }

 private:
  std::map<std::string, std::vector<Real>> series_;
  std::size_t steps_ = 0;
};

struct RunOptions {
  int64_t steps = 0;
  uint64_t seed = 0;
  ad::SamplingSpec sampling;
};

// Number of RunSimulation calls made by this process.
uint64_t SimulationCount();
void CountSimulation();

// Checks every precondition of a run without touching the state: kValidation
// for steps < 1 or table/graph size mismatches, kConfig for unresolved
// function ids or unknown layers.
template <ad::Scalar Real>
void ValidateRun(const SubstepRegistry<Real>& registry,
                 const std::vector<SubstepSpec>& pipeline,
                 const BasicStateTable<Real>& state, const ContactGraph& graph,
                 const RunOptions& options) {
  if (options.steps < 1) {
    Fail(ErrorKind::kValidation, "a run needs at least one step");
  }
  if (graph.num_agents() != state.num_agents()) {
    Fail(ErrorKind::kValidation,
         "contact graph has " + std::to_string(graph.num_agents()) +
             " agents but the state table has " +
             std::to_string(state.num_agents()));
  }
  for (const auto& layer : graph.layers()) {
    if (layer.num_agents() != state.num_agents()) {
      Fail(ErrorKind::kValidation, "layer '" + layer.name + "' size mismatch");
    }
  }
  for (const SubstepSpec& s : pipeline) {
    registry.Observation(s.observation_fn);
    registry.Policy(s.policy_fn);
    registry.Transition(s.transition_fn);
    if (s.layer) graph.layer(*s.layer);
    for (const auto& c : s.active.conditions()) {
      if (!state.HasCategorical(c.column) && !state.HasReal(c.column)) {
        Fail(ErrorKind::kConfig, "substep '" + s.name +
                                     "' predicate names unknown column '" +
                                     c.column + "'");
      }
    }
  }
  if (!registry.aggregator()) {
    Fail(ErrorKind::kConfig, "no aggregate function registered");
  }
}

// Runs observation, policy and transition for one substep. Only agents
// selected by the substep's predicate may change; static columns never do.
// Throws kRuntimeState when the transition leaves a categorical value outside
// its domain.
template <ad::Scalar Real>
void ApplySubstep(const SubstepRegistry<Real>& registry,
                  const SubstepSpec& spec, BasicStateTable<Real>& state,
                  EnvState& env, const ContactGraph& graph,
                  const ParameterSet<Real>& params,
                  const ad::SamplingSpec& sampling, uint64_t seed,
                  StepRecord<Real>& record) {
  const GraphLayer* layer = spec.layer ? &graph.layer(*spec.layer) : nullptr;
  const auto step = static_cast<uint32_t>(env.step_index);
  const uint32_t tag = StreamTag(spec.name);

  std::vector<uint8_t> mask;
  if (!spec.active.matches_all()) {
    mask = spec.active.Evaluate(state);
    bool any = false;
    for (uint8_t m : mask) any = any || m;
    if (!any) return;
  }

  auto run = [&](BasicStateTable<Real>& target) {
    SubstepContext<Real> ctx{target, env,  graph, layer,
                             params, sampling, seed, step,
                             tag,    mask,     record};
    const Signals<Real> obs = registry.Observation(spec.observation_fn)(ctx);
    const Signals<Real> actions = registry.Policy(spec.policy_fn)(ctx, obs);
    registry.Transition(spec.transition_fn)(ctx, actions);
    target.CheckDomains(ErrorKind::kRuntimeState);
  };

  if (mask.empty()) {
    run(state);
    return;
  }
  BasicStateTable<Real> staged = state;
  run(staged);
  state.CommitDynamicRows(staged, mask);
}

// Executes `options.steps` steps of the pipeline, mutating `state` and `env`,
// and returns the per-step aggregates.
template <ad::Scalar Real>
Trajectory<Real> RunSimulation(const SubstepRegistry<Real>& registry,
                               const std::vector<SubstepSpec>& pipeline,
                               const ParameterSet<Real>& params,
                               BasicStateTable<Real>& state, EnvState& env,
                               const ContactGraph& graph,
                               const RunOptions& options) {
  ValidateRun(registry, pipeline, state, graph, options);
  if (env.step_index < 0) {
    Fail(ErrorKind::kValidation, "step index must be non-negative");
  }
  CountSimulation();
  Trajectory<Real> trajectory;
  for (int64_t t = 0; t < options.steps; ++t) {
    StepRecord<Real> record;
    for (const SubstepSpec& spec : pipeline) {
      ApplySubstep(registry, spec, state, env, graph, params, options.sampling,
                   options.seed, record);
    }
    registry.aggregator()(state, record);
    auto cases = record.values.find("new_infections");
    env.scalars["cases"] =
        cases == record.values.end() ? 0.0 : ad::ValueOf(cases->second);
    env.step_index += 1;
    trajectory.Append(record);
  }
  return trajectory;
}

}  // namespace diffabm

#endif  // DIFFABM_CORE_SIMULATION_H_

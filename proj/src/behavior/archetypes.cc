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

#include "diffabm/behavior/archetypes.h"

#include <algorithm>

namespace diffabm::behavior {

const std::vector<double>* ActionDistribution::Row(
    std::size_t k, const std::string& action) const {
  if (k >= p.size() || k >= actions.size()) return nullptr;
  for (std::size_t a = 0; a < actions[k].size() && a < p[k].size(); ++a) {
    if (actions[k][a] == action) return &p[k][a];
  }
  return nullptr;
}

std::vector<std::vector<double>> EstimateActionProbs(
    const ArchetypeSpec& spec, std::size_t member_count,
    BehaviorProvider& provider, const EnvSummary& env, uint64_t seed) {
  if (spec.samples_per_action < 1) {
    Fail(ErrorKind::kConfig, "archetype '" + spec.name +
                                 "' needs samples_per_action >= 1");
  }
  const int m = spec.samples_per_action;
  std::vector<std::vector<double>> rows;
  for (const ActionSpec& action : spec.actions) {
    if (action.options.empty()) {
      Fail(ErrorKind::kConfig, "action '" + action.name + "' has no options");
    }
    ArchetypeContext context{spec.id,       spec.name,   spec.features,
                             member_count, action.name, action.options};
    const uint32_t tag =
        StreamTag("behavior.query/" + spec.name + "/" + action.name);
    std::vector<double> counts(action.options.size(), 0.0);
    for (int j = 0; j < m; ++j) {
      CounterRng rng(seed, StreamKey{static_cast<uint32_t>(j),
                                     static_cast<uint32_t>(env.step), tag});
      const int option = provider.Sample(context, env, rng);
      if (option < 0 || static_cast<std::size_t>(option) >= counts.size()) {
        Fail(ErrorKind::kProvider, "provider returned option " +
                                       std::to_string(option) + " for '" +
                                       action.name + "'");
      }
      counts[option] += 1.0;
    }
    for (double& c : counts) c /= m;
    rows.push_back(std::move(counts));
  }
  return rows;
}

ActionDistribution EstimateAllActionProbs(
    const std::vector<ArchetypeSpec>& specs,
    const std::vector<int32_t>& membership, BehaviorProvider& provider,
    const EnvSummary& env, uint64_t seed) {
  std::vector<std::size_t> members(specs.size(), 0);
  for (int32_t k : membership) {
    if (k >= 0 && static_cast<std::size_t>(k) < members.size()) ++members[k];
  }
  ActionDistribution dist;
  dist.step = env.step;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    std::vector<std::string> names;
    for (const auto& action : specs[k].actions) names.push_back(action.name);
    dist.actions.push_back(std::move(names));
    dist.p.push_back(
        EstimateActionProbs(specs[k], members[k], provider, env, seed));
  }
  return dist;
}

std::vector<int32_t> SampleActions(const std::vector<int32_t>& membership,
                                   const ActionDistribution& dist,
                                   const std::string& action, uint64_t seed) {
  const uint32_t tag = StreamTag("behavior.sample/" + action);
  std::vector<int32_t> out(membership.size(), 0);
  for (std::size_t i = 0; i < membership.size(); ++i) {
    const int32_t k = membership[i];
    const std::vector<double>* found =
        k < 0 ? nullptr : dist.Row(static_cast<std::size_t>(k), action);
    if (found == nullptr) {
      Fail(ErrorKind::kConfig, "no '" + action +
                                   "' distribution row for archetype " +
                                   std::to_string(k) + " (agent " +
                                   std::to_string(i) + ")");
    }
    const auto& row = *found;
    CounterRng rng(seed, StreamKey{static_cast<uint32_t>(i),
                                   static_cast<uint32_t>(dist.step), tag});
    const double u = rng.Uniform();
    double cdf = 0.0;
    int32_t chosen = static_cast<int32_t>(row.size()) - 1;
    for (std::size_t o = 0; o < row.size(); ++o) {
      cdf += row[o];
      if (u < cdf) {
        chosen = static_cast<int32_t>(o);
        break;
      }
    }
    // Never land on a zero-probability trailing option through rounding.
    while (chosen > 0 && row[chosen] == 0.0) --chosen;
    out[i] = chosen;
  }
  return out;
}

EnvSummary SummarizeEnv(const EnvState& env) {
  EnvSummary summary;
  summary.step = env.step_index;
  summary.cases = env.ScalarOr("cases", 0.0);
  for (const auto& [name, value] : env.scalars) {
    if (name.rfind("flag.", 0) == 0) summary.flags[name.substr(5)] = value;
  }
  return summary;
}

BehaviorModel::BehaviorModel(std::vector<ArchetypeSpec> specs,
                             BehaviorProvider& provider)
    : specs_(std::move(specs)), counter_(provider) {
  if (specs_.empty()) Fail(ErrorKind::kConfig, "no archetypes declared");
  for (const auto& spec : specs_) {
    if (spec.samples_per_action < 1) {
      Fail(ErrorKind::kConfig,
           "archetype '" + spec.name + "' needs samples_per_action >= 1");
    }
    for (const auto& action : spec.actions) {
      auto [it, inserted] = targets_.emplace(action.name, action.target_column);
      if (!inserted && it->second != action.target_column) {
        Fail(ErrorKind::kConfig, "action '" + action.name +
                                     "' has different targets across archetypes");
      }
    }
  }
}

uint64_t BehaviorModel::QueriesPerStep() const {
  uint64_t total = 0;
  for (const auto& spec : specs_) {
    total += spec.actions.size() * static_cast<uint64_t>(spec.samples_per_action);
  }
  return total;
}

ActionDistribution BehaviorModel::Estimate(
    const std::vector<int32_t>& membership, const EnvSummary& env,
    uint64_t seed) {
  last_ = EstimateAllActionProbs(specs_, membership, counter_, env, seed);
  return *last_;
}

SubstepSpec ArchetypeSubstep() {
  SubstepSpec spec;
  spec.name = "behavior";
  spec.observation_fn = "archetypes.assign";
  spec.policy_fn = "archetypes.sample";
  spec.transition_fn = "archetypes.apply";
  return spec;
}

}  // namespace diffabm::behavior

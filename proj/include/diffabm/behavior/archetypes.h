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

#ifndef DIFFABM_BEHAVIOR_ARCHETYPES_H_
#define DIFFABM_BEHAVIOR_ARCHETYPES_H_

// Archetype-based behavior. Each archetype k is queried M times for every
// action (a named decision with its own options); the resulting empirical
// distributions p_a(k, t) are then sampled by all N member agents. Provider
// cost per step is sum over archetypes of |A_k| * M_k, independent of N.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diffabm/behavior/provider.h"
#include "diffabm/core/simulation.h"

namespace diffabm::behavior {

struct ActionSpec {
  std::string name;                  // e.g. "isolate"
  std::vector<std::string> options;  // e.g. {"no", "yes"}
  // Dynamic categorical column that receives the chosen option, if any. Its
  // domain must equal `options`.
  std::optional<std::string> target_column;
};

struct ArchetypeSpec {
  int id = 0;
  std::string name;
  AgentPredicate predicate;
  std::map<std::string, double> features;
  std::vector<ActionSpec> actions;
  int samples_per_action = 1;  // M
};

// p[k][a][o]: probability that a member of archetype k picks option o of
// its action actions[k][a] at `step`.
struct ActionDistribution {
  int64_t step = 0;
  std::vector<std::vector<std::string>> actions;
  std::vector<std::vector<std::vector<double>>> p;

  // Row of `action` for archetype k, or nullptr.
  const std::vector<double>* Row(std::size_t k, const std::string& action) const;
};

// Unique archetype index per agent. Throws kPartition naming the first agent
// that matches zero or several predicates.
template <ad::Scalar Real>
std::vector<int32_t> AssignArchetypes(const BasicStateTable<Real>& state,
                                      const std::vector<ArchetypeSpec>& specs) {
  std::vector<int32_t> membership(state.num_agents(), -1);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto mask = specs[k].predicate.Evaluate(state);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      if (membership[i] >= 0) {
        Fail(ErrorKind::kPartition,
             "agent " + std::to_string(i) + " matches archetypes '" +
                 specs[membership[i]].name + "' (" +
                 specs[membership[i]].predicate.Describe() + ") and '" +
                 specs[k].name + "' (" + specs[k].predicate.Describe() + ")");
      }
      membership[i] = static_cast<int32_t>(k);
    }
  }
  for (std::size_t i = 0; i < membership.size(); ++i) {
    if (membership[i] < 0) {
      std::string names;
      for (const auto& s : specs) {
        names += (names.empty() ? "" : ", ") + s.name + " (" +
                 s.predicate.Describe() + ")";
      }
      Fail(ErrorKind::kPartition, "agent " + std::to_string(i) +
                                      " matches no archetype among " + names);
    }
  }
  return membership;
}

// Monte Carlo estimate of p_a(k, t) for every action of one archetype:
// (1/M) * sum_j one_hot(provider sample j). Query j of action a uses the
// stream (seed, j, step, tag(archetype, action)).
std::vector<std::vector<double>> EstimateActionProbs(
    const ArchetypeSpec& spec, std::size_t member_count,
    BehaviorProvider& provider, const EnvSummary& env, uint64_t seed);

ActionDistribution EstimateAllActionProbs(
    const std::vector<ArchetypeSpec>& specs,
    const std::vector<int32_t>& membership, BehaviorProvider& provider,
    const EnvSummary& env, uint64_t seed);

// Draws one option of `action` per agent from its archetype's row by inverse
// CDF on the agent's own stream. Throws kConfig if an agent's archetype has
// no row for the action.
std::vector<int32_t> SampleActions(const std::vector<int32_t>& membership,
                                   const ActionDistribution& dist,
                                   const std::string& action, uint64_t seed);

// Builds the environment summary from an EnvState: step index, the "cases"
// scalar, and every scalar named "flag.<name>".
EnvSummary SummarizeEnv(const EnvState& env);

// Shared state of the behavior substep.
class BehaviorModel {
 public:
  BehaviorModel(std::vector<ArchetypeSpec> specs, BehaviorProvider& provider);

  const std::vector<ArchetypeSpec>& specs() const { return specs_; }
  uint64_t queries() const { return counter_.queries(); }
  const std::optional<ActionDistribution>& last_distribution() const {
    return last_;
  }
  // Provider queries one step costs.
  uint64_t QueriesPerStep() const;
  // Every action name with its target column.
  const std::map<std::string, std::optional<std::string>>& ActionTargets()
      const {
    return targets_;
  }

  ActionDistribution Estimate(const std::vector<int32_t>& membership,
                              const EnvSummary& env, uint64_t seed);

 private:
  std::vector<ArchetypeSpec> specs_;
  std::map<std::string, std::optional<std::string>> targets_;
  CountingProvider counter_;
  std::optional<ActionDistribution> last_;
};

// Registers observation "archetypes.assign", policy "archetypes.sample" and
// transition "archetypes.apply". The transition writes each action's option
// into its target column.
template <ad::Scalar Real>
void RegisterArchetypes(SubstepRegistry<Real>& registry,
                        std::shared_ptr<BehaviorModel> model) {
  registry.RegisterObservation(
      "archetypes.assign", [model](const SubstepContext<Real>& ctx) {
        Signals<Real> obs;
        obs.ints["archetype"] = AssignArchetypes(ctx.state, model->specs());
        return obs;
      });
  registry.RegisterPolicy(
      "archetypes.sample",
      [model](const SubstepContext<Real>& ctx, const Signals<Real>& obs) {
        const auto& membership = obs.ints.at("archetype");
        const EnvSummary env = SummarizeEnv(ctx.env);
        const ActionDistribution dist =
            model->Estimate(membership, env, ctx.seed);
        Signals<Real> actions;
        for (const auto& [name, column] : model->ActionTargets()) {
          actions.ints["action." + name] =
              SampleActions(membership, dist, name, ctx.seed);
        }
        return actions;
      });
  registry.RegisterTransition(
      "archetypes.apply",
      [model](SubstepContext<Real>& ctx, const Signals<Real>& actions) {
        for (const auto& spec : model->specs()) {
          for (const auto& action : spec.actions) {
            if (!action.target_column) continue;
            const auto& column = ctx.state.categorical(*action.target_column);
            if (column.domain != action.options) {
              Fail(ErrorKind::kConfig, "action '" + action.name +
                                           "' options differ from column '" +
                                           column.name + "' domain");
            }
          }
        }
        for (const auto& [name, column] : model->ActionTargets()) {
          if (!column) continue;
          const auto& chosen = actions.ints.at("action." + name);
          auto codes = ctx.state.MutableCodes(*column);
          for (std::size_t i = 0; i < codes.size(); ++i) {
            if (ctx.IsActive(i)) codes[i] = chosen[i];
          }
        }
      });
}

// The behavior substep as a pipeline entry.
SubstepSpec ArchetypeSubstep();

}  // namespace diffabm::behavior

#endif  // DIFFABM_BEHAVIOR_ARCHETYPES_H_

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

#ifndef DIFFABM_CORE_SUBSTEP_H_
#define DIFFABM_CORE_SUBSTEP_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffabm/autodiff/reparam.h"
#include "diffabm/autodiff/scalar.h"
#include "diffabm/core/contact_graph.h"
#include "diffabm/core/env_state.h"
#include "diffabm/core/errors.h"
#include "diffabm/core/predicate.h"
#include "diffabm/core/rng.h"
#include "diffabm/core/state_table.h"
#include "diffabm/core/theta.h"

namespace diffabm {

// Named per-agent columns exchanged between the observation, policy and
// transition functions of one substep.
template <ad::Scalar Real>
struct Signals {
  std::map<std::string, std::vector<Real>> reals;
  std::map<std::string, std::vector<int32_t>> ints;
};

// Parameter values visible to substeps. Entries are usually the ThetaVector
// values lifted into the run's scalar type.
template <ad::Scalar Real>
class ParameterSet {
 public:
  ParameterSet() = default;

  // Every theta entry as a constant of type Real.
  static ParameterSet Constants(const ThetaVector& theta) {
    ParameterSet out;
    for (const auto& e : theta.entries()) out.Set(e.name, Real(e.value));
    return out;
  }

  void Set(const std::string& name, Real value) { values_[name] = value; }
  bool Has(const std::string& name) const { return values_.contains(name); }
  Real Get(const std::string& name, double fallback) const {
    auto it = values_.find(name);
    return it == values_.end() ? Real(fallback) : it->second;
  }
  const std::map<std::string, Real>& values() const { return values_; }

 private:
  std::map<std::string, Real> values_;
};

// Aggregate quantities collected during one step.
template <ad::Scalar Real>
struct StepRecord {
  std::map<std::string, Real> values;

  void Add(const std::string& name, const Real& v) {
    auto [it, inserted] = values.try_emplace(name, v);
    if (!inserted) it->second = it->second + v;
  }
  void EnsureMetric(const std::string& name) {
    values.try_emplace(name, Real(0.0));
  }
};

struct SubstepSpec {
  std::string name;
  std::string observation_fn = "none";
  std::string policy_fn = "none";
  std::string transition_fn;
  AgentPredicate active;
  std::optional<std::string> layer;
};

template <ad::Scalar Real>
struct SubstepContext {
  BasicStateTable<Real>& state;
  EnvState& env;
  const ContactGraph& graph;
  const GraphLayer* layer;  // null when the substep has no layer
  const ParameterSet<Real>& params;
  ad::SamplingSpec sampling;
  uint64_t seed = 0;
  uint32_t step = 0;
  uint32_t tag = 0;
  std::span<const uint8_t> active;  // empty: every agent is active
  StepRecord<Real>& record;

  bool IsActive(std::size_t i) const { return active.empty() || active[i]; }

  // The random stream of agent i for this substep and step.
  CounterRng AgentStream(uint32_t agent) const {
    return CounterRng(seed, StreamKey{agent, step, tag});
  }
};

template <ad::Scalar Real>
class SubstepRegistry {
 public:
  using ObservationFn =
      std::function<Signals<Real>(const SubstepContext<Real>&)>;
  using PolicyFn = std::function<Signals<Real>(const SubstepContext<Real>&,
                                               const Signals<Real>&)>;
  using TransitionFn =
      std::function<void(SubstepContext<Real>&, const Signals<Real>&)>;
  using AggregateFn =
      std::function<void(const BasicStateTable<Real>&, StepRecord<Real>&)>;

  SubstepRegistry() {
    RegisterObservation("none", [](const SubstepContext<Real>&) {
      return Signals<Real>{};
    });
    RegisterPolicy("none", [](const SubstepContext<Real>&,
                              const Signals<Real>& obs) { return obs; });
  }

  void RegisterObservation(const std::string& id, ObservationFn fn) {
    Insert(observations_, id, std::move(fn), "observation");
  }
  void RegisterPolicy(const std::string& id, PolicyFn fn) {
    Insert(policies_, id, std::move(fn), "policy");
  }
  void RegisterTransition(const std::string& id, TransitionFn fn) {
    Insert(transitions_, id, std::move(fn), "transition");
  }
  void SetAggregator(AggregateFn fn) { aggregator_ = std::move(fn); }

  bool HasObservation(const std::string& id) const {
    return observations_.contains(id);
  }
  bool HasPolicy(const std::string& id) const { return policies_.contains(id); }
  bool HasTransition(const std::string& id) const {
    return transitions_.contains(id);
  }

  const ObservationFn& Observation(const std::string& id) const {
    return Lookup(observations_, id, "observation");
  }
  const PolicyFn& Policy(const std::string& id) const {
    return Lookup(policies_, id, "policy");
  }
  const TransitionFn& Transition(const std::string& id) const {
    return Lookup(transitions_, id, "transition");
  }
  const AggregateFn& aggregator() const { return aggregator_; }

 private:
  template <typename Fn>
  static void Insert(std::map<std::string, Fn>& table, const std::string& id,
                     Fn fn, const char* what) {
    if (!table.emplace(id, std::move(fn)).second) {
      Fail(ErrorKind::kConfig,
           std::string(what) + " function '" + id + "' registered twice");
    }
  }
  template <typename Fn>
  static const Fn& Lookup(const std::map<std::string, Fn>& table,
                          const std::string& id, const char* what) {
    auto it = table.find(id);
    if (it == table.end()) {
      Fail(ErrorKind::kConfig,
           std::string("unknown ") + what + " function '" + id + "'");
    }
    return it->second;
  }

  std::map<std::string, ObservationFn> observations_;
  std::map<std::string, PolicyFn> policies_;
  std::map<std::string, TransitionFn> transitions_;
  AggregateFn aggregator_;
};

}  // namespace diffabm

#endif  // DIFFABM_CORE_SUBSTEP_H_

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

#ifndef DIFFABM_CORE_PREDICATE_H_
#define DIFFABM_CORE_PREDICATE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "diffabm/core/state_table.h"

namespace diffabm {

// Conjunction of per-column conditions over agent properties. The empty
// predicate matches every agent.
class AgentPredicate {
 public:
  struct Condition {
    enum class Kind { kIn, kRange };
    Kind kind = Kind::kIn;
    std::string column;
    std::vector<std::string> labels;  // kIn: categorical labels
    double lower = 0.0;               // kRange: lower <= value < upper
    double upper = 0.0;
  };

  AgentPredicate& WhereIn(std::string column, std::vector<std::string> labels) {
    conditions_.push_back(
        {Condition::Kind::kIn, std::move(column), std::move(labels), 0, 0});
    return *this;
  }
  AgentPredicate& WhereRange(std::string column, double lower, double upper) {
    conditions_.push_back(
        {Condition::Kind::kRange, std::move(column), {}, lower, upper});
    return *this;
  }

  bool matches_all() const { return conditions_.empty(); }
  const std::vector<Condition>& conditions() const { return conditions_; }
  std::string Describe() const;

  // One byte per agent: 1 when the agent satisfies every condition. Throws
  // kConfig when a column or label does not exist.
  template <typename Real>
  std::vector<uint8_t> Evaluate(const BasicStateTable<Real>& state) const {
    std::vector<uint8_t> mask(state.num_agents(), 1);
    for (const Condition& c : conditions_) {
      if (c.kind == Condition::Kind::kIn) {
        const CategoricalColumn& column = state.categorical(c.column);
        std::vector<uint8_t> allowed(column.domain.size(), 0);
        for (const auto& label : c.labels) allowed[column.Code(label)] = 1;
        for (std::size_t i = 0; i < mask.size(); ++i) {
          mask[i] &= allowed[column.values[i]];
        }
      } else {
        const auto values = state.Reals(c.column);
        for (std::size_t i = 0; i < mask.size(); ++i) {
          const double v = ad::ValueOf(values[i]);
          mask[i] &= static_cast<uint8_t>(v >= c.lower && v < c.upper);
        }
      }
    }
    return mask;
  }

 private:
  std::vector<Condition> conditions_;
};

}  // namespace diffabm

#endif  // DIFFABM_CORE_PREDICATE_H_

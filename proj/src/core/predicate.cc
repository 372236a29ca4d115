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

#include "diffabm/core/predicate.h"

#include <sstream>

namespace diffabm {

std::string AgentPredicate::Describe() const {
  if (conditions_.empty()) return "true";
  std::ostringstream out;
  for (std::size_t k = 0; k < conditions_.size(); ++k) {
    if (k > 0) out << " AND ";
    const Condition& c = conditions_[k];
    if (c.kind == Condition::Kind::kIn) {
      out << c.column << " in {";
      for (std::size_t j = 0; j < c.labels.size(); ++j) {
        out << (j ? "," : "") << c.labels[j];
      }
      out << "}";
    } else {
      out << c.lower << " <= " << c.column << " < " << c.upper;
    }
  }
  return out.str();
}

}  // namespace diffabm

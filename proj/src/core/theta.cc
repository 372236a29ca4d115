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

#include "diffabm/core/theta.h"

#include <cmath>

#include "diffabm/core/errors.h"

namespace diffabm {
namespace {

void CheckInBounds(const ThetaEntry& e) {
  if (!(e.lower <= e.value && e.value <= e.upper) || !std::isfinite(e.value)) {
    Fail(ErrorKind::kConfig, "theta '" + e.name + "' value " +
                                 std::to_string(e.value) + " outside [" +
                                 std::to_string(e.lower) + ", " +
                                 std::to_string(e.upper) + "]");
  }
}

}  // namespace

void ThetaVector::Add(std::string name, double value, double lower,
                      double upper) {
  if (name.empty()) Fail(ErrorKind::kConfig, "theta entry needs a name");
  if (Find(name)) Fail(ErrorKind::kConfig, "duplicate theta '" + name + "'");
  if (!(lower < upper)) {
    Fail(ErrorKind::kConfig, "theta '" + name + "' needs lower < upper");
  }
  ThetaEntry entry{std::move(name), value, lower, upper};
  CheckInBounds(entry);
  entries_.push_back(std::move(entry));
}

void ThetaVector::Set(const std::string& name, double value) {
  const auto index = Find(name);
  if (!index) Fail(ErrorKind::kConfig, "unknown theta '" + name + "'");
  ThetaEntry updated = entries_[*index];
  updated.value = value;
  CheckInBounds(updated);
  entries_[*index] = updated;
}

std::optional<std::size_t> ThetaVector::Find(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

double ThetaVector::Value(const std::string& name) const {
  const auto index = Find(name);
  if (!index) Fail(ErrorKind::kConfig, "unknown theta '" + name + "'");
  return entries_[*index].value;
}

std::vector<double> ThetaVector::Values() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.value);
  return out;
}

std::vector<std::string> ThetaVector::Names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

}  // namespace diffabm

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

#ifndef DIFFABM_CORE_THETA_H_
#define DIFFABM_CORE_THETA_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace diffabm {

struct ThetaEntry {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Named, box-bounded structural parameters.
class ThetaVector {
 public:
  ThetaVector() = default;

  // Throws kConfig on duplicate names, empty or inverted bounds, or a value
  // outside [lower, upper].
  void Add(std::string name, double value, double lower, double upper);
  void Set(const std::string& name, double value);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<ThetaEntry>& entries() const { return entries_; }
  const ThetaEntry& operator[](std::size_t i) const { return entries_[i]; }

  std::optional<std::size_t> Find(const std::string& name) const;
  double Value(const std::string& name) const;
  std::vector<double> Values() const;
  std::vector<std::string> Names() const;

 private:
  std::vector<ThetaEntry> entries_;
};

}  // namespace diffabm

#endif  // DIFFABM_CORE_THETA_H_

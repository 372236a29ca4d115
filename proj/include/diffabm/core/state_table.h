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

#ifndef DIFFABM_CORE_STATE_TABLE_H_
#define DIFFABM_CORE_STATE_TABLE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "diffabm/autodiff/scalar.h"
#include "diffabm/core/errors.h"

namespace diffabm {

enum class ColumnRole { kStatic, kDynamic };

struct CategoricalColumn {
  std::string name;
  ColumnRole role = ColumnRole::kStatic;
  std::vector<std::string> domain;
  std::vector<int32_t> values;

  // Index of `label` in the domain; throws kConfig if absent.
  int32_t Code(std::string_view label) const {
    for (std::size_t i = 0; i < domain.size(); ++i) {
      if (domain[i] == label) return static_cast<int32_t>(i);
    }
    Fail(ErrorKind::kConfig, "column '" + name + "' has no category '" +
                                 std::string(label) + "'");
  }
};

template <typename Real>
struct RealColumn {
  std::string name;
  ColumnRole role = ColumnRole::kStatic;
  bool differentiable = false;
  std::vector<Real> values;
};

// Columnar per-agent state: one contiguous array per property. Static columns
// cannot be opened for writing.
template <typename Real>
class BasicStateTable {
 public:
  BasicStateTable() = default;
  explicit BasicStateTable(std::size_t num_agents) : num_agents_(num_agents) {}

  std::size_t num_agents() const { return num_agents_; }

  void AddCategorical(std::string name, ColumnRole role,
                      std::vector<std::string> domain,
                      std::vector<int32_t> values) {
    CheckNewColumn(name, values.size());
    CategoricalColumn column{std::move(name), role, std::move(domain),
                             std::move(values)};
    CheckDomain(column, ErrorKind::kValidation);
    categorical_index_[column.name] = categorical_.size();
    categorical_.push_back(std::move(column));
  }

  void AddReal(std::string name, ColumnRole role, bool differentiable,
               std::vector<Real> values) {
    CheckNewColumn(name, values.size());
    real_index_[name] = real_.size();
    real_.push_back(
        RealColumn<Real>{std::move(name), role, differentiable,
                         std::move(values)});
  }

  bool HasCategorical(std::string_view name) const {
    return categorical_index_.contains(std::string(name));
  }
  bool HasReal(std::string_view name) const {
    return real_index_.contains(std::string(name));
  }

  const CategoricalColumn& categorical(std::string_view name) const {
    return categorical_[CategoricalIndex(name)];
  }
  const RealColumn<Real>& real(std::string_view name) const {
    return real_[RealIndex(name)];
  }

  std::span<const int32_t> Codes(std::string_view name) const {
    return categorical(name).values;
  }
  std::span<const Real> Reals(std::string_view name) const {
    return real(name).values;
  }

  // Write access to a dynamic column; throws kRuntimeState for static ones.
  std::span<int32_t> MutableCodes(std::string_view name) {
    CategoricalColumn& column = categorical_[CategoricalIndex(name)];
    CheckWritable(column.role, column.name);
    return column.values;
  }
  std::span<Real> MutableReals(std::string_view name) {
    RealColumn<Real>& column = real_[RealIndex(name)];
    CheckWritable(column.role, column.name);
    return column.values;
  }

  const std::vector<CategoricalColumn>& categorical_columns() const {
    return categorical_;
  }
  const std::vector<RealColumn<Real>>& real_columns() const { return real_; }

  // Every categorical value must lie in its declared domain.
  void CheckDomains(ErrorKind kind) const {
    for (const auto& column : categorical_) CheckDomain(column, kind);
  }

  // Copies the dynamic values of the agents selected by `mask` from `staged`,
  // which must share this table's schema.
  void CommitDynamicRows(const BasicStateTable& staged,
                         std::span<const uint8_t> mask) {
    for (std::size_t c = 0; c < categorical_.size(); ++c) {
      if (categorical_[c].role != ColumnRole::kDynamic) continue;
      auto& dst = categorical_[c].values;
      const auto& src = staged.categorical_[c].values;
      for (std::size_t i = 0; i < num_agents_; ++i) {
        if (mask[i]) dst[i] = src[i];
      }
    }
    for (std::size_t c = 0; c < real_.size(); ++c) {
      if (real_[c].role != ColumnRole::kDynamic) continue;
      auto& dst = real_[c].values;
      const auto& src = staged.real_[c].values;
      for (std::size_t i = 0; i < num_agents_; ++i) {
        if (mask[i]) dst[i] = src[i];
      }
    }
  }

  // Same schema and values with a different scalar type. Real values become
  // constants of the target type.
  template <typename Other>
  BasicStateTable<Other> Convert() const {
    BasicStateTable<Other> out(num_agents_);
    for (const auto& c : categorical_) {
      out.AddCategorical(c.name, c.role, c.domain, c.values);
    }
    for (const auto& c : real_) {
      std::vector<Other> values;
      values.reserve(c.values.size());
      for (const Real& v : c.values) values.push_back(Other(ad::ValueOf(v)));
      out.AddReal(c.name, c.role, c.differentiable, std::move(values));
    }
    return out;
  }

  std::size_t MemoryBytes() const {
    std::size_t bytes = 0;
    for (const auto& c : categorical_) bytes += c.values.capacity() * 4;
    for (const auto& c : real_) bytes += c.values.capacity() * sizeof(Real);
    return bytes;
  }

 private:
  void CheckNewColumn(const std::string& name, std::size_t length) const {
    if (HasCategorical(name) || HasReal(name)) {
      Fail(ErrorKind::kValidation, "duplicate column '" + name + "'");
    }
    if (length != num_agents_) {
      Fail(ErrorKind::kValidation,
           "column '" + name + "' has length " + std::to_string(length) +
               ", expected " + std::to_string(num_agents_));
    }
  }

  static void CheckDomain(const CategoricalColumn& column, ErrorKind kind) {
    const auto size = static_cast<int32_t>(column.domain.size());
    for (std::size_t i = 0; i < column.values.size(); ++i) {
      const int32_t v = column.values[i];
      if (v < 0 || v >= size) {
        Fail(kind, "column '" + column.name + "' agent " + std::to_string(i) +
                       " has out-of-domain value " + std::to_string(v));
      }
    }
  }

  static void CheckWritable(ColumnRole role, const std::string& name) {
    if (role == ColumnRole::kStatic) {
      Fail(ErrorKind::kRuntimeState,
           "static column '" + name + "' cannot be modified");
    }
  }

  std::size_t CategoricalIndex(std::string_view name) const {
    auto it = categorical_index_.find(std::string(name));
    if (it == categorical_index_.end()) {
      Fail(ErrorKind::kConfig,
           "no categorical column '" + std::string(name) + "'");
    }
    return it->second;
  }
  std::size_t RealIndex(std::string_view name) const {
    auto it = real_index_.find(std::string(name));
    if (it == real_index_.end()) {
      Fail(ErrorKind::kConfig, "no real column '" + std::string(name) + "'");
    }
    return it->second;
  }

  std::size_t num_agents_ = 0;
  std::vector<CategoricalColumn> categorical_;
  std::vector<RealColumn<Real>> real_;
  std::unordered_map<std::string, std::size_t> categorical_index_;
  std::unordered_map<std::string, std::size_t> real_index_;
};

using AgentStateTable = BasicStateTable<double>;

}  // namespace diffabm

#endif  // DIFFABM_CORE_STATE_TABLE_H_

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

#ifndef DIFFABM_AUTODIFF_TAPE_H_
#define DIFFABM_AUTODIFF_TAPE_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace diffabm::ad {

using NodeId = uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class OpKind : uint8_t {
  kConstant,
  kInput,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kScale,
  kExp,
  kLog,
  kExpm1,
  kLog1p,
  kSigmoid,
  kTanh,
  kSqrt,
  kSum,
  kMax,
  kStraightThrough,
  kCustom,
};

class Var;

// Append-only record of a scalar computation. Each node stores its value and
// the local partial derivative with respect to each parent; parents always
// precede their children, so node order is a topological order.
class Tape {
 public:
  Tape();

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Appends a node. Throws kInternal if a parent id is not on the tape or if
  // the partial count differs from the parent count.
  NodeId Record(OpKind op, std::span<const NodeId> parents, double value,
                std::span<const double> partials);

  // Allocation-light paths used by the Var operators.
  NodeId Record1(OpKind op, NodeId parent, double value, double partial);
  NodeId Record2(OpKind op, NodeId a, NodeId b, double value, double da,
                 double db);

  // Registers an independent variable; Backward() reports derivatives in
  // registration order.
  Var Input(std::string name, double value);

  // Leaf node with no parents; contributes nothing to any gradient.
  Var Constant(double value);

  std::size_t size() const { return ops_.size(); }
  std::size_t num_inputs() const { return inputs_.size(); }
  const std::vector<NodeId>& inputs() const { return inputs_; }
  const std::vector<std::string>& input_names() const { return input_names_; }

  double value(NodeId id) const { return values_[id]; }
  OpKind op(NodeId id) const { return ops_[id]; }
  std::span<const NodeId> parents(NodeId id) const;
  std::span<const double> partials(NodeId id) const;

  // Reverse sweep seeded with d(output)/d(output) = 1. Returns the adjoint of
  // every node. The tape itself is not modified.
  std::vector<double> Adjoints(NodeId output) const;

  // Reverse sweep seeded with an arbitrary linear combination of nodes.
  std::vector<double> Adjoints(
      std::span<const std::pair<NodeId, double>> seeds) const;

  // d(output)/d(input_k) for every registered input, one sweep.
  std::vector<double> Backward(NodeId output) const;
  std::vector<double> Backward(const Var& output) const;

  // Forward sweep over the recorded linearisation: given a tangent over the
  // registered inputs, returns J * tangent for each requested output.
  std::vector<double> Jvp(std::span<const double> tangent,
                          std::span<const NodeId> outputs) const;

  bool Owns(const Var& v) const;

  void Reserve(std::size_t nodes, std::size_t edges);
  std::size_t MemoryBytes() const;

 private:
  void CheckOutput(NodeId output) const;

  std::vector<double> values_;
  std::vector<OpKind> ops_;
  std::vector<uint64_t> offsets_;  // size() + 1 entries into parents_/partials_
  std::vector<NodeId> parents_;
  std::vector<double> partials_;
  std::vector<NodeId> inputs_;
  std::vector<std::string> input_names_;
};

// Handle to a tape node plus its value. A Var without a tape is a constant
// and is never recorded.
class Var {
 public:
  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT: implicit constants

  double value() const { return value_; }
  NodeId id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool is_constant() const { return tape_ == nullptr; }

 private:
  friend class Tape;
  friend Var MakeVar(Tape& tape, NodeId id);
  Var(Tape* tape, NodeId id, double value)
      : value_(value), id_(id), tape_(tape) {}

  double value_ = 0.0;
  NodeId id_ = kNoNode;
  Tape* tape_ = nullptr;
};

// Builds a Var for a node already recorded on `tape`.
Var MakeVar(Tape& tape, NodeId id);

// Records a node whose value is `value` and whose derivative with respect to
// x is `dx`. Constants stay constants.
Var Unary(const Var& x, OpKind op, double value, double dx);
Var Binary(const Var& a, const Var& b, OpKind op, double value, double da,
           double db);

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

// Accumulates a weighted sum into a single tape node with one parent per
// non-constant term, rather than a chain of binary additions.
class VarSum {
 public:
  void Clear() {
    value_ = 0.0;
    tape_ = nullptr;
    ids_.clear();
    weights_.clear();
  }
  void Add(const Var& x, double weight = 1.0);
  Var Result() const;

 private:
  double value_ = 0.0;
  Tape* tape_ = nullptr;
  std::vector<NodeId> ids_;
  std::vector<double> weights_;
};

}  // namespace diffabm::ad

#endif  // DIFFABM_AUTODIFF_TAPE_H_

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

#include "diffabm/autodiff/tape.h"

#include <string>

#include "diffabm/core/errors.h"

namespace diffabm::ad {

Tape::Tape() { offsets_.push_back(0); }

NodeId Tape::Record(OpKind op, std::span<const NodeId> parents, double value,
                    std::span<const double> partials) {
  if (parents.size() != partials.size()) {
    Fail(ErrorKind::kInternal, "node needs one local partial per parent");
  }
  const NodeId id = static_cast<NodeId>(ops_.size());
  for (NodeId p : parents) {
    if (p >= id) {
      Fail(ErrorKind::kInternal,
           "dangling parent id " + std::to_string(p) + " for node " +
               std::to_string(id));
    }
  }
  values_.push_back(value);
  ops_.push_back(op);
  parents_.insert(parents_.end(), parents.begin(), parents.end());
  partials_.insert(partials_.end(), partials.begin(), partials.end());
  offsets_.push_back(parents_.size());
  return id;
}

NodeId Tape::Record1(OpKind op, NodeId parent, double value, double partial) {
  const NodeId id = static_cast<NodeId>(ops_.size());
  values_.push_back(value);
  ops_.push_back(op);
  parents_.push_back(parent);
  partials_.push_back(partial);
  offsets_.push_back(parents_.size());
  return id;
}

NodeId Tape::Record2(OpKind op, NodeId a, NodeId b, double value, double da,
                     double db) {
  const NodeId id = static_cast<NodeId>(ops_.size());
  values_.push_back(value);
  ops_.push_back(op);
  parents_.push_back(a);
  parents_.push_back(b);
  partials_.push_back(da);
  partials_.push_back(db);
  offsets_.push_back(parents_.size());
  return id;
}

Var Tape::Input(std::string name, double value) {
  const NodeId id = Record(OpKind::kInput, {}, value, {});
  inputs_.push_back(id);
  input_names_.push_back(std::move(name));
  return Var(this, id, value);
}

Var Tape::Constant(double value) {
  return Var(this, Record(OpKind::kConstant, {}, value, {}), value);
}

std::span<const NodeId> Tape::parents(NodeId id) const {
  return {parents_.data() + offsets_[id],
          static_cast<std::size_t>(offsets_[id + 1] - offsets_[id])};
}

std::span<const double> Tape::partials(NodeId id) const {
  return {partials_.data() + offsets_[id],
          static_cast<std::size_t>(offsets_[id + 1] - offsets_[id])};
}

void Tape::CheckOutput(NodeId output) const {
  if (output >= size()) {
    Fail(ErrorKind::kContract,
         "node " + std::to_string(output) + " is not on the tape");
  }
}

std::vector<double> Tape::Adjoints(NodeId output) const {
  const std::pair<NodeId, double> seed{output, 1.0};
  return Adjoints(std::span(&seed, 1));
}

std::vector<double> Tape::Adjoints(
    std::span<const std::pair<NodeId, double>> seeds) const {
  std::vector<double> adjoint(size(), 0.0);
  NodeId last = 0;
  for (const auto& [id, weight] : seeds) {
    CheckOutput(id);
    adjoint[id] += weight;
    last = std::max(last, id);
  }
  if (seeds.empty()) return adjoint;
  for (int64_t i = last; i >= 0; --i) {
    const double a = adjoint[i];
    if (a == 0.0) continue;
    const uint64_t begin = offsets_[i];
    const uint64_t end = offsets_[i + 1];
    for (uint64_t e = begin; e < end; ++e) {
      adjoint[parents_[e]] += partials_[e] * a;
    }
  }
  return adjoint;
}

std::vector<double> Tape::Backward(NodeId output) const {
  const std::vector<double> adjoint = Adjoints(output);
  std::vector<double> grad(inputs_.size());
  for (std::size_t k = 0; k < inputs_.size(); ++k) grad[k] = adjoint[inputs_[k]];
  return grad;
}

std::vector<double> Tape::Backward(const Var& output) const {
  if (output.is_constant()) return std::vector<double>(inputs_.size(), 0.0);
  if (!Owns(output)) Fail(ErrorKind::kContract, "output belongs to another tape");
  return Backward(output.id());
}

std::vector<double> Tape::Jvp(std::span<const double> tangent,
                              std::span<const NodeId> outputs) const {
  if (tangent.size() != inputs_.size()) {
    Fail(ErrorKind::kContract, "tangent length " +
                                   std::to_string(tangent.size()) +
                                   " != registered inputs " +
                                   std::to_string(inputs_.size()));
  }
  std::vector<double> dot(size(), 0.0);
  for (std::size_t k = 0; k < inputs_.size(); ++k) dot[inputs_[k]] = tangent[k];
  for (std::size_t i = 0; i < size(); ++i) {
    if (ops_[i] == OpKind::kInput) continue;
    double acc = 0.0;
    for (uint64_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
      acc += partials_[e] * dot[parents_[e]];
    }
    dot[i] = acc;
  }
  std::vector<double> out;
  out.reserve(outputs.size());
  for (NodeId id : outputs) {
    CheckOutput(id);
    out.push_back(dot[id]);
  }
  return out;
}

bool Tape::Owns(const Var& v) const {
  return v.tape() == this && v.id() < size();
}

void Tape::Reserve(std::size_t nodes, std::size_t edges) {
  values_.reserve(nodes);
  ops_.reserve(nodes);
  offsets_.reserve(nodes + 1);
  parents_.reserve(edges);
  partials_.reserve(edges);
}

std::size_t Tape::MemoryBytes() const {
  return values_.capacity() * sizeof(double) +
         ops_.capacity() * sizeof(OpKind) +
         offsets_.capacity() * sizeof(uint64_t) +
         parents_.capacity() * sizeof(NodeId) +
         partials_.capacity() * sizeof(double);
}

Var MakeVar(Tape& tape, NodeId id) {
  if (id >= tape.size()) Fail(ErrorKind::kContract, "node is not on the tape");
  return Var(&tape, id, tape.value(id));
}

Var Unary(const Var& x, OpKind op, double value, double dx) {
  if (x.is_constant()) return Var(value);
  return MakeVar(*x.tape(), x.tape()->Record1(op, x.id(), value, dx));
}

Var Binary(const Var& a, const Var& b, OpKind op, double value, double da,
           double db) {
  if (a.is_constant()) return Unary(b, op, value, db);
  if (b.is_constant()) return Unary(a, op, value, da);
  if (a.tape() != b.tape()) {
    Fail(ErrorKind::kContract, "operands recorded on different tapes");
  }
  return MakeVar(*a.tape(),
                 a.tape()->Record2(op, a.id(), b.id(), value, da, db));
}

Var operator+(const Var& a, const Var& b) {
  return Binary(a, b, OpKind::kAdd, a.value() + b.value(), 1.0, 1.0);
}

Var operator-(const Var& a, const Var& b) {
  return Binary(a, b, OpKind::kSub, a.value() - b.value(), 1.0, -1.0);
}

Var operator*(const Var& a, const Var& b) {
  return Binary(a, b, OpKind::kMul, a.value() * b.value(), b.value(),
                a.value());
}

Var operator/(const Var& a, const Var& b) {
  const double q = a.value() / b.value();
  return Binary(a, b, OpKind::kDiv, q, 1.0 / b.value(), -q / b.value());
}

Var operator-(const Var& a) {
  return Unary(a, OpKind::kNeg, -a.value(), -1.0);
}

void VarSum::Add(const Var& x, double weight) {
  value_ += weight * x.value();
  if (x.is_constant()) return;
  if (tape_ == nullptr) {
    tape_ = x.tape();
  } else if (tape_ != x.tape()) {
    Fail(ErrorKind::kContract, "operands recorded on different tapes");
  }
  ids_.push_back(x.id());
  weights_.push_back(weight);
}

Var VarSum::Result() const {
  if (tape_ == nullptr) return Var(value_);
  if (ids_.size() == 1 && weights_[0] == 1.0 && value_ == tape_->value(ids_[0])) {
    return MakeVar(*tape_, ids_[0]);
  }
  return MakeVar(*tape_, tape_->Record(OpKind::kSum, ids_, value_, weights_));
}

}  // namespace diffabm::ad

// Copyright 2026 The JMIE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jmie/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "jmie/error.hpp"

namespace jmie::ad {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Parameter::Parameter(std::string n, Shape s)
    : name(std::move(n)),
      shape(std::move(s)),
      value(numel(shape), 0.0),
      grad(numel(shape), 0.0) {}

void Parameter::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

Parameter& ParameterSet::add(const std::string& name, Shape shape) {
  if (find(name) != nullptr) {
    throw Error(ErrorCode::kInvalidConfig, "duplicate parameter " + name);
  }
  params_.emplace_back(name, std::move(shape));
  return params_.back();
}

Parameter* ParameterSet::find(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Parameter* ParameterSet::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Parameter& ParameterSet::get(const std::string& name) {
  Parameter* p = find(name);
  if (p == nullptr) throw Error(ErrorCode::kInvalidConfig, "no parameter " + name);
  return *p;
}

const Parameter& ParameterSet::get(const std::string& name) const {
  const Parameter* p = find(name);
  if (p == nullptr) throw Error(ErrorCode::kInvalidConfig, "no parameter " + name);
  return *p;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

void ParameterSet::round_to_float32() {
  for (auto& p : params_) {
    for (double& v : p.value) v = static_cast<double>(static_cast<float>(v));
  }
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name != other.params_[i].name ||
        params_[i].shape != other.params_[i].shape ||
        params_[i].value != other.params_[i].value) {
      return false;
    }
  }
  return true;
}

const Shape& Tensor::shape() const { return tape_->node(id_).shape; }
std::size_t Tensor::numel() const { return ad::numel(shape()); }

std::size_t Tensor::rows() const {
  const Shape& s = shape();
  return s.empty() ? 1 : s[0];
}

std::size_t Tensor::cols() const {
  const Shape& s = shape();
  return s.size() < 2 ? (s.empty() ? 1 : s[0]) : s[1];
}

std::span<const double> Tensor::data() const { return tape_->node(id_).values(); }
std::span<double> Tensor::grad() const { return tape_->node(id_).grads(); }
bool Tensor::requires_grad() const { return tape_->node(id_).requires_grad; }

double Tensor::item() const {
  if (numel() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "item() on tensor of shape " + shape_string(shape()));
  }
  return data()[0];
}

Tensor Tape::push(Node node) {
  if (check_finite_) {
    for (double v : node.values()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "non-finite value at node " + std::to_string(nodes_.size()));
      }
    }
  }
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::constant(Shape shape, std::vector<double> values) {
  if (values.size() != numel(shape)) {
    throw Error(ErrorCode::kShapeMismatch,
                "constant of shape " + shape_string(shape) + " given " +
                    std::to_string(values.size()) + " values");
  }
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(values);
  return push(std::move(n));
}

Tensor Tape::zeros(Shape shape) {
  const std::size_t n = numel(shape);
  return constant(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tape::scalar(double v) { return constant({}, {v}); }

Tensor Tape::param(Parameter& p) {
  Node n;
  n.shape = p.shape;
  n.param = &p;
  n.requires_grad = true;
  return push(std::move(n));
}

Tensor Tape::frozen(Parameter& p) {
  Node n;
  n.shape = p.shape;
  n.value = p.value;
  return push(std::move(n));
}

Tensor Tape::record(Shape shape, std::vector<double> value,
                    std::initializer_list<Tensor> parents, BackwardFn backward) {
  bool needs = false;
  for (const auto& t : parents) needs = needs || node(t.id()).requires_grad;
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(value);
  if (needs) {
    n.requires_grad = true;
    n.grad.assign(n.value.size(), 0.0);
    n.backward = std::move(backward);
  }
  return push(std::move(n));
}

Tensor Tape::record(Shape shape, std::vector<double> value,
                    const std::vector<Tensor>& parents, BackwardFn backward) {
  bool needs = false;
  for (const auto& t : parents) needs = needs || node(t.id()).requires_grad;
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(value);
  if (needs) {
    n.requires_grad = true;
    n.grad.assign(n.value.size(), 0.0);
    n.backward = std::move(backward);
  }
  return push(std::move(n));
}

Tensor Tape::record_source(Shape shape, std::vector<double> value,
                           bool requires_grad, BackwardFn backward) {
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(value);
  if (requires_grad) {
    n.requires_grad = true;
    n.grad.assign(n.value.size(), 0.0);
    n.backward = std::move(backward);
  }
  return push(std::move(n));
}

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw Error(ErrorCode::kNonScalarLoss,
                "backward() needs a scalar loss, got shape " +
                    shape_string(loss.shape()));
  }
  for (auto& n : nodes_) {
    if (n.param == nullptr) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  }
  Node& root = nodes_[loss.id()];
  if (!root.requires_grad) return;
  root.grads()[0] += 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.requires_grad && n.backward) n.backward(*this, id);
  }
}

}  // namespace jmie::ad

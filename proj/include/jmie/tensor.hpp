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

#ifndef JMIE_TENSOR_HPP_
#define JMIE_TENSOR_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace jmie::ad {

// Row-major shape. Rank 0 is a scalar, rank 1 a vector, rank 2 a matrix.
using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

// A named trainable array that outlives tapes. Gradients accumulate here
// across backward passes until zero_grad().
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  // Frozen parameters are skipped by the optimizer.
  bool trainable = true;

  Parameter(std::string n, Shape s);
  std::size_t size() const { return value.size(); }
  void zero_grad();
};

// Ordered parameter collection with stable addresses.
class ParameterSet {
 public:
  Parameter& add(const std::string& name, Shape shape);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  std::size_t scalar_count() const;
  // Rounds every value through float32, matching a checkpoint round trip.
  void round_to_float32();
  bool operator==(const ParameterSet& other) const;

 private:
  std::deque<Parameter> params_;
};

class Tape;

// Handle to a node recorded on a tape. Cheap to copy; valid while the tape
// lives.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const;
  std::size_t rows() const;
  std::size_t cols() const;
  std::span<const double> data() const;
  std::span<double> grad() const;
  bool requires_grad() const;

  double item() const;
  double at(std::size_t i) const { return data()[i]; }
  double at(std::size_t r, std::size_t c) const { return data()[r * cols() + c]; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Records operations in execution order; backward() walks them in reverse.
// A tape is single-threaded.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    Parameter* param = nullptr;
    bool requires_grad = false;
    BackwardFn backward;

    std::span<double> values() {
      return param ? std::span<double>(param->value) : std::span<double>(value);
    }
    std::span<double> grads() {
      return param ? std::span<double>(param->grad) : std::span<double>(grad);
    }
  };

  explicit Tape(bool check_finite = false) : check_finite_(check_finite) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor constant(Shape shape, std::vector<double> values);
  Tensor zeros(Shape shape);
  Tensor scalar(double v);
  // Leaf bound to a parameter: reads its value, accumulates into its grad.
  Tensor param(Parameter& p);
  // Same storage binding without gradient flow.
  Tensor frozen(Parameter& p);

  // Seeds d(loss)/d(loss) = 1 and propagates. Intermediate gradients are
  // reset on every call; parameter gradients accumulate.
  void backward(const Tensor& loss);

  // Used by operations to append a node; parents decide requires_grad.
  Tensor record(Shape shape, std::vector<double> value,
                std::initializer_list<Tensor> parents, BackwardFn backward);
  Tensor record(Shape shape, std::vector<double> value,
                const std::vector<Tensor>& parents, BackwardFn backward);

  // Appends a node with no tape parents, e.g. a gather from parameter
  // storage whose backward writes straight into the parameter gradient.
  Tensor record_source(Shape shape, std::vector<double> value,
                       bool requires_grad, BackwardFn backward);

  Node& node(std::size_t id) { return nodes_[id]; }
  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  bool check_finite() const { return check_finite_; }

 private:
  Tensor push(Node node);

  std::deque<Node> nodes_;
  bool check_finite_;
};

}  // namespace jmie::ad

#endif  // JMIE_TENSOR_HPP_

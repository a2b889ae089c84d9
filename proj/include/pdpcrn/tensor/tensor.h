// Copyright 2026 The PDPCRN Authors. All Rights Reserved.
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

#ifndef PDPCRN_TENSOR_TENSOR_H_
#define PDPCRN_TENSOR_TENSOR_H_

#include <concepts>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pdpcrn {

// Scalar types a graph may be built in. One graph never mixes the two.
template <typename T>
concept Real = std::same_as<T, float> || std::same_as<T, double>;

using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GraphError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <Real T>
struct TensorStorage {
  Shape shape;
  std::vector<T> data;
  // Empty until a gradient flows into this tensor.
  std::vector<T> grad;
  bool requires_grad = false;
  // Id of the tape that produced this tensor; 0 for leaves.
  uint64_t tape_id = 0;

  T* MutableGrad() {
    if (grad.empty()) grad.assign(data.size(), T(0));
    return grad.data();
  }
};

template <Real T>
class Tensor;

// Records differentiable operations in execution order. A tape belongs to
// one thread; it is consumed by Backward().
template <Real T>
class Tape {
 public:
  using StoragePtr = std::shared_ptr<TensorStorage<T>>;

  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  uint64_t id() const { return id_; }
  size_t size() const { return entries_.size(); }

  void Record(std::string_view op, std::vector<StoragePtr> outputs,
              std::function<void()> backward);

  // Seeds d(loss)/d(loss) = 1, runs every recorded backward closure once in
  // reverse order, then clears the tape. Leaf gradients accumulate.
  void Backward(const Tensor<T>& loss);

  void Clear();

  // The tape installed on this thread by the innermost GradSession.
  static Tape* Active();

 private:
  template <Real U>
  friend class GradSession;

  struct Entry {
    std::string_view op;
    std::vector<StoragePtr> outputs;
    std::function<void()> backward;
  };

  uint64_t id_;
  std::vector<Entry> entries_;
  static thread_local Tape* active_;
};

// RAII scope that owns a fresh tape and makes it the thread's active tape.
// Operations on tensors that require gradients are recorded only inside a
// session.
template <Real T>
class GradSession {
 public:
  GradSession();
  ~GradSession();
  GradSession(const GradSession&) = delete;
  GradSession& operator=(const GradSession&) = delete;

  Tape<T>& tape() { return tape_; }
  void Backward(const Tensor<T>& loss) { tape_.Backward(loss); }

 private:
  Tape<T> tape_;
  Tape<T>* previous_;
};

// Shared handle to a dense row-major array. Copies alias the same storage.
template <Real T>
class Tensor {
 public:
  using Storage = TensorStorage<T>;
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> values);

  static Tensor Scalar(T value) { return Tensor(Shape{}, std::vector<T>{value}); }
  static Tensor Zeros(Shape shape) { return Tensor(std::move(shape), T(0)); }
  static Tensor Ones(Shape shape) { return Tensor(std::move(shape), T(1)); }
  static Tensor ZerosLike(const Tensor& t) { return Tensor(t.shape(), T(0)); }
  static Tensor OnesLike(const Tensor& t) { return Tensor(t.shape(), T(1)); }

  bool defined() const { return static_cast<bool>(storage_); }
  const Shape& shape() const { return storage_->shape; }
  int rank() const { return static_cast<int>(storage_->shape.size()); }
  // Negative axes count from the back.
  int64_t dim(int axis) const;
  int64_t numel() const { return static_cast<int64_t>(storage_->data.size()); }

  std::span<const T> data() const { return storage_->data; }
  std::span<T> mutable_data() { return storage_->data; }
  const T* raw() const { return storage_->data.data(); }
  T* mutable_raw() { return storage_->data.data(); }

  bool has_grad() const { return defined() && !storage_->grad.empty(); }
  // Zeros when no gradient has been accumulated yet.
  std::vector<T> grad() const;
  std::span<T> mutable_grad() { return {storage_->MutableGrad(), storage_->data.size()}; }
  void ZeroGrad() { storage_->grad.clear(); }

  bool requires_grad() const { return defined() && storage_->requires_grad; }
  Tensor& set_requires_grad(bool value);

  T item() const;
  T at(std::initializer_list<int64_t> index) const;

  // Copy of the values with no gradient history.
  Tensor Detach() const;
  template <Real U>
  Tensor<U> Cast() const;

  const std::shared_ptr<Storage>& storage() const { return storage_; }

 private:
  std::shared_ptr<Storage> storage_;
};

namespace internal {

// Returns the tape an op on `inputs` must record on, or nullptr when no input
// requires a gradient or no session is active. Throws GraphError when an
// input was produced on a different tape.
template <Real T>
Tape<T>* RecordingTape(std::initializer_list<const Tensor<T>*> inputs);

template <Real T>
Tape<T>* RecordingTape(std::span<const Tensor<T>> inputs);

// Marks `outputs` as produced by `tape` and registers the backward closure.
template <Real T>
void RecordOp(Tape<T>* tape, std::string_view op,
              std::initializer_list<const Tensor<T>*> outputs,
              std::function<void()> backward);

}  // namespace internal

}  // namespace pdpcrn

#endif  // PDPCRN_TENSOR_TENSOR_H_

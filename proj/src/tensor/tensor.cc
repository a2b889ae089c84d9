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

#include "pdpcrn/tensor/tensor.h"

#include <atomic>
#include <sstream>

namespace pdpcrn {

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) throw ShapeError("negative dimension in shape " + ShapeToString(shape));
    n *= d;
  }
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {
std::atomic<uint64_t> next_tape_id{1};
}  // namespace

template <Real T>
thread_local Tape<T>* Tape<T>::active_ = nullptr;

template <Real T>
Tape<T>::Tape() : id_(next_tape_id.fetch_add(1)) {}

template <Real T>
Tape<T>* Tape<T>::Active() {
  return active_;
}

template <Real T>
void Tape<T>::Record(std::string_view op, std::vector<StoragePtr> outputs,
                     std::function<void()> backward) {
  entries_.push_back({op, std::move(outputs), std::move(backward)});
}

template <Real T>
void Tape<T>::Backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw GraphError("backward: loss must be a scalar, got shape " +
                     (loss.defined() ? ShapeToString(loss.shape()) : std::string("<undefined>")));
  }
  if (!loss.requires_grad() || loss.storage()->tape_id != id_) {
    throw GraphError("backward: loss is detached from this tape");
  }
  loss.storage()->MutableGrad()[0] += T(1);
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    bool any_grad = false;
    for (const auto& out : it->outputs) any_grad = any_grad || !out->grad.empty();
    if (any_grad) it->backward();
  }
  Clear();
}

template <Real T>
void Tape<T>::Clear() {
  entries_.clear();
  // A cleared tape must not accept tensors recorded before the clear.
  id_ = next_tape_id.fetch_add(1);
}

template <Real T>
GradSession<T>::GradSession() : previous_(Tape<T>::active_) {
  Tape<T>::active_ = &tape_;
}

template <Real T>
GradSession<T>::~GradSession() {
  Tape<T>::active_ = previous_;
}

template <Real T>
Tensor<T>::Tensor(Shape shape, T fill) : storage_(std::make_shared<Storage>()) {
  const int64_t n = NumElements(shape);
  storage_->shape = std::move(shape);
  storage_->data.assign(static_cast<size_t>(n), fill);
}

template <Real T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values) : storage_(std::make_shared<Storage>()) {
  const int64_t n = NumElements(shape);
  if (n != static_cast<int64_t>(values.size())) {
    throw ShapeError("tensor shape " + ShapeToString(shape) + " holds " + std::to_string(n) +
                     " values, got " + std::to_string(values.size()));
  }
  storage_->shape = std::move(shape);
  storage_->data = std::move(values);
}

template <Real T>
int64_t Tensor<T>::dim(int axis) const {
  const int r = rank();
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                     ShapeToString(shape()));
  }
  return storage_->shape[static_cast<size_t>(a)];
}

template <Real T>
std::vector<T> Tensor<T>::grad() const {
  if (storage_->grad.empty()) return std::vector<T>(storage_->data.size(), T(0));
  return storage_->grad;
}

template <Real T>
Tensor<T>& Tensor<T>::set_requires_grad(bool value) {
  if (storage_->tape_id != 0) {
    throw GraphError("set_requires_grad: only leaf tensors can change gradient participation");
  }
  storage_->requires_grad = value;
  return *this;
}

template <Real T>
T Tensor<T>::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + ShapeToString(shape()));
  return storage_->data[0];
}

template <Real T>
T Tensor<T>::at(std::initializer_list<int64_t> index) const {
  if (static_cast<int>(index.size()) != rank()) {
    throw ShapeError("at(): index rank mismatch for shape " + ShapeToString(shape()));
  }
  int64_t offset = 0;
  int axis = 0;
  for (int64_t i : index) {
    const int64_t d = storage_->shape[static_cast<size_t>(axis)];
    if (i < 0 || i >= d) throw ShapeError("at(): index out of range");
    offset = offset * d + i;
    ++axis;
  }
  return storage_->data[static_cast<size_t>(offset)];
}

template <Real T>
Tensor<T> Tensor<T>::Detach() const {
  return Tensor(storage_->shape, storage_->data);
}

template <Real T>
template <Real U>
Tensor<U> Tensor<T>::Cast() const {
  std::vector<U> values(storage_->data.begin(), storage_->data.end());
  return Tensor<U>(storage_->shape, std::move(values));
}

namespace internal {

template <Real T>
static Tape<T>* CheckedTape(bool any_requires_grad, uint64_t foreign_tape) {
  Tape<T>* tape = Tape<T>::Active();
  if (foreign_tape != 0) {
    throw GraphError("operation mixes tensors from a different or consumed tape");
  }
  if (!any_requires_grad) return nullptr;
  return tape;
}

template <Real T>
Tape<T>* RecordingTape(std::initializer_list<const Tensor<T>*> inputs) {
  Tape<T>* tape = Tape<T>::Active();
  bool any = false;
  uint64_t foreign = 0;
  for (const Tensor<T>* t : inputs) {
    if (t == nullptr || !t->defined() || !t->requires_grad()) continue;
    any = true;
    const uint64_t id = t->storage()->tape_id;
    if (id != 0 && (tape == nullptr || id != tape->id())) foreign = id;
  }
  return CheckedTape<T>(any, foreign);
}

template <Real T>
Tape<T>* RecordingTape(std::span<const Tensor<T>> inputs) {
  Tape<T>* tape = Tape<T>::Active();
  bool any = false;
  uint64_t foreign = 0;
  for (const Tensor<T>& t : inputs) {
    if (!t.defined() || !t.requires_grad()) continue;
    any = true;
    const uint64_t id = t.storage()->tape_id;
    if (id != 0 && (tape == nullptr || id != tape->id())) foreign = id;
  }
  return CheckedTape<T>(any, foreign);
}

template <Real T>
void RecordOp(Tape<T>* tape, std::string_view op,
              std::initializer_list<const Tensor<T>*> outputs,
              std::function<void()> backward) {
  std::vector<typename Tape<T>::StoragePtr> outs;
  outs.reserve(outputs.size());
  for (const Tensor<T>* t : outputs) {
    t->storage()->requires_grad = true;
    t->storage()->tape_id = tape->id();
    outs.push_back(t->storage());
  }
  tape->Record(op, std::move(outs), std::move(backward));
}

}  // namespace internal

#define PDPCRN_INSTANTIATE(T)                                                              \
  template class Tape<T>;                                                                  \
  template class GradSession<T>;                                                           \
  template class Tensor<T>;                                                                \
  template Tape<T>* internal::RecordingTape<T>(std::initializer_list<const Tensor<T>*>);   \
  template Tape<T>* internal::RecordingTape<T>(std::span<const Tensor<T>>);                \
  template void internal::RecordOp<T>(Tape<T>*, std::string_view,                          \
                                      std::initializer_list<const Tensor<T>*>,             \
                                      std::function<void()>);

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

template Tensor<float> Tensor<float>::Cast<float>() const;
template Tensor<double> Tensor<float>::Cast<double>() const;
template Tensor<float> Tensor<double>::Cast<float>() const;
template Tensor<double> Tensor<double>::Cast<double>() const;

}  // namespace pdpcrn

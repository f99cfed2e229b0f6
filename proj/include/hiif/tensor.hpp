// Copyright 2026 The hiif Authors. All rights reserved.
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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hiif/common.hpp"

namespace hiif {

// Dense row-major tensors with reverse-mode differentiation over a recording
// tape. Scalar type T is float (training default) or double (gradient-check
// mode). Ops record one backward step per forward call onto the thread's
// active tape; Tape::backward replays the steps once, in reverse, and clears
// the record.

template <typename T>
struct TensorImpl {
  Shape shape;
  std::vector<T> values;
  std::vector<T> grad;  // allocated lazily, same numel as values
  bool requires_grad = false;

  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), T(0));
  }
};

template <typename T>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape s) {
    check_positive_shape(s);
    Tensor t;
    t.impl_ = std::make_shared<TensorImpl<T>>();
    t.impl_->values.assign(numel_of(s), T(0));
    t.impl_->shape = std::move(s);
    return t;
  }

  static Tensor full(Shape s, T v) {
    Tensor t = zeros(std::move(s));
    for (T& x : t.impl_->values) x = v;
    return t;
  }

  static Tensor from(Shape s, std::vector<T> v) {
    check_positive_shape(s);
    if (numel_of(s) != static_cast<int64_t>(v.size()))
      throw ShapeError("data length " + std::to_string(v.size()) +
                       " does not match shape " + shape_str(s));
    Tensor t;
    t.impl_ = std::make_shared<TensorImpl<T>>();
    t.impl_->shape = std::move(s);
    t.impl_->values = std::move(v);
    return t;
  }

  static Tensor scalar(T v) { return from({1}, {v}); }

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  int64_t numel() const { return static_cast<int64_t>(impl_->values.size()); }
  int64_t dim(int i) const { return impl_->shape.at(i); }
  int rank() const { return static_cast<int>(impl_->shape.size()); }

  T* data() { return impl_->values.data(); }
  const T* data() const { return impl_->values.data(); }
  std::vector<T>& values() { return impl_->values; }
  const std::vector<T>& values() const { return impl_->values; }

  T item() const {
    if (numel() != 1) throw ShapeError("item() on non-scalar tensor " + shape_str(shape()));
    return impl_->values[0];
  }

  bool requires_grad() const { return impl_->requires_grad; }
  Tensor& set_requires_grad(bool v) {
    impl_->requires_grad = v;
    return *this;
  }

  /// Gradient buffer; zero-filled on first access.
  const std::vector<T>& grad() const {
    impl_->ensure_grad();
    return impl_->grad;
  }
  void zero_grad() {
    impl_->ensure_grad();
    std::fill(impl_->grad.begin(), impl_->grad.end(), T(0));
  }

  std::shared_ptr<TensorImpl<T>> impl() const { return impl_; }

 private:
  std::shared_ptr<TensorImpl<T>> impl_;
};

/// Records backward steps during forward evaluation. One tape per training
/// thread; never shared. Construction activates the tape for the current
/// thread, destruction deactivates it.
template <typename T>
class Tape {
 public:
  Tape() {
    prev_ = active_;
    active_ = this;
  }
  ~Tape() { active_ = prev_; }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active() { return active_; }
  static bool recording();

  void record(std::function<void()> step) { steps_.push_back(std::move(step)); }
  size_t size() const { return steps_.size(); }
  void clear() { steps_.clear(); }

  /// Accumulates d(loss)/d(x) into the grad buffer of every recorded tensor
  /// with requires_grad, then clears the record. loss must be scalar.
  void backward(const Tensor<T>& loss) {
    if (loss.numel() != 1)
      throw ShapeError("backward expects a scalar loss, got " + shape_str(loss.shape()));
    loss.impl()->ensure_grad();
    loss.impl()->grad[0] += T(1);
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
    clear();
  }

 private:
  std::vector<std::function<void()>> steps_;
  Tape* prev_ = nullptr;
  static thread_local Tape* active_;
};

/// Disables recording for its scope (frozen-model inference).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
  static bool enabled();
};

template <typename T>
bool Tape<T>::recording() {
  return active_ != nullptr && !NoGradGuard::enabled();
}

template <typename T>
thread_local Tape<T>* Tape<T>::active_ = nullptr;

// ---- Differentiable operations ----

/// [M,K] x [K,P] -> [M,P].
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

/// [M,N] -> [N,M].
template <typename T>
Tensor<T> transpose2d(const Tensor<T>& a);

// Elementwise; the smaller operand's shape must equal a trailing suffix of
// the larger's and is broadcast over the leading extents.
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

/// x * c for a plain constant.
template <typename T>
Tensor<T> scale(const Tensor<T>& x, T c);

/// max(x, 0); gradient is 0 at x == 0.
template <typename T>
Tensor<T> relu(const Tensor<T>& x);

/// |x|; subgradient 0 at x == 0.
template <typename T>
Tensor<T> abs_val(const Tensor<T>& x);

/// Mean over all entries -> scalar.
template <typename T>
Tensor<T> mean_all(const Tensor<T>& x);

/// Concatenate rank-2 tensors [R, k_i] along the last axis -> [R, sum k_i].
template <typename T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts);

template <typename T>
Tensor<T> concat_cols(std::initializer_list<Tensor<T>> parts) {
  return concat_cols(std::vector<Tensor<T>>(parts));
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape s);

/// x: [R, C], idx in [0, R) -> [len(idx), C]. Backward scatter-adds.
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& x, const std::vector<int64_t>& idx);

/// Columns [c0, c1) of a rank-2 tensor -> [R, c1-c0].
template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, int64_t c0, int64_t c1);

/// Row-wise normalization of [R, D] to zero mean and unit variance
/// (eps inside the square root); no learned affine terms.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, T eps);

/// x: [H,W,Cin], kernel: [3,3,Cin,Cout], bias: [Cout] -> [H,W,Cout].
/// Cross-correlation, zero padding 1, output spatial size equals input.
template <typename T>
Tensor<T> conv2d_3x3(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias);

/// x: [H,W,C] -> [H,W,9C]; each position gets its 3x3 neighborhood
/// concatenated channel-wise, borders clamped.
template <typename T>
Tensor<T> unfold3x3(const Tensor<T>& x);

// ---- Parameters ----

/// Named trainable tensors; names are unique dot-separated paths. Stored
/// sorted so checkpoint serialization and update order are deterministic.
template <typename T>
class ParamStore {
 public:
  Tensor<T>& add(const std::string& name, Tensor<T> t) {
    auto [it, inserted] = params_.emplace(name, std::move(t));
    if (!inserted) throw ConfigError("duplicate parameter name: " + name);
    it->second.set_requires_grad(true);
    return it->second;
  }

  Tensor<T>* find(const std::string& name) {
    auto it = params_.find(name);
    return it == params_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, Tensor<T>>& all() const { return params_; }

  int64_t param_count() const {
    int64_t n = 0;
    for (const auto& [name, t] : params_) n += t.numel();
    return n;
  }

  void zero_grads() {
    for (auto& [name, t] : params_) t.zero_grad();
  }

 private:
  std::map<std::string, Tensor<T>> params_;
};

/// Gradient map for a scalar loss: runs tape backward, then snapshots each
/// parameter's accumulated gradient under its name.
template <typename T>
std::map<std::string, Tensor<T>> backward_gradients(Tape<T>& tape, const Tensor<T>& loss,
                                                    const ParamStore<T>& params) {
  tape.backward(loss);
  std::map<std::string, Tensor<T>> out;
  for (const auto& [name, t] : params.all()) {
    out.emplace(name, Tensor<T>::from(t.shape(), t.grad()));
  }
  return out;
}

}  // namespace hiif

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

#include <cmath>
#include <string>

#include "hiif/rng.hpp"
#include "hiif/tensor.hpp"

namespace hiif {

enum class Init { kHeUniform, kZero };

/// He-uniform fill: U(-sqrt(6/fan_in), sqrt(6/fan_in)), drawn in index order.
template <typename T>
Tensor<T> init_tensor(Shape s, int64_t fan_in, Rng& rng, Init init) {
  Tensor<T> t = Tensor<T>::zeros(std::move(s));
  if (init == Init::kHeUniform) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (int64_t i = 0; i < t.numel(); ++i)
      t.data()[i] = static_cast<T>(rng.uniform(-bound, bound));
  }
  return t;
}

/// y = x W + b, x: [R,in], W: [in,out], b: [out].
template <typename T>
struct Linear {
  Tensor<T> w;
  Tensor<T> b;

  Linear() = default;
  Linear(ParamStore<T>& store, const std::string& name, int64_t in, int64_t out, Rng& rng,
         bool bias = true, Init init = Init::kHeUniform) {
    w = store.add(name + ".w", init_tensor<T>({in, out}, in, rng, init));
    if (bias) b = store.add(name + ".b", Tensor<T>::zeros({out}));
  }

  Tensor<T> operator()(const Tensor<T>& x) const {
    Tensor<T> y = matmul(x, w);
    if (b.defined()) y = add(y, b);
    return y;
  }
};

/// Two-layer MLP: linear -> relu -> linear.
template <typename T>
struct Mlp2 {
  Linear<T> fc1;
  Linear<T> fc2;

  Mlp2() = default;
  Mlp2(ParamStore<T>& store, const std::string& name, int64_t in, int64_t hidden, int64_t out,
       Rng& rng, Init out_init = Init::kHeUniform)
      : fc1(store, name + ".fc1", in, hidden, rng),
        fc2(store, name + ".fc2", hidden, out, rng, true, out_init) {}

  Tensor<T> operator()(const Tensor<T>& x) const { return fc2(relu(fc1(x))); }
};

/// 3x3 same-size convolution layer over [H,W,Cin].
template <typename T>
struct Conv3x3 {
  Tensor<T> k;
  Tensor<T> b;

  Conv3x3() = default;
  Conv3x3(ParamStore<T>& store, const std::string& name, int64_t cin, int64_t cout, Rng& rng,
          Init init = Init::kHeUniform) {
    k = store.add(name + ".k", init_tensor<T>({3, 3, cin, cout}, 9 * cin, rng, init));
    b = store.add(name + ".b", Tensor<T>::zeros({cout}));
  }

  Tensor<T> operator()(const Tensor<T>& x) const { return conv2d_3x3(x, k, b); }
};

}  // namespace hiif

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

#ifndef HIIF_ENCODER_HPP_
#define HIIF_ENCODER_HPP_

#include <string>
#include <utility>
#include <vector>

#include "hiif/nn.hpp"

namespace hiif {

// Compact residual convolutional encoder: maps an LR image to a
// same-resolution latent map. No down- or up-sampling anywhere.
struct EncoderConfig {
  int64_t c_enc = 32;
  int64_t n_blocks = 4;
  int64_t c_out = 64;
  bool unfold = false;

  void validate() const {
    if (c_enc < 1 || n_blocks < 1 || c_out < 1)
      throw ConfigError("encoder config: c_enc, n_blocks, c_out must be >= 1");
  }
};

template <typename T>
class Encoder {
 public:
  Encoder() = default;

  Encoder(const EncoderConfig& cfg, ParamStore<T>& store, Rng& rng,
          const std::string& prefix = "enc")
      : cfg_(cfg) {
    cfg_.validate();
    head_ = Conv3x3<T>(store, prefix + ".head", 3, cfg_.c_enc, rng);
    for (int64_t b = 0; b < cfg_.n_blocks; ++b) {
      const std::string bn = prefix + ".block" + std::to_string(b);
      blocks_.emplace_back(Conv3x3<T>(store, bn + ".conv1", cfg_.c_enc, cfg_.c_enc, rng),
                           Conv3x3<T>(store, bn + ".conv2", cfg_.c_enc, cfg_.c_enc, rng));
    }
    const int64_t proj_in = cfg_.unfold ? 9 * cfg_.c_enc : cfg_.c_enc;
    proj_ = Conv3x3<T>(store, prefix + ".proj", proj_in, cfg_.c_out, rng);
  }

  /// x: [H, W, 3] in [-1, 1] -> latent map [H, W, c_out].
  Tensor<T> operator()(const Tensor<T>& x) const {
    // Residual branches are damped by 0.1. Without normalization layers the
    // stack's gain is a free mode: training can align a block with its input
    // and the (1+g)^n compound blows up the latent scale. Damping caps the
    // per-block gain near one, the standard remedy in this encoder family.
    Tensor<T> h = head_(x);
    for (const auto& [c1, c2] : blocks_) h = add(h, scale(c2(relu(c1(h))), T(0.1)));
    if (cfg_.unfold) h = unfold3x3(h);
    return proj_(h);
  }

  const EncoderConfig& config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  Conv3x3<T> head_;
  std::vector<std::pair<Conv3x3<T>, Conv3x3<T>>> blocks_;
  Conv3x3<T> proj_;
};

}  // namespace hiif

#endif  // HIIF_ENCODER_HPP_

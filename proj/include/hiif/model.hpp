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

#ifndef HIIF_MODEL_HPP_
#define HIIF_MODEL_HPP_

#include <string>

#include "hiif/checkpoint.hpp"
#include "hiif/config.hpp"
#include "hiif/resample.hpp"

namespace hiif {

/// Encoder + decoder sharing one parameter store. The store owns the
/// canonical name -> tensor mapping used by Adam and checkpoints; the
/// encoder/decoder members hold handles onto the same tensors.
template <typename T>
struct Model {
  RunConfig cfg;
  ParamStore<T> params;
  Encoder<T> encoder;
  HiifDecoder<T> decoder;
};

/// Fresh model with deterministic He-uniform initialization. The final
/// decoder projection starts at zero, so an untrained model reproduces
/// bilinear upsampling exactly.
template <typename T>
Model<T> build_model(const RunConfig& cfg, uint64_t init_seed) {
  cfg.validate();
  Model<T> model;
  model.cfg = cfg;
  Rng rng(mix_seed(init_seed, 0x6d6f64656cu));  // "model"
  model.encoder = Encoder<T>(cfg.encoder, model.params, rng);
  model.decoder = HiifDecoder<T>(cfg.decoder, model.params, rng);
  return model;
}

template <typename T>
void save_model(const Model<T>& model, const std::string& path) {
  save_checkpoint(path, config_to_text(model.cfg), model.params);
}

template <typename T>
Model<T> load_model(const std::string& path);

/// [0,1] image -> [H, W, 3] tensor in [-1, 1].
template <typename T>
Tensor<T> image_to_pm1_tensor(const Image& img) {
  const Image rgb = to_rgb(img);
  std::vector<T> v(size_t(rgb.numel()));
  for (int64_t i = 0; i < rgb.numel(); ++i) v[size_t(i)] = T(2.0 * rgb.pix[size_t(i)] - 1.0);
  return Tensor<T>::from({rgb.h, rgb.w, 3}, std::move(v));
}

/// End-to-end super-resolution: encode, decode the full output grid in
/// tiles, and add the decoder residual onto the bilinear skip. Output is
/// clamped to [0,1]. A zero residual reproduces bilinear upsampling
/// bit for bit.
template <typename T>
Image super_resolve(const Model<T>& model, const Image& lr, int64_t out_h, int64_t out_w,
                    int64_t tile = 16384) {
  NoGradGuard frozen;
  const Image lr_rgb = to_rgb(lr);
  const Tensor<T> latents = model.encoder(image_to_pm1_tensor<T>(lr_rgb));
  const Cell cell = cell_of(double(out_h) / double(lr_rgb.h), double(out_w) / double(lr_rgb.w),
                            lr_rgb.h, lr_rgb.w);
  const Image residual = model.decoder.decode_full_grid(latents, out_h, out_w, cell, tile);
  Image out = bilinear_resize(lr_rgb, out_h, out_w);
  for (int64_t i = 0; i < out.numel(); ++i) {
    const double v = out.pix[size_t(i)] + 0.5 * residual.pix[size_t(i)];
    out.pix[size_t(i)] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }
  return out;
}

}  // namespace hiif

#endif  // HIIF_MODEL_HPP_

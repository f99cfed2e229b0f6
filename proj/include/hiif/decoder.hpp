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

#ifndef HIIF_DECODER_HPP_
#define HIIF_DECODER_HPP_

#include <array>
#include <string>
#include <vector>

#include "hiif/coords.hpp"
#include "hiif/image.hpp"
#include "hiif/nn.hpp"

namespace hiif {

// Decoder flavors: the full model, the three ablations, and the LIIF
// baseline decoding rule.
//   v1-H : hierarchical encodings replaced by the plain local grid offset
//          (level 0 only, zeros afterwards)
//   v2-MS: all L encodings fed at level 0, zeros afterwards
//   v3-MH: attention blocks replaced by depth-matched two-layer MLPs
//   liif : per-corner MLP predictions blended by area ensemble weights
enum class Variant { kFull, kV1H, kV2MS, kV3MH, kLiif };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct DecoderConfig {
  int64_t L = 6;  // hierarchical levels
  int64_t C = 64; // feature width (256 at paper scale)
  int64_t S = 2;  // encoding base
  int64_t B = 2;  // attention blocks
  int64_t N = 4;  // heads (16 at paper scale)
  Variant variant = Variant::kFull;

  void validate() const;
};

template <typename T>
class HiifDecoder {
 public:
  HiifDecoder() = default;
  HiifDecoder(const DecoderConfig& cfg, ParamStore<T>& store, Rng& rng,
              const std::string& prefix = "dec");

  const DecoderConfig& config() const { return cfg_; }

  /// RGB residuals [T, 3] for a batch of queries against one latent map
  /// [H, W, C]. Differentiable when a tape is recording. t_norm is the token
  /// count of the whole decode call (attention normalizer); pass the number
  /// of queries unless this call is a tile of a larger grid.
  Tensor<T> decode(const Tensor<T>& latents, const std::vector<Coord>& queries,
                   const Cell& cell, double t_norm) const;

  /// Full-grid decode in bounded memory: queries are the out_h x out_w pixel
  /// centers, processed in tiles of at most `tile` queries. Attention
  /// summaries and their token statistics are accumulated over tiles (one
  /// extra pass per attention block) in global token order, so the output is
  /// the same for every tile size. Returns the residual image in [-1, 1]
  /// space.
  Image decode_full_grid(const Tensor<T>& latents, int64_t out_h, int64_t out_w,
                         const Cell& cell, int64_t tile = 16384) const;

  /// Attention block b (or its v3-MH MLP stand-in) with skip connection.
  Tensor<T> attention(int b, const Tensor<T>& z, double t_norm) const;

  /// Level-l (l >= 1) update: concat [z_prev, enc_l] -> linear -> relu, then
  /// the block for l < B. enc_l: [T, 2].
  Tensor<T> level_step(int l, const Tensor<T>& z_prev, const Tensor<T>& enc_l,
                       double t_norm) const;

 private:
  struct Prep;  // per-query gather indices and conditioning inputs

  Prep prepare(const std::vector<Coord>& queries, int64_t h, int64_t w, const Cell& cell) const;
  Tensor<T> forward(const Tensor<T>& lat2, const Prep& prep, double t_norm,
                    const std::vector<std::vector<double>>* fixed, int stop_before_block) const;
  Tensor<T> attention_inner(int b, const Tensor<T>& z, double t_norm,
                            const std::vector<std::vector<double>>* fixed) const;
  void accumulate_summary(int b, const Tensor<T>& z, std::vector<double>& s) const;
  std::vector<double> finalize_summary(const std::vector<double>& raw, int64_t tokens) const;
  Tensor<T> liif_forward(const Tensor<T>& lat2, const Prep& prep) const;
  int attention_block_count() const;

  DecoderConfig cfg_;
  Mlp2<T> level0_;                  // (4C+4 or 4C+2L+2) -> C -> C
  std::vector<Linear<T>> level_fc_; // levels 1..L-1: (C+2) -> C
  struct AttnBlock {
    Linear<T> wq, wk, wv;  // C -> C, no bias
    Linear<T> wo;          // C -> C
    Tensor<T> gamma;       // per-channel branch scale, starts at zero
  };
  std::vector<AttnBlock> attn_;  // full / v1-H / v2-MS
  std::vector<Mlp2<T>> mh_;      // v3-MH stand-ins
  std::vector<Linear<T>> liif_;  // baseline five-layer MLP
  Linear<T> final_;              // C -> 3, zero-initialized
};

}  // namespace hiif

#endif  // HIIF_DECODER_HPP_

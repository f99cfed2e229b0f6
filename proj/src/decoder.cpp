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

#include "hiif/decoder.hpp"

#include <cmath>

namespace hiif {

Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::kFull;
  if (name == "v1-H") return Variant::kV1H;
  if (name == "v2-MS") return Variant::kV2MS;
  if (name == "v3-MH") return Variant::kV3MH;
  if (name == "liif") return Variant::kLiif;
  throw ConfigError("unknown decoder variant: " + name);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kV1H: return "v1-H";
    case Variant::kV2MS: return "v2-MS";
    case Variant::kV3MH: return "v3-MH";
    case Variant::kLiif: return "liif";
  }
  throw ConfigError("invalid variant enum");
}

void DecoderConfig::validate() const {
  if (L < 1) throw ConfigError("decoder config: L must be >= 1");
  if (C < 1) throw ConfigError("decoder config: C must be >= 1");
  if (S < 2) throw ConfigError("decoder config: S must be >= 2");
  if (B < 0 || B > L) throw ConfigError("decoder config: need 0 <= B <= L");
  if (N < 1 || C % N != 0)
    throw ConfigError("decoder config: C (" + std::to_string(C) + ") must be divisible by N (" +
                      std::to_string(N) + ")");
}

template <typename T>
HiifDecoder<T>::HiifDecoder(const DecoderConfig& cfg, ParamStore<T>& store, Rng& rng,
                            const std::string& prefix)
    : cfg_(cfg) {
  cfg_.validate();
  const int64_t C = cfg_.C;
  if (cfg_.variant == Variant::kLiif) {
    // Baseline: five-layer MLP applied per corner, blended by the ensemble.
    const int64_t widths[6] = {C + 4, C, C, C, C, 3};
    for (int i = 0; i < 5; ++i) {
      liif_.emplace_back(store, prefix + ".liif.fc" + std::to_string(i), widths[i], widths[i + 1],
                         rng, true, i == 4 ? Init::kZero : Init::kHeUniform);
    }
    return;
  }
  const int64_t e0 = cfg_.variant == Variant::kV2MS ? 4 * C + 2 * cfg_.L + 2 : 4 * C + 4;
  level0_ = Mlp2<T>(store, prefix + ".level0", e0, C, C, rng);
  for (int64_t l = 1; l < cfg_.L; ++l)
    level_fc_.emplace_back(store, prefix + ".level" + std::to_string(l) + ".fc", C + 2, C, rng);
  for (int64_t b = 0; b < cfg_.B; ++b) {
    const std::string bn = prefix + ".block" + std::to_string(b);
    if (cfg_.variant == Variant::kV3MH) {
      // The MLP stand-in starts as the identity (zero output layer).
      mh_.emplace_back(store, bn + ".mh", C, C, C, rng, Init::kZero);
    } else {
      // The branch behind gamma can swing far beyond the trunk scale (the
      // summary read grows with token count and channel correlation), so the
      // block starts as the identity and each channel opens only as far as
      // training finds useful, and can close again without bending the trunk.
      AttnBlock blk;
      blk.wq = Linear<T>(store, bn + ".wq", C, C, rng, /*bias=*/false);
      blk.wk = Linear<T>(store, bn + ".wk", C, C, rng, /*bias=*/false);
      blk.wv = Linear<T>(store, bn + ".wv", C, C, rng, /*bias=*/false);
      blk.wo = Linear<T>(store, bn + ".wo", C, C, rng, /*bias=*/true);
      blk.gamma = store.add(bn + ".gamma", Tensor<T>::zeros({C}));
      attn_.push_back(std::move(blk));
    }
  }
  final_ = Linear<T>(store, prefix + ".final", C, 3, rng, true, Init::kZero);
}

template <typename T>
int HiifDecoder<T>::attention_block_count() const {
  return cfg_.variant == Variant::kLiif || cfg_.variant == Variant::kV3MH ? 0 : int(cfg_.B);
}

// Per-query inputs shared by all decode paths.
template <typename T>
struct HiifDecoder<T>::Prep {
  int64_t t = 0;
  std::array<std::vector<int64_t>, 4> idx;  // flat latent index per corner
  Tensor<T> extras0;                        // [T, e0 width], conditioning + cell
  std::vector<Tensor<T>> extras;            // levels 1..L-1: [T, 2]
  std::array<Tensor<T>, 4> rel;             // liif: [T, 4] local grid + cell
  std::array<Tensor<T>, 4> wmat;            // liif: [T, 3] ensemble weights
};

template <typename T>
typename HiifDecoder<T>::Prep HiifDecoder<T>::prepare(const std::vector<Coord>& queries,
                                                      int64_t h, int64_t w,
                                                      const Cell& cell) const {
  Prep prep;
  prep.t = int64_t(queries.size());
  if (prep.t == 0) throw ShapeError("decode: empty query batch");
  const int64_t tq = prep.t;
  for (auto& v : prep.idx) v.resize(tq);

  // The cell enters the network in latent-pixel units (2/extent scaled by
  // H/2 or W/2, i.e. about 1/r). Raw [-1,1]-frame cells would alias across
  // latent grid sizes: the same absolute value means different scales on
  // different grids, and the decoder only ever trains on one grid size.
  const T cell_h = T(cell.h * double(h) / 2.0);
  const T cell_w = T(cell.w * double(w) / 2.0);

  if (cfg_.variant == Variant::kLiif) {
    std::array<std::vector<T>, 4> rel, wmat;
    for (auto& v : rel) v.resize(tq * 4);
    for (auto& v : wmat) v.resize(tq * 3);
    for (int64_t i = 0; i < tq; ++i) {
      const auto corners = nearest_latents(queries[i], h, w);
      const auto weights = ensemble_weights(queries[i], corners);
      for (int t = 0; t < 4; ++t) {
        prep.idx[t][i] = corners[t].iy * w + corners[t].ix;
        const auto [dy, dx] = local_grid(queries[i], corners[t].center, h, w);
        rel[t][i * 4 + 0] = T(dy);
        rel[t][i * 4 + 1] = T(dx);
        rel[t][i * 4 + 2] = cell_h;
        rel[t][i * 4 + 3] = cell_w;
        for (int ch = 0; ch < 3; ++ch) wmat[t][i * 3 + ch] = T(weights[t]);
      }
    }
    for (int t = 0; t < 4; ++t) {
      prep.rel[t] = Tensor<T>::from({tq, 4}, std::move(rel[t]));
      prep.wmat[t] = Tensor<T>::from({tq, 3}, std::move(wmat[t]));
    }
    return prep;
  }

  const int64_t e0w = cfg_.variant == Variant::kV2MS ? 2 * cfg_.L + 2 : 4;
  std::vector<T> extras0(tq * e0w);
  std::vector<std::vector<T>> extras;
  const bool per_level = cfg_.variant == Variant::kFull || cfg_.variant == Variant::kV3MH;
  if (per_level)
    extras.assign(size_t(cfg_.L - 1), std::vector<T>(tq * 2));
  for (int64_t i = 0; i < tq; ++i) {
    const auto corners = nearest_latents(queries[i], h, w);
    for (int t = 0; t < 4; ++t) prep.idx[t][i] = corners[t].iy * w + corners[t].ix;
    T* e0 = extras0.data() + i * e0w;
    if (cfg_.variant == Variant::kV1H) {
      const auto [dy, dx] = local_grid(queries[i], corners[0].center, h, w);
      e0[0] = T(dy);
      e0[1] = T(dx);
    } else {
      const auto [xl, yl] = local_normalized_coord(queries[i], corners[0].center, h, w);
      if (cfg_.variant == Variant::kV2MS) {
        for (int64_t l = 0; l < cfg_.L; ++l) {
          const auto [dx, dy] = hierarchical_encode(xl, yl, int(l), int(cfg_.S));
          e0[2 * l + 0] = T(embed_digit(dx, int(cfg_.S)));
          e0[2 * l + 1] = T(embed_digit(dy, int(cfg_.S)));
        }
      } else {
        const auto [dx0, dy0] = hierarchical_encode(xl, yl, 0, int(cfg_.S));
        e0[0] = T(embed_digit(dx0, int(cfg_.S)));
        e0[1] = T(embed_digit(dy0, int(cfg_.S)));
        for (int64_t l = 1; l < cfg_.L; ++l) {
          const auto [dx, dy] = hierarchical_encode(xl, yl, int(l), int(cfg_.S));
          extras[l - 1][i * 2 + 0] = T(embed_digit(dx, int(cfg_.S)));
          extras[l - 1][i * 2 + 1] = T(embed_digit(dy, int(cfg_.S)));
        }
      }
    }
    e0[e0w - 2] = cell_h;
    e0[e0w - 1] = cell_w;
  }
  prep.extras0 = Tensor<T>::from({tq, e0w}, std::move(extras0));
  if (per_level) {
    for (auto& e : extras) prep.extras.push_back(Tensor<T>::from({tq, 2}, std::move(e)));
  } else if (cfg_.L > 1) {
    // v1-H / v2-MS: later levels see zeros.
    const Tensor<T> zeros = Tensor<T>::zeros({tq, 2});
    prep.extras.assign(size_t(cfg_.L - 1), zeros);
  }
  return prep;
}

// Q and K columns are layer-normalized along the token axis (per channel over
// the decode call's token set), following the cross-covariance attention
// lineage the block derives from. Centering each channel removes the
// component shared by all tokens, so K^T Q measures channel correlations and
// its entries stay bounded by the token count instead of growing with the
// mean activation.
template <typename T>
static Tensor<T> norm_tokens(const Tensor<T>& x) {
  return transpose2d(layer_norm(transpose2d(x), T(1e-5)));
}

template <typename T>
Tensor<T> HiifDecoder<T>::attention_inner(int b, const Tensor<T>& z, double t_norm,
                                          const std::vector<std::vector<double>>* fixed) const {
  if (cfg_.variant == Variant::kV3MH) return add(z, mh_[b](z));
  const int64_t hd = cfg_.C / cfg_.N;
  const T inv_sqrt = T(1.0 / std::sqrt(t_norm));
  const AttnBlock& blk = attn_[b];
  const Tensor<T> v = blk.wv(z);
  Tensor<T> q, k;
  if (fixed == nullptr) {
    q = blk.wq(z);
    k = blk.wk(z);
  }
  std::vector<Tensor<T>> heads;
  heads.reserve(size_t(cfg_.N));
  for (int64_t n = 0; n < cfg_.N; ++n) {
    const Tensor<T> vn = slice_cols(v, n * hd, (n + 1) * hd);
    Tensor<T> summary;
    if (fixed != nullptr) {
      std::vector<T> s(hd * hd);
      const double* src = (*fixed)[b].data() + n * hd * hd;
      for (int64_t i = 0; i < hd * hd; ++i) s[i] = T(src[i]);
      summary = Tensor<T>::from({hd, hd}, std::move(s));
    } else {
      const Tensor<T> qn = norm_tokens(slice_cols(q, n * hd, (n + 1) * hd));
      const Tensor<T> kn = norm_tokens(slice_cols(k, n * hd, (n + 1) * hd));
      summary = matmul(transpose2d(kn), qn);
    }
    heads.push_back(matmul(vn, scale(summary, inv_sqrt)));
  }
  return add(z, mul(blk.wo(concat_cols(heads)), blk.gamma));
}

template <typename T>
Tensor<T> HiifDecoder<T>::attention(int b, const Tensor<T>& z, double t_norm) const {
  if (b < 0 || b >= int(cfg_.B)) throw ConfigError("attention block index out of range");
  return attention_inner(b, z, t_norm, nullptr);
}

// Token-axis normalization needs per-channel statistics over the whole token
// set, so the streaming path accumulates raw cross-products and channel
// moments in double, in global token order; tiling then cannot change the
// result. Per head the accumulator holds [K^T Q | sum K | sum K^2 | sum Q |
// sum Q^2], and finalize_summary turns it into the normalized summary,
// using that sum_t khat*qhat = (cross - T mu_k mu_q) / (sigma_k sigma_q).
template <typename T>
void HiifDecoder<T>::accumulate_summary(int b, const Tensor<T>& z, std::vector<double>& s) const {
  const int64_t hd = cfg_.C / cfg_.N;
  const AttnBlock& blk = attn_[b];
  const Tensor<T> q = blk.wq(z);
  const Tensor<T> k = blk.wk(z);
  const int64_t rows = z.dim(0);
  const int64_t stride = hd * hd + 4 * hd;
  const T* kv = k.data();
  const T* qv = q.data();
  const int64_t c = cfg_.C;
  for (int64_t n = 0; n < cfg_.N; ++n) {
    double* cross = s.data() + n * stride;
    double* ksum = cross + hd * hd;
    double* ksq = ksum + hd;
    double* qsum = ksq + hd;
    double* qsq = qsum + hd;
    for (int64_t t = 0; t < rows; ++t) {
      const T* kr = kv + t * c + n * hd;
      const T* qr = qv + t * c + n * hd;
      for (int64_t i = 0; i < hd; ++i) {
        const double ki = double(kr[i]);
        ksum[i] += ki;
        ksq[i] += ki * ki;
        for (int64_t j = 0; j < hd; ++j) cross[i * hd + j] += ki * double(qr[j]);
      }
      for (int64_t j = 0; j < hd; ++j) {
        const double qj = double(qr[j]);
        qsum[j] += qj;
        qsq[j] += qj * qj;
      }
    }
  }
}

template <typename T>
std::vector<double> HiifDecoder<T>::finalize_summary(const std::vector<double>& raw,
                                                     int64_t tokens) const {
  const int64_t hd = cfg_.C / cfg_.N;
  const int64_t stride = hd * hd + 4 * hd;
  const double tn = double(tokens);
  std::vector<double> out(size_t(cfg_.N * hd * hd));
  for (int64_t n = 0; n < cfg_.N; ++n) {
    const double* cross = raw.data() + n * stride;
    const double* ksum = cross + hd * hd;
    const double* ksq = ksum + hd;
    const double* qsum = ksq + hd;
    const double* qsq = qsum + hd;
    double* dst = out.data() + n * hd * hd;
    for (int64_t i = 0; i < hd; ++i) {
      const double muk = ksum[i] / tn;
      const double sk = std::sqrt(ksq[i] / tn - muk * muk + 1e-5);
      for (int64_t j = 0; j < hd; ++j) {
        const double muq = qsum[j] / tn;
        const double sq = std::sqrt(qsq[j] / tn - muq * muq + 1e-5);
        dst[i * hd + j] = (cross[i * hd + j] - tn * muk * muq) / (sk * sq);
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> HiifDecoder<T>::level_step(int l, const Tensor<T>& z_prev, const Tensor<T>& enc_l,
                                     double t_norm) const {
  if (l < 1 || l >= int(cfg_.L)) throw ConfigError("level_step level out of range");
  Tensor<T> h = relu(level_fc_[l - 1](concat_cols({z_prev, enc_l})));
  if (l < int(cfg_.B)) h = attention_inner(l, h, t_norm, nullptr);
  return h;
}

template <typename T>
Tensor<T> HiifDecoder<T>::liif_forward(const Tensor<T>& lat2, const Prep& prep) const {
  Tensor<T> out;
  for (int t = 0; t < 4; ++t) {
    Tensor<T> h = concat_cols({gather_rows(lat2, prep.idx[t]), prep.rel[t]});
    for (size_t i = 0; i < liif_.size(); ++i) {
      h = liif_[i](h);
      if (i + 1 < liif_.size()) h = relu(h);
    }
    const Tensor<T> weighted = mul(h, prep.wmat[t]);
    out = t == 0 ? weighted : add(out, weighted);
  }
  return out;
}

template <typename T>
Tensor<T> HiifDecoder<T>::forward(const Tensor<T>& lat2, const Prep& prep, double t_norm,
                                  const std::vector<std::vector<double>>* fixed,
                                  int stop_before_block) const {
  std::vector<Tensor<T>> parts;
  parts.reserve(5);
  for (int t = 0; t < 4; ++t) parts.push_back(gather_rows(lat2, prep.idx[t]));
  parts.push_back(prep.extras0);
  Tensor<T> h = level0_(concat_cols(parts));
  const int blocks = int(cfg_.B);
  if (stop_before_block == 0) return h;
  if (blocks > 0) h = attention_inner(0, h, t_norm, fixed);
  for (int l = 1; l < int(cfg_.L); ++l) {
    h = relu(level_fc_[l - 1](concat_cols({h, prep.extras[l - 1]})));
    if (l == stop_before_block) return h;
    if (l < blocks) h = attention_inner(l, h, t_norm, fixed);
  }
  return final_(h);
}

template <typename T>
Tensor<T> HiifDecoder<T>::decode(const Tensor<T>& latents, const std::vector<Coord>& queries,
                                 const Cell& cell, double t_norm) const {
  if (latents.rank() != 3 || latents.dim(2) != cfg_.C)
    throw ShapeError("decode: latent map must be [H, W, " + std::to_string(cfg_.C) + "], got " +
                     shape_str(latents.shape()));
  const int64_t h = latents.dim(0), w = latents.dim(1);
  const Prep prep = prepare(queries, h, w, cell);
  const Tensor<T> lat2 = reshape(latents, {h * w, cfg_.C});
  if (cfg_.variant == Variant::kLiif) return liif_forward(lat2, prep);
  return forward(lat2, prep, t_norm, nullptr, -1);
}

template <typename T>
Image HiifDecoder<T>::decode_full_grid(const Tensor<T>& latents, int64_t out_h, int64_t out_w,
                                       const Cell& cell, int64_t tile) const {
  if (latents.rank() != 3 || latents.dim(2) != cfg_.C)
    throw ShapeError("decode_full_grid: latent map must be [H, W, C]");
  if (out_h < 1 || out_w < 1 || tile < 1)
    throw ShapeError("decode_full_grid: output extents and tile must be positive");
  NoGradGuard frozen;
  const int64_t h = latents.dim(0), w = latents.dim(1);
  const Tensor<T> lat2 = reshape(latents, {h * w, cfg_.C});
  const std::vector<double> ys = make_coord_grid(out_h);
  const std::vector<double> xs = make_coord_grid(out_w);
  const int64_t tq = out_h * out_w;
  const double t_norm = double(tq);

  auto tile_queries = [&](int64_t q0, int64_t q1) {
    std::vector<Coord> qs;
    qs.reserve(size_t(q1 - q0));
    for (int64_t q = q0; q < q1; ++q) qs.push_back(Coord{xs[q % out_w], ys[q / out_w]});
    return qs;
  };

  const int n_att = attention_block_count();
  std::vector<std::vector<double>> summaries(static_cast<size_t>(n_att));
  const int64_t hd = cfg_.N > 0 ? cfg_.C / cfg_.N : 0;

  // Pass b resolves the summary of attention block b using the already
  // finalized summaries of blocks < b; the last pass emits pixels.
  for (int pass = 0; pass < n_att; ++pass) {
    std::vector<double> raw(size_t(cfg_.N * (hd * hd + 4 * hd)), 0.0);
    for (int64_t q0 = 0; q0 < tq; q0 += tile) {
      const int64_t q1 = std::min(tq, q0 + tile);
      const Prep prep = prepare(tile_queries(q0, q1), h, w, cell);
      const Tensor<T> z = forward(lat2, prep, t_norm, &summaries, pass);
      accumulate_summary(pass, z, raw);
    }
    summaries[size_t(pass)] = finalize_summary(raw, tq);
  }

  Image out(out_h, out_w, 3);
  for (int64_t q0 = 0; q0 < tq; q0 += tile) {
    const int64_t q1 = std::min(tq, q0 + tile);
    const Prep prep = prepare(tile_queries(q0, q1), h, w, cell);
    const Tensor<T> rgb = cfg_.variant == Variant::kLiif
                              ? liif_forward(lat2, prep)
                              : forward(lat2, prep, t_norm, &summaries, -1);
    const T* rv = rgb.data();
    for (int64_t i = 0; i < (q1 - q0) * 3; ++i) out.pix[q0 * 3 + i] = double(rv[i]);
  }
  return out;
}

template class HiifDecoder<float>;
template class HiifDecoder<double>;

}  // namespace hiif

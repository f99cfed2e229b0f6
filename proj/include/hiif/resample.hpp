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

#ifndef HIIF_RESAMPLE_HPP_
#define HIIF_RESAMPLE_HPP_

#include <cstdint>
#include <vector>

#include "hiif/image.hpp"

namespace hiif {

enum class Kernel { kBilinear, kBicubic };

// Per-axis resampling plan: for each output index, a run of clamped source
// indices and normalized weights. Shared by both image axes.
struct AxisPlan {
  int64_t taps = 0;
  std::vector<int64_t> indices;  // [out * taps], clamped to [0, in)
  std::vector<double> weights;   // [out * taps], rows sum to 1
};

// Builds the plan for resizing an axis of length `in` to length `out`.
// Uses the half-pixel source mapping src = (i + 0.5) * in / out - 0.5 and,
// when downscaling, widens the kernel support by in/out (antialias filter).
AxisPlan make_axis_plan(int64_t in, int64_t out, Kernel kernel, bool antialias = true);

// Separable resize. Bicubic uses the Catmull-Rom-like cubic with a = -0.5.
Image resize(const Image& img, int64_t out_h, int64_t out_w, Kernel kernel,
             bool antialias = true);

inline Image bicubic_resize(const Image& img, int64_t out_h, int64_t out_w) {
  return resize(img, out_h, out_w, Kernel::kBicubic);
}
inline Image bilinear_resize(const Image& img, int64_t out_h, int64_t out_w) {
  return resize(img, out_h, out_w, Kernel::kBilinear);
}

enum class PsnrConvention { kRgb, kYChannel };

// PSNR in dB over [0,1] pixels. `shave` trims a border from all sides before
// comparison. kYChannel converts RGB to the BT.601 luma used by the
// super-resolution benchmarks before measuring. Identical inputs give +inf.
double psnr(const Image& a, const Image& b, PsnrConvention convention, int64_t shave = 0);

// Luma plane of an RGB (or grayscale) image, in [0,1].
Image y_channel(const Image& img);

}  // namespace hiif

#endif  // HIIF_RESAMPLE_HPP_

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
#include <string>
#include <vector>

#include "hiif/common.hpp"

namespace hiif {

/// Dataset-level problems (image too small for the requested crop, ...).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Row-major [h][w][c] pixel grid, values in [0,1], 1 or 3 channels.
struct Image {
  int64_t h = 0;
  int64_t w = 0;
  int64_t c = 0;
  std::vector<double> pix;

  Image() = default;
  Image(int64_t h_, int64_t w_, int64_t c_) : h(h_), w(w_), c(c_), pix(h_ * w_ * c_, 0.0) {
    if (h_ <= 0 || w_ <= 0 || (c_ != 1 && c_ != 3))
      throw ShapeError("bad image dims " + std::to_string(h_) + "x" + std::to_string(w_) + "x" +
                       std::to_string(c_));
  }

  double& at(int64_t y, int64_t x, int64_t ch) { return pix[(y * w + x) * c + ch]; }
  double at(int64_t y, int64_t x, int64_t ch) const { return pix[(y * w + x) * c + ch]; }
  int64_t numel() const { return h * w * c; }
};

/// 8/16-bit grayscale or RGB PNG; samples scaled to [0,1] by the bit-depth
/// maximum. Interlaced, palette, and alpha files are rejected.
Image load_png(const std::string& path);

/// Clamps to [0,1], quantizes to 8-bit with round-half-away-from-zero, and
/// writes a non-interlaced PNG.
void save_png(const Image& img, const std::string& path);

Image crop(const Image& img, int64_t y0, int64_t x0, int64_t h, int64_t w);
Image center_crop(const Image& img, int64_t h, int64_t w);
Image hflip(const Image& img);
Image to_rgb(const Image& img);

}  // namespace hiif

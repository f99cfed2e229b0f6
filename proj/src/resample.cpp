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

#include "hiif/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hiif/common.hpp"

namespace hiif {

namespace {

double cubic(double x) {
  // Keys cubic with a = -0.5 (the classic "bicubic" interpolation kernel).
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

double linear(double x) {
  x = std::abs(x);
  return x < 1.0 ? 1.0 - x : 0.0;
}

}  // namespace

AxisPlan make_axis_plan(int64_t in, int64_t out, Kernel kernel, bool antialias) {
  if (in <= 0 || out <= 0)
    throw ShapeError("resize dims must be positive, got in=" + std::to_string(in) +
                     " out=" + std::to_string(out));
  const double scale = double(out) / double(in);
  const double support = kernel == Kernel::kBicubic ? 4.0 : 2.0;
  double kscale = 1.0;
  double width = support;
  if (antialias && scale < 1.0) {
    // Downscale: stretch the kernel so it covers 1/scale input pixels.
    kscale = scale;
    width = support / scale;
  }
  AxisPlan plan;
  plan.taps = int64_t(std::ceil(width)) + 2;
  plan.indices.resize(out * plan.taps);
  plan.weights.resize(out * plan.taps);
  auto eval = kernel == Kernel::kBicubic ? cubic : linear;
  for (int64_t i = 0; i < out; ++i) {
    const double u = (i + 0.5) / scale - 0.5;
    const int64_t left = int64_t(std::floor(u - width / 2.0));
    double sum = 0.0;
    for (int64_t p = 0; p < plan.taps; ++p) {
      const double wgt = eval(kscale * (u - double(left + p)));
      plan.weights[i * plan.taps + p] = wgt;
      plan.indices[i * plan.taps + p] = std::clamp<int64_t>(left + p, 0, in - 1);
      sum += wgt;
    }
    for (int64_t p = 0; p < plan.taps; ++p) plan.weights[i * plan.taps + p] /= sum;
  }
  return plan;
}

Image resize(const Image& img, int64_t out_h, int64_t out_w, Kernel kernel, bool antialias) {
  const AxisPlan vp = make_axis_plan(img.h, out_h, kernel, antialias);
  const AxisPlan hp = make_axis_plan(img.w, out_w, kernel, antialias);

  // Vertical pass, then horizontal.
  Image mid(out_h, img.w, img.c);
  for (int64_t y = 0; y < out_h; ++y) {
    for (int64_t x = 0; x < img.w; ++x) {
      for (int64_t ch = 0; ch < img.c; ++ch) {
        double acc = 0.0;
        for (int64_t p = 0; p < vp.taps; ++p)
          acc += vp.weights[y * vp.taps + p] * img.at(vp.indices[y * vp.taps + p], x, ch);
        mid.at(y, x, ch) = acc;
      }
    }
  }
  Image out(out_h, out_w, img.c);
  for (int64_t y = 0; y < out_h; ++y) {
    for (int64_t x = 0; x < out_w; ++x) {
      for (int64_t ch = 0; ch < img.c; ++ch) {
        double acc = 0.0;
        for (int64_t p = 0; p < hp.taps; ++p)
          acc += hp.weights[x * hp.taps + p] * mid.at(y, hp.indices[x * hp.taps + p], ch);
        out.at(y, x, ch) = acc;
      }
    }
  }
  return out;
}

Image y_channel(const Image& img) {
  const Image rgb = to_rgb(img);
  Image out(rgb.h, rgb.w, 1);
  for (int64_t i = 0; i < rgb.h * rgb.w; ++i) {
    const double r = rgb.pix[3 * i], g = rgb.pix[3 * i + 1], b = rgb.pix[3 * i + 2];
    out.pix[i] = (65.481 * r + 128.553 * g + 24.966 * b + 16.0) / 255.0;
  }
  return out;
}

double psnr(const Image& a, const Image& b, PsnrConvention convention, int64_t shave) {
  if (a.h != b.h || a.w != b.w || a.c != b.c)
    throw ShapeError("psnr: image shapes differ");
  Image x = a, y = b;
  if (convention == PsnrConvention::kYChannel) {
    x = y_channel(x);
    y = y_channel(y);
  }
  if (shave > 0) {
    if (2 * shave >= x.h || 2 * shave >= x.w)
      throw ShapeError("psnr: shave " + std::to_string(shave) + " exceeds image extent");
    x = crop(x, shave, shave, x.h - 2 * shave, x.w - 2 * shave);
    y = crop(y, shave, shave, y.h - 2 * shave, y.w - 2 * shave);
  }
  double se = 0.0;
  for (size_t i = 0; i < x.pix.size(); ++i) {
    const double d = x.pix[i] - y.pix[i];
    se += d * d;
  }
  const double mse = se / double(x.pix.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

}  // namespace hiif

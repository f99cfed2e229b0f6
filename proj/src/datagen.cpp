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

#include "hiif/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "hiif/rng.hpp"

namespace hiif {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Blob {
  double cy, cx, ry, rx, theta;
  double color[3];
};

struct Grating {
  double cy, cx, win;     // soft circular window
  double fy, fx, phase;   // wave vector in cycles/pixel
  double amp;
};

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

Image synth_image(uint64_t seed, int64_t h, int64_t w) {
  Rng rng(mix_seed(seed, 0x64617461u));  // "data"
  Image img(h, w, 3);
  const double diag = std::sqrt(double(h * h + w * w));

  double base[3], grad_dir[2], grad_amp[3];
  for (double& b : base) b = rng.uniform(0.3, 0.7);
  const double ga = rng.uniform(0.0, 2.0 * kPi);
  grad_dir[0] = std::sin(ga);
  grad_dir[1] = std::cos(ga);
  for (double& g : grad_amp) g = rng.uniform(-0.15, 0.15);

  // Blob count scales with area so random crops always contain edges.
  const int64_t n_blobs = std::max<int64_t>(8, h * w / 1000);
  std::vector<Blob> blobs(static_cast<size_t>(n_blobs));
  for (Blob& b : blobs) {
    b.cy = rng.uniform(0.0, double(h));
    b.cx = rng.uniform(0.0, double(w));
    b.ry = rng.uniform(0.04, 0.16) * diag;
    b.rx = rng.uniform(0.04, 0.16) * diag;
    b.theta = rng.uniform(0.0, kPi);
    for (double& c : b.color) c = rng.uniform(0.05, 0.95);
  }

  // Texture near the LR Nyquist rate: the antialias filter attenuates these
  // waves on the way down, so plain interpolation cannot restore their
  // amplitude but a learned prior can.
  const int64_t n_gratings = std::max<int64_t>(5, h * w / 1800);
  std::vector<Grating> gratings(static_cast<size_t>(n_gratings));
  for (Grating& g : gratings) {
    g.cy = rng.uniform(0.0, double(h));
    g.cx = rng.uniform(0.0, double(w));
    g.win = rng.uniform(0.18, 0.40) * diag;
    const double period = rng.uniform(3.5, 8.0);
    const double ang = rng.uniform(0.0, kPi);
    g.fy = std::sin(ang) / period;
    g.fx = std::cos(ang) / period;
    g.phase = rng.uniform(0.0, 2.0 * kPi);
    g.amp = rng.uniform(0.12, 0.28);
  }

  for (int64_t y = 0; y < h; ++y) {
    for (int64_t x = 0; x < w; ++x) {
      const double proj = (grad_dir[0] * y + grad_dir[1] * x) / diag;
      double v[3];
      for (int ch = 0; ch < 3; ++ch) v[ch] = base[ch] + grad_amp[ch] * proj;
      for (const Grating& g : gratings) {
        const double dy = y - g.cy, dx = x - g.cx;
        const double win = smoothstep(1.0 - std::sqrt(dy * dy + dx * dx) / g.win);
        if (win <= 0.0) continue;
        const double s =
            g.amp * win * std::sin(2.0 * kPi * (g.fy * double(y) + g.fx * double(x)) + g.phase);
        for (double& c : v) c += s;
      }
      for (const Blob& b : blobs) {
        const double dy = y - b.cy, dx = x - b.cx;
        const double u = (std::cos(b.theta) * dx + std::sin(b.theta) * dy) / b.rx;
        const double t = (-std::sin(b.theta) * dx + std::cos(b.theta) * dy) / b.ry;
        const double d = std::sqrt(u * u + t * t);  // 1 at the boundary
        // ~0.9 px soft edge: crisp enough to challenge bicubic upsampling.
        const double alpha = smoothstep((1.0 - d) * b.ry / 0.9 + 0.5);
        if (alpha <= 0.0) continue;
        for (int ch = 0; ch < 3; ++ch) v[ch] = (1.0 - alpha) * v[ch] + alpha * b.color[ch];
      }
      for (int ch = 0; ch < 3; ++ch) img.at(y, x, ch) = std::clamp(v[ch], 0.0, 1.0);
    }
  }
  return img;
}

std::vector<std::string> write_toy_dataset(const std::string& dir, int64_t count, uint64_t seed,
                                           int64_t size) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (int64_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img%03d.png", int(i));
    const std::string path = (std::filesystem::path(dir) / name).string();
    save_png(synth_image(mix_seed(seed, uint64_t(i)), size, size), path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace hiif

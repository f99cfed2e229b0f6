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

#include "hiif/coords.hpp"

#include <algorithm>
#include <cmath>

#include "hiif/common.hpp"

namespace hiif {

std::vector<double> make_coord_grid(int64_t n) {
  if (n < 1) throw ShapeError("make_coord_grid: n must be >= 1");
  std::vector<double> g(n);
  for (int64_t i = 0; i < n; ++i) g[i] = pixel_center(i, n);
  return g;
}

Cell cell_of(double r_y, double r_x, int64_t H, int64_t W) {
  if (r_y <= 0.0 || r_x <= 0.0) throw ConfigError("cell_of: scales must be positive");
  if (r_y * double(H) < 1.0 || r_x * double(W) < 1.0)
    throw ConfigError("cell_of: target extent below one pixel");
  return Cell{2.0 / (r_y * double(H)), 2.0 / (r_x * double(W))};
}

std::array<LatentCorner, 4> nearest_latents(const Coord& xq, int64_t H, int64_t W) {
  // Fractional position on the latent pixel-center grid.
  const double uy = (xq.y + 1.0) * double(H) / 2.0 - 0.5;
  const double ux = (xq.x + 1.0) * double(W) / 2.0 - 0.5;
  const int64_t y0 = std::clamp<int64_t>(int64_t(std::floor(uy)), 0, H - 1);
  const int64_t y1 = std::clamp<int64_t>(int64_t(std::floor(uy)) + 1, 0, H - 1);
  const int64_t x0 = std::clamp<int64_t>(int64_t(std::floor(ux)), 0, W - 1);
  const int64_t x1 = std::clamp<int64_t>(int64_t(std::floor(ux)) + 1, 0, W - 1);
  auto corner = [&](int64_t iy, int64_t ix) {
    return LatentCorner{iy, ix, Coord{pixel_center(ix, W), pixel_center(iy, H)}};
  };
  return {corner(y0, x0), corner(y0, x1), corner(y1, x0), corner(y1, x1)};
}

std::pair<double, double> local_grid(const Coord& xq, const Coord& x_star, int64_t H, int64_t W) {
  return {(xq.y - x_star.y) * double(H) / 2.0, (xq.x - x_star.x) * double(W) / 2.0};
}

std::array<double, 4> ensemble_weights(const Coord& xq, const std::array<LatentCorner, 4>& corners) {
  std::array<double, 4> w;
  double total = 0.0;
  for (int t = 0; t < 4; ++t) {
    const Coord& opp = corners[3 - t].center;  // 00<->11, 01<->10
    w[t] = std::abs(xq.x - opp.x) * std::abs(xq.y - opp.y);
    total += w[t];
  }
  if (total == 0.0) return {0.25, 0.25, 0.25, 0.25};
  for (double& v : w) v /= total;
  return w;
}

std::pair<double, double> local_normalized_coord(const Coord& xq, const Coord& x_star_00,
                                                 int64_t H, int64_t W) {
  constexpr double kMax = 1.0 - 1e-6;
  const double xl = std::clamp((xq.x - x_star_00.x) * double(W) / 2.0, 0.0, kMax);
  const double yl = std::clamp((xq.y - x_star_00.y) * double(H) / 2.0, 0.0, kMax);
  return {xl, yl};
}

std::pair<int, int> hierarchical_encode(double x_local, double y_local, int level, int S) {
  if (S < 2) throw ConfigError("hierarchical_encode: S must be >= 2");
  if (level < 0) throw ConfigError("hierarchical_encode: level must be >= 0");
  const double scale = std::pow(double(S), double(level + 1));
  const int dx = int(int64_t(std::floor(x_local * scale)) % S);
  const int dy = int(int64_t(std::floor(y_local * scale)) % S);
  return {dx, dy};
}

}  // namespace hiif

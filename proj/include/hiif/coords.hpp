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

#ifndef HIIF_COORDS_HPP_
#define HIIF_COORDS_HPP_

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace hiif {

// Normalized image coordinate in [-1, 1]^2; pixel i of an n-pixel axis sits
// at -1 + (2i+1)/n.
struct Coord {
  double x = 0.0;
  double y = 0.0;
};

// Query cell size: 2 / target extent per axis.
struct Cell {
  double h = 0.0;
  double w = 0.0;
};

// One of the four latent-grid corners around a query, with its clamped grid
// index and its center coordinate.
struct LatentCorner {
  int64_t iy = 0;
  int64_t ix = 0;
  Coord center;
};

inline double pixel_center(int64_t i, int64_t n) {
  return -1.0 + double(2 * i + 1) / double(n);
}

// Pixel-center grid for an axis of n pixels: strictly increasing, mean 0,
// spacing 2/n.
std::vector<double> make_coord_grid(int64_t n);

// cell = [2/(r_y*H), 2/(r_x*W)].
Cell cell_of(double r_y, double r_x, int64_t H, int64_t W);

// The four surrounding latent centers, ordered 00, 01, 10, 11 where the first
// digit selects the y side and the second the x side; 00 is the low-low
// corner. Indices are clamped to the grid, so border queries may repeat a
// corner.
std::array<LatentCorner, 4> nearest_latents(const Coord& xq, int64_t H, int64_t W);

// Relative offset query minus latent center, scaled by H/2 and W/2 so one
// latent cell spans about one unit. Returns (dy, dx).
std::pair<double, double> local_grid(const Coord& xq, const Coord& x_star, int64_t H, int64_t W);

// Bilinear ensemble weights: w_t proportional to the area of the rectangle
// spanned by the query and the corner diagonally opposite t, normalized to
// sum 1. A fully degenerate configuration falls back to uniform 1/4.
std::array<double, 4> ensemble_weights(const Coord& xq, const std::array<LatentCorner, 4>& corners);

// Query offset from the 00 corner in latent-cell units, clamped to
// [0, 1 - 1e-6] per axis. Returns (x_local, y_local).
std::pair<double, double> local_normalized_coord(const Coord& xq, const Coord& x_star_00,
                                                 int64_t H, int64_t W);

// Level-l base-S digit pair of a local coordinate:
// digit = floor(coord * S^(l+1)) mod S.
std::pair<int, int> hierarchical_encode(double x_local, double y_local, int level, int S);

// Fixed centered affine embedding of a digit: 2*(d + 0.5)/S - 1, in (-1, 1).
inline double embed_digit(int d, int S) { return 2.0 * (d + 0.5) / double(S) - 1.0; }

}  // namespace hiif

#endif  // HIIF_COORDS_HPP_

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

#ifndef HIIF_TRAIN_HPP_
#define HIIF_TRAIN_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hiif/coords.hpp"
#include "hiif/image.hpp"
#include "hiif/rng.hpp"
#include "hiif/tensor.hpp"

namespace hiif {

struct TrainConfig {
  int64_t patch = 24;       // LR patch side p (48 at paper scale)
  int64_t batch = 4;        // B_s (16 at paper scale)
  int64_t epochs = 100;
  double lr0 = 1e-4;
  int64_t decay_every = 200;  // halve the LR every this many epochs
  double decay_factor = 0.5;
  double scale_min = 1.0;
  double scale_max = 4.0;
  uint64_t seed = 0;

  void validate() const;
};

/// Step-decay schedule; epoch is 1-based.
double lr_at_epoch(const TrainConfig& cfg, int64_t epoch);

/// One training example: an LR patch plus coordinate-RGB pairs sampled from
/// the HR crop it was downscaled from.
struct SamplePair {
  Image lr_patch;              // p x p x 3, [0,1]
  std::vector<Coord> coords;   // p^2 queries on the HR crop's pixel-center grid
  std::vector<int64_t> pix;    // flat HR pixel index of each query
  std::vector<double> targets; // p^2 x 3 RGB at those centers, [0,1]
  Cell cell;
  double scale = 1.0;          // realized scale hr_side / p
  int64_t hr_side = 0;
};

/// Draws a scale r ~ U(scale_min, scale_max), crops a random
/// floor(p*r) x floor(p*r) HR patch, bicubic-downscales it to p x p, and
/// samples p^2 pixel targets without replacement. The cell reflects the
/// realized integer crop size.
SamplePair sample_pair(const Image& image, Rng& rng, const TrainConfig& cfg);

/// Bilinear-skip values of an LR patch at the sampled HR pixels, [0,1].
std::vector<double> bilinear_skip_at(const Image& lr_patch, int64_t hr_side,
                                     const std::vector<int64_t>& pix);

/// Mean absolute error over all entries (shapes must match exactly).
template <typename T>
Tensor<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape())
    throw ShapeError("l1_loss shapes differ: " + shape_str(pred.shape()) + " vs " +
                     shape_str(target.shape()));
  return mean_all(abs_val(sub(pred, target)));
}

template <typename T>
struct AdamState {
  int64_t step = 0;
  std::map<std::string, std::vector<T>> m;
  std::map<std::string, std::vector<T>> v;
};

/// Standard bias-corrected Adam update, applied in parameter-name order.
template <typename T>
void adam_step(ParamStore<T>& params, const std::map<std::string, Tensor<T>>& grads,
               AdamState<T>& state, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

struct TrainResult {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  int64_t completed_epochs = 0;
};

template <typename T>
struct Model;

/// Runs the training loop on in-memory images, logging one line per epoch:
/// `epoch=<n> lr=<r> loss=<r>`. Aborts with diagnostics if the loss goes
/// non-finite. Deterministic for a fixed config and seed.
template <typename T>
TrainResult train(Model<T>& model, const std::vector<Image>& images, std::ostream& log);

}  // namespace hiif

#endif  // HIIF_TRAIN_HPP_

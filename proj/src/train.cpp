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

#include "hiif/train.hpp"

#include <cmath>
#include <ostream>

#include "hiif/model.hpp"
#include "hiif/resample.hpp"

namespace hiif {

void TrainConfig::validate() const {
  if (patch < 8) throw ConfigError("train.patch must be >= 8");
  if (batch < 1) throw ConfigError("train.batch must be >= 1");
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (!(lr0 > 0.0)) throw ConfigError("train.lr0 must be positive");
  if (decay_every < 1) throw ConfigError("train.decay_every must be >= 1");
  if (!(decay_factor > 0.0)) throw ConfigError("train.decay_factor must be positive");
  if (!(scale_min >= 1.0)) throw ConfigError("train.scale_min must be >= 1");
  if (!(scale_max >= scale_min)) throw ConfigError("train.scale_max must be >= scale_min");
}

double lr_at_epoch(const TrainConfig& cfg, int64_t epoch) {
  if (epoch < 1) throw ConfigError("lr_at_epoch: epoch is 1-based");
  return cfg.lr0 * std::pow(cfg.decay_factor, double((epoch - 1) / cfg.decay_every));
}

SamplePair sample_pair(const Image& image, Rng& rng, const TrainConfig& cfg) {
  const int64_t p = cfg.patch;
  const int64_t need = int64_t(std::ceil(double(p) * cfg.scale_max));
  if (image.h < need || image.w < need)
    throw DataError("image " + std::to_string(image.h) + "x" + std::to_string(image.w) +
                    " smaller than the " + std::to_string(need) + " needed for patch " +
                    std::to_string(p) + " at scale " + std::to_string(cfg.scale_max));
  const Image rgb = to_rgb(image);

  const double r = rng.uniform(cfg.scale_min, cfg.scale_max);
  const int64_t side = int64_t(std::floor(double(p) * r));
  const int64_t y0 = int64_t(rng.randint(uint64_t(rgb.h - side + 1)));
  const int64_t x0 = int64_t(rng.randint(uint64_t(rgb.w - side + 1)));
  const Image hr = crop(rgb, y0, x0, side, side);

  SamplePair sp;
  sp.lr_patch = bicubic_resize(hr, p, p);
  sp.hr_side = side;
  sp.scale = double(side) / double(p);
  sp.cell = cell_of(sp.scale, sp.scale, p, p);  // == [2/side, 2/side]

  const int64_t n = p * p;
  sp.pix = rng.sample_without_replacement(uint64_t(side * side), uint64_t(n));
  sp.coords.reserve(size_t(n));
  sp.targets.resize(size_t(n) * 3);
  for (int64_t i = 0; i < n; ++i) {
    const int64_t py = sp.pix[size_t(i)] / side;
    const int64_t px = sp.pix[size_t(i)] % side;
    sp.coords.push_back(Coord{pixel_center(px, side), pixel_center(py, side)});
    for (int64_t ch = 0; ch < 3; ++ch) sp.targets[size_t(i * 3 + ch)] = hr.at(py, px, ch);
  }
  return sp;
}

std::vector<double> bilinear_skip_at(const Image& lr_patch, int64_t hr_side,
                                     const std::vector<int64_t>& pix) {
  const Image up = bilinear_resize(lr_patch, hr_side, hr_side);
  std::vector<double> skip(pix.size() * 3);
  for (size_t i = 0; i < pix.size(); ++i)
    for (int64_t ch = 0; ch < 3; ++ch) skip[i * 3 + size_t(ch)] = up.pix[size_t(pix[i] * 3 + ch)];
  return skip;
}

template <typename T>
void adam_step(ParamStore<T>& params, const std::map<std::string, Tensor<T>>& grads,
               AdamState<T>& state, double lr, double beta1, double beta2, double eps) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(beta2, double(state.step));
  for (const auto& [name, stored] : params.all()) {
    Tensor<T> param = stored;  // handle copy; shares the underlying buffer
    const auto git = grads.find(name);
    if (git == grads.end()) throw ShapeError("adam_step: no gradient for parameter " + name);
    const Tensor<T>& g = git->second;
    if (g.shape() != param.shape())
      throw ShapeError("adam_step: gradient shape " + shape_str(g.shape()) +
                       " does not match parameter " + name + " " + shape_str(param.shape()));
    std::vector<T>& m = state.m[name];
    std::vector<T>& v = state.v[name];
    if (m.empty()) m.assign(size_t(param.numel()), T(0));
    if (v.empty()) v.assign(size_t(param.numel()), T(0));
    T* pv = param.data();
    const T* gv = g.data();
    for (int64_t i = 0; i < param.numel(); ++i) {
      const double gi = double(gv[i]);
      const double mi = beta1 * double(m[size_t(i)]) + (1.0 - beta1) * gi;
      const double vi = beta2 * double(v[size_t(i)]) + (1.0 - beta2) * gi * gi;
      m[size_t(i)] = T(mi);
      v[size_t(i)] = T(vi);
      pv[i] = T(double(pv[i]) - lr * (mi / bc1) / (std::sqrt(vi / bc2) + eps));
    }
  }
}

namespace {

template <typename T>
double param_norm(const ParamStore<T>& params) {
  double sq = 0.0;
  for (const auto& [name, t] : params.all())
    for (int64_t i = 0; i < t.numel(); ++i) sq += double(t.data()[i]) * double(t.data()[i]);
  return std::sqrt(sq);
}

}  // namespace

template <typename T>
TrainResult train(Model<T>& model, const std::vector<Image>& images, std::ostream& log) {
  const TrainConfig& tc = model.cfg.train;
  tc.validate();
  if (images.empty()) throw DataError("train: no training images");
  const int64_t need = int64_t(std::ceil(double(tc.patch) * tc.scale_max));
  std::vector<const Image*> usable;
  for (size_t i = 0; i < images.size(); ++i) {
    if (images[i].h >= need && images[i].w >= need) {
      usable.push_back(&images[i]);
    } else {
      log << "skip: image " << i << " (" << images[i].h << "x" << images[i].w
          << ") smaller than " << need << "\n";
    }
  }
  if (usable.empty())
    throw DataError("train: no image is at least " + std::to_string(need) + " per side");

  Rng rng(mix_seed(tc.seed, 0x747261696eu));  // "train"
  AdamState<T> adam;
  TrainResult result;
  const int64_t p2 = tc.patch * tc.patch;
  const int64_t batches = (int64_t(usable.size()) + tc.batch - 1) / tc.batch;

  for (int64_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    const double lr = lr_at_epoch(tc, epoch);
    double epoch_loss = 0.0;
    for (int64_t batch = 0; batch < batches; ++batch) {
      Tape<T> tape;
      Tensor<T> loss;
      for (int64_t s = 0; s < tc.batch; ++s) {
        const Image& img = *usable[rng.randint(uint64_t(usable.size()))];
        const SamplePair sp = sample_pair(img, rng, tc);
        const std::vector<double> skip = bilinear_skip_at(sp.lr_patch, sp.hr_side, sp.pix);

        const Tensor<T> latents = model.encoder(image_to_pm1_tensor<T>(sp.lr_patch));
        const Tensor<T> residual =
            model.decoder.decode(latents, sp.coords, sp.cell, double(p2));

        // Prediction and target both live in [-1, 1] space.
        std::vector<T> skip_pm1(size_t(p2) * 3), target_pm1(size_t(p2) * 3);
        for (int64_t i = 0; i < p2 * 3; ++i) {
          skip_pm1[size_t(i)] = T(2.0 * skip[size_t(i)] - 1.0);
          target_pm1[size_t(i)] = T(2.0 * sp.targets[size_t(i)] - 1.0);
        }
        const Tensor<T> pred = add(residual, Tensor<T>::from({p2, 3}, std::move(skip_pm1)));
        const Tensor<T> sample_loss =
            l1_loss(pred, Tensor<T>::from({p2, 3}, std::move(target_pm1)));
        loss = s == 0 ? sample_loss : add(loss, sample_loss);
      }
      loss = scale(loss, T(1.0 / double(tc.batch)));
      const double loss_val = double(loss.item());
      if (!std::isfinite(loss_val))
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 " batch " + std::to_string(batch) + " (|params| = " +
                                 std::to_string(param_norm(model.params)) + ")");
      model.params.zero_grads();
      const auto grads = backward_gradients(tape, loss, model.params);
      adam_step(model.params, grads, adam, lr);
      epoch_loss += loss_val;
    }
    epoch_loss /= double(batches);
    result.epoch_loss.push_back(epoch_loss);
    log << "epoch=" << epoch << " lr=" << lr << " loss=" << epoch_loss << "\n";
  }
  result.completed_epochs = tc.epochs;
  model.cfg.completed_epochs = tc.epochs;
  return result;
}

template void adam_step<float>(ParamStore<float>&, const std::map<std::string, Tensor<float>>&,
                               AdamState<float>&, double, double, double, double);
template void adam_step<double>(ParamStore<double>&, const std::map<std::string, Tensor<double>>&,
                                AdamState<double>&, double, double, double, double);
template TrainResult train<float>(Model<float>&, const std::vector<Image>&, std::ostream&);
template TrainResult train<double>(Model<double>&, const std::vector<Image>&, std::ostream&);

}  // namespace hiif

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

#ifndef HIIF_EVAL_HPP_
#define HIIF_EVAL_HPP_

#include <string>
#include <utility>
#include <vector>

#include "hiif/model.hpp"

namespace hiif {

struct BenchRow {
  std::string dataset;
  double scale = 0.0;  // realized scale (mean over images; equals the request for integers)
  std::string method;
  double psnr_db = 0.0;
  int64_t n_images = 0;
  std::string convention;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  /// Tab-separated table: dataset, scale, method, psnr_db, n_images,
  /// convention. Stable formatting, suitable for byte comparison.
  std::string to_tsv() const;
};

struct EvalOptions {
  PsnrConvention convention = PsnrConvention::kRgb;
  std::string dataset_name = "dataset";
  int64_t tile = 16384;
};

/// PNG paths under dir, sorted by filename. Empty or missing dir is an
/// error naming the dir.
std::vector<std::string> list_pngs(const std::string& dir);

/// Divisible-crop evaluation pair: integer scales center-crop the ground
/// truth to multiples of r; non-integer scales use LR side floor(n/r) and
/// HR side floor(r * LR side). Returns (lr, gt_cropped).
std::pair<Image, Image> prepare_pair(const Image& gt, double scale);

/// Realized per-axis scale of a prepared pair.
double realized_scale(const Image& lr, const Image& gt_cropped);

/// Shave rule used for all reported PSNR values: ceil of the realized scale.
int64_t shave_for_scale(double scale);

template <typename T>
BenchReport eval_model(const Model<T>& model, const std::string& dataset_dir,
                       const std::vector<double>& scales, const EvalOptions& opt,
                       const std::string& method = "hiif");

/// Interpolation-only baselines scored under the identical protocol.
BenchReport eval_baseline(const std::string& dataset_dir, const std::vector<double>& scales,
                          Kernel kernel, const EvalOptions& opt);

}  // namespace hiif

#endif  // HIIF_EVAL_HPP_

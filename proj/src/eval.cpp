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

#include "hiif/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

namespace hiif {

namespace {

bool is_integer_scale(double r) { return std::abs(r - std::round(r)) < 1e-9; }

std::string fmt(double v, int digits) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

const char* convention_name(PsnrConvention c) {
  return c == PsnrConvention::kRgb ? "rgb" : "y";
}

template <typename Score>
BenchRow run_row(const std::string& dataset_dir, double scale, const EvalOptions& opt,
                 const std::string& method, Score&& score) {
  const std::vector<std::string> paths = list_pngs(dataset_dir);
  double psnr_sum = 0.0;
  double realized_sum = 0.0;
  int64_t n = 0;
  for (const std::string& path : paths) {
    const Image gt = to_rgb(load_png(path));
    if (double(std::min(gt.h, gt.w)) < scale) continue;  // unusably small; skip
    const auto [lr, gt_crop] = prepare_pair(gt, scale);
    const double r = realized_scale(lr, gt_crop);
    const Image sr = score(lr, gt_crop);
    psnr_sum += psnr(sr, gt_crop, opt.convention, shave_for_scale(r));
    realized_sum += r;
    ++n;
  }
  BenchRow row;
  row.dataset = opt.dataset_name;
  row.scale = n > 0 ? realized_sum / double(n) : scale;
  row.method = method;
  row.psnr_db = n > 0 ? psnr_sum / double(n) : 0.0;
  row.n_images = n;
  row.convention = convention_name(opt.convention);
  return row;
}

}  // namespace

std::string BenchReport::to_tsv() const {
  std::string out = "dataset\tscale\tmethod\tpsnr_db\tn_images\tconvention\n";
  for (const BenchRow& r : rows) {
    out += r.dataset + "\t" + fmt(r.scale, 4) + "\t" + r.method + "\t" + fmt(r.psnr_db, 4) +
           "\t" + std::to_string(r.n_images) + "\t" + r.convention + "\n";
  }
  return out;
}

std::vector<std::string> list_pngs(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("dataset dir not found: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (ext == ".png") paths.push_back(entry.path().string());
  }
  if (paths.empty()) throw IoError("no PNG files in dataset dir: " + dir);
  std::sort(paths.begin(), paths.end());
  return paths;
}

std::pair<Image, Image> prepare_pair(const Image& gt, double scale) {
  if (!(scale >= 1.0)) throw ConfigError("prepare_pair: scale must be >= 1");
  int64_t lr_h, lr_w, hr_h, hr_w;
  if (is_integer_scale(scale)) {
    const int64_t r = int64_t(std::llround(scale));
    hr_h = gt.h - gt.h % r;
    hr_w = gt.w - gt.w % r;
    lr_h = hr_h / r;
    lr_w = hr_w / r;
  } else {
    lr_h = int64_t(std::floor(double(gt.h) / scale));
    lr_w = int64_t(std::floor(double(gt.w) / scale));
    hr_h = int64_t(std::floor(scale * double(lr_h)));
    hr_w = int64_t(std::floor(scale * double(lr_w)));
  }
  if (lr_h < 1 || lr_w < 1)
    throw DataError("image " + std::to_string(gt.h) + "x" + std::to_string(gt.w) +
                    " too small for scale " + std::to_string(scale));
  const Image gt_crop = center_crop(gt, hr_h, hr_w);
  return {bicubic_resize(gt_crop, lr_h, lr_w), gt_crop};
}

double realized_scale(const Image& lr, const Image& gt_cropped) {
  return 0.5 * (double(gt_cropped.h) / double(lr.h) + double(gt_cropped.w) / double(lr.w));
}

int64_t shave_for_scale(double scale) { return int64_t(std::ceil(scale - 1e-9)); }

template <typename T>
BenchReport eval_model(const Model<T>& model, const std::string& dataset_dir,
                       const std::vector<double>& scales, const EvalOptions& opt,
                       const std::string& method) {
  BenchReport report;
  for (double scale : scales) {
    report.rows.push_back(run_row(dataset_dir, scale, opt, method,
                                  [&](const Image& lr, const Image& gt_crop) {
                                    return super_resolve(model, lr, gt_crop.h, gt_crop.w,
                                                         opt.tile);
                                  }));
  }
  return report;
}

BenchReport eval_baseline(const std::string& dataset_dir, const std::vector<double>& scales,
                          Kernel kernel, const EvalOptions& opt) {
  const std::string method = kernel == Kernel::kBicubic ? "bicubic" : "bilinear";
  BenchReport report;
  for (double scale : scales) {
    report.rows.push_back(run_row(dataset_dir, scale, opt, method,
                                  [&](const Image& lr, const Image& gt_crop) {
                                    return resize(lr, gt_crop.h, gt_crop.w, kernel);
                                  }));
  }
  return report;
}

template BenchReport eval_model<float>(const Model<float>&, const std::string&,
                                       const std::vector<double>&, const EvalOptions&,
                                       const std::string&);
template BenchReport eval_model<double>(const Model<double>&, const std::string&,
                                        const std::vector<double>&, const EvalOptions&,
                                        const std::string&);

}  // namespace hiif

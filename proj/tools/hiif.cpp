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

// hiif command line: train / infer / eval / gradcheck / ablate / datagen.
// Exit status: 0 success, 1 runtime failure, 2 usage or config error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hiif/config.hpp"
#include "hiif/datagen.hpp"
#include "hiif/eval.hpp"
#include "hiif/gradcheck.hpp"
#include "hiif/image.hpp"
#include "hiif/model.hpp"
#include "hiif/train.hpp"

namespace {

using namespace hiif;

std::vector<Image> load_dir(const std::string& dir) {
  std::vector<Image> images;
  for (const std::string& p : list_pngs(dir)) images.push_back(load_png(p));
  return images;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

RunConfig make_config(const std::string& preset, const std::string& config_path, uint64_t seed) {
  RunConfig cfg = preset_config(preset);
  if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
  cfg.train.seed = seed;
  return cfg;
}

/// Trains a fresh float32 model, writes the checkpoint and a metrics log
/// (`<out>.log`), and returns the trained model.
Model<float> train_one(const RunConfig& cfg, const std::vector<Image>& images,
                       const std::string& out) {
  Model<float> model = build_model<float>(cfg, cfg.train.seed);
  std::printf("training %s: %lld params, %zu images, %lld epochs\n",
              variant_name(cfg.decoder.variant).c_str(),
              static_cast<long long>(model.params.param_count()), images.size(),
              static_cast<long long>(cfg.train.epochs));
  const TrainResult result = train(model, images, std::cout);
  save_model(model, out);
  std::string log;
  for (size_t e = 0; e < result.epoch_loss.size(); ++e) {
    char line[128];
    std::snprintf(line, sizeof(line), "epoch=%zu lr=%.8g loss=%.8g\n", e + 1,
                  lr_at_epoch(model.cfg.train, static_cast<int64_t>(e + 1)),
                  result.epoch_loss[e]);
    log += line;
  }
  write_text(out + ".log", log);
  std::printf("checkpoint written to %s\n", out.c_str());
  return model;
}

PsnrConvention parse_convention(const std::string& name) {
  if (name == "rgb") return PsnrConvention::kRgb;
  if (name == "y") return PsnrConvention::kYChannel;
  throw ConfigError("unknown convention '" + name + "' (expected rgb or y)");
}

std::string dataset_label(const std::string& dir, const std::string& override_name) {
  if (!override_name.empty()) return override_name;
  const std::filesystem::path p(dir);
  const std::string base = p.filename().string();
  return base.empty() ? p.parent_path().filename().string() : base;
}

void emit_report(const std::string& tsv, const std::string& out) {
  if (out.empty()) {
    std::fputs(tsv.c_str(), stdout);
  } else {
    write_text(out, tsv);
    std::printf("report written to %s\n", out.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hiif: hierarchical-encoding implicit image function for "
               "continuous arbitrary-scale super-resolution"};
  app.require_subcommand(1);
  int rc = 0;

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model on a directory of PNGs");
  std::string tr_config, tr_data, tr_out, tr_preset = "desk";
  uint64_t tr_seed = 0;
  train_cmd->add_option("--config", tr_config, "Config file applied on top of the preset");
  train_cmd->add_option("--data", tr_data, "Training image directory")->required();
  train_cmd->add_option("--out", tr_out, "Checkpoint output path")->required();
  train_cmd->add_option("--seed", tr_seed, "Training seed")->capture_default_str();
  train_cmd->add_option("--preset", tr_preset, "Base preset")->capture_default_str()
      ->check(CLI::IsMember({"desk", "paper"}));
  train_cmd->callback([&] {
    const RunConfig cfg = make_config(tr_preset, tr_config, tr_seed);
    train_one(cfg, load_dir(tr_data), tr_out);
  });

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "Super-resolve one PNG");
  std::string in_ckpt, in_input, in_output, in_size;
  double in_scale = 0.0;
  infer_cmd->add_option("--ckpt", in_ckpt, "Checkpoint path")->required();
  infer_cmd->add_option("--input", in_input, "Input PNG")->required();
  infer_cmd->add_option("--output", in_output, "Output PNG")->required();
  auto* scale_opt = infer_cmd->add_option("--scale", in_scale, "Upsampling factor r >= 1");
  auto* size_opt =
      infer_cmd->add_option("--size", in_size, "Exact output size HxW (e.g. 40x60)");
  scale_opt->excludes(size_opt);
  infer_cmd->callback([&] {
    const Model<float> model = load_model<float>(in_ckpt);
    const Image img = load_png(in_input);
    int64_t out_h = 0, out_w = 0;
    if (!in_size.empty()) {
      long long h = 0, w = 0;
      if (std::sscanf(in_size.c_str(), "%lldx%lld", &h, &w) != 2 || h < 1 || w < 1)
        throw ConfigError("--size expects HxW with positive integers, got '" + in_size + "'");
      out_h = h;
      out_w = w;
    } else if (scale_opt->count() > 0) {
      if (in_scale < 1.0) throw ConfigError("--scale must be >= 1");
      out_h = static_cast<int64_t>(std::ceil(in_scale * double(img.h)));
      out_w = static_cast<int64_t>(std::ceil(in_scale * double(img.w)));
    } else {
      throw ConfigError("infer needs --scale or --size");
    }
    save_png(super_resolve(model, img, out_h, out_w), in_output);
    std::printf("%s: %lldx%lld -> %lldx%lld, written to %s\n", in_input.c_str(),
                static_cast<long long>(img.h), static_cast<long long>(img.w),
                static_cast<long long>(out_h), static_cast<long long>(out_w), in_output.c_str());
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Benchmark a checkpoint and/or a baseline");
  std::string ev_ckpt, ev_data, ev_baseline, ev_out, ev_convention = "rgb", ev_name;
  std::vector<double> ev_scales;
  int64_t ev_tile = 16384;
  eval_cmd->add_option("--ckpt", ev_ckpt, "Checkpoint to evaluate");
  eval_cmd->add_option("--data", ev_data, "Dataset directory of ground-truth PNGs")->required();
  eval_cmd->add_option("--scales", ev_scales, "Comma-separated scales, e.g. 2,3,4")
      ->required()
      ->delimiter(',');
  eval_cmd->add_option("--baseline", ev_baseline, "Interpolation baseline")
      ->check(CLI::IsMember({"bicubic", "bilinear"}));
  eval_cmd->add_option("--out", ev_out, "Write the TSV report here instead of stdout");
  eval_cmd->add_option("--convention", ev_convention, "PSNR convention")->capture_default_str()
      ->check(CLI::IsMember({"rgb", "y"}));
  eval_cmd->add_option("--dataset-name", ev_name, "Dataset label in the report");
  eval_cmd->add_option("--tile", ev_tile, "Max queries per decode tile")->capture_default_str();
  eval_cmd->callback([&] {
    if (ev_ckpt.empty() && ev_baseline.empty())
      throw ConfigError("eval needs --ckpt, --baseline, or both");
    EvalOptions opt;
    opt.convention = parse_convention(ev_convention);
    opt.dataset_name = dataset_label(ev_data, ev_name);
    opt.tile = ev_tile;
    BenchReport report;
    if (!ev_ckpt.empty()) {
      const Model<float> model = load_model<float>(ev_ckpt);
      const BenchReport r = eval_model(model, ev_data, ev_scales, opt);
      report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
    }
    if (!ev_baseline.empty()) {
      const Kernel k = ev_baseline == "bicubic" ? Kernel::kBicubic : Kernel::kBilinear;
      const BenchReport r = eval_baseline(ev_data, ev_scales, k, opt);
      report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
    }
    emit_report(report.to_tsv(), ev_out);
  });

  // gradcheck
  auto* grad_cmd =
      app.add_subcommand("gradcheck", "Finite-difference check of every backward pass");
  std::string gc_preset = "desk";
  uint64_t gc_seed = 0;
  grad_cmd->add_option("--preset", gc_preset, "Model preset for the end-to-end check")->capture_default_str()
      ->check(CLI::IsMember({"desk"}));
  grad_cmd->add_option("--seed", gc_seed, "Suite seed")->capture_default_str();
  grad_cmd->callback([&] {
    const std::vector<GradCheckLine> lines = run_gradcheck_suite(gc_seed);
    for (const GradCheckLine& l : lines)
      std::printf("%-18s max_rel_err=%.3e  instances=%d\n", l.name.c_str(), l.max_rel_err,
                  l.instances);
    const bool ok = gradcheck_passed(lines);
    std::printf("gradcheck %s: %zu op categories, threshold 1e-4\n", ok ? "passed" : "FAILED",
                lines.size());
    if (!ok) rc = 1;
  });

  // ablate
  auto* abl_cmd = app.add_subcommand(
      "ablate", "Train and evaluate a model variant paired with a full run (same seed)");
  std::string ab_variant, ab_config, ab_data, ab_eval_data, ab_out, ab_convention = "rgb",
              ab_name, ab_preset = "desk";
  std::vector<double> ab_scales = {2.0};
  uint64_t ab_seed = 0;
  abl_cmd->add_option("--variant", ab_variant, "One of v1-H, v2-MS, v3-MH, liif")->required();
  abl_cmd->add_option("--config", ab_config, "Config file applied on top of the preset");
  abl_cmd->add_option("--data", ab_data, "Training image directory")->required();
  abl_cmd->add_option("--eval-data", ab_eval_data,
                      "Held-out evaluation directory (defaults to --data)");
  abl_cmd->add_option("--out", ab_out, "Output directory for checkpoints and report")
      ->required();
  abl_cmd->add_option("--scales", ab_scales, "Evaluation scales")->capture_default_str()->delimiter(',');
  abl_cmd->add_option("--seed", ab_seed, "Shared training seed")->capture_default_str();
  abl_cmd->add_option("--preset", ab_preset, "Base preset")->capture_default_str()
      ->check(CLI::IsMember({"desk", "paper"}));
  abl_cmd->add_option("--convention", ab_convention, "PSNR convention")->capture_default_str()
      ->check(CLI::IsMember({"rgb", "y"}));
  abl_cmd->add_option("--dataset-name", ab_name, "Dataset label in the report");
  abl_cmd->callback([&] {
    const Variant variant = parse_variant(ab_variant);
    if (variant == Variant::kFull)
      throw ConfigError("--variant must name an ablation, not the full model");
    RunConfig cfg = make_config(ab_preset, ab_config, ab_seed);
    std::filesystem::create_directories(ab_out);
    const std::vector<Image> images = load_dir(ab_data);
    const std::string eval_dir = ab_eval_data.empty() ? ab_data : ab_eval_data;

    cfg.decoder.variant = Variant::kFull;
    const Model<float> full =
        train_one(cfg, images, (std::filesystem::path(ab_out) / "full.ckpt").string());
    cfg.decoder.variant = variant;
    const Model<float> ablated = train_one(
        cfg, images, (std::filesystem::path(ab_out) / (ab_variant + ".ckpt")).string());

    EvalOptions opt;
    opt.convention = parse_convention(ab_convention);
    opt.dataset_name = dataset_label(eval_dir, ab_name);
    const BenchReport full_rep = eval_model(full, eval_dir, ab_scales, opt, "full");
    const BenchReport abl_rep = eval_model(ablated, eval_dir, ab_scales, opt, ab_variant);
    std::string tsv = "dataset\tscale\tpsnr_full\tpsnr_" + ab_variant + "\tn_images\tconvention\n";
    for (size_t i = 0; i < full_rep.rows.size(); ++i) {
      const BenchRow& f = full_rep.rows[i];
      const BenchRow& a = abl_rep.rows[i];
      char line[256];
      std::snprintf(line, sizeof(line), "%s\t%.4f\t%.4f\t%.4f\t%lld\t%s\n", f.dataset.c_str(),
                    f.scale, f.psnr_db, a.psnr_db, static_cast<long long>(f.n_images),
                    f.convention.c_str());
      tsv += line;
    }
    emit_report(tsv, (std::filesystem::path(ab_out) / "ablation.tsv").string());
    std::fputs(tsv.c_str(), stdout);
  });

  // datagen
  auto* gen_cmd = app.add_subcommand("datagen", "Write a deterministic synthetic toy dataset");
  std::string dg_out;
  int64_t dg_count = 16, dg_size = 96;
  uint64_t dg_seed = 0;
  gen_cmd->add_option("--out", dg_out, "Output directory")->required();
  gen_cmd->add_option("--count", dg_count, "Number of images")->capture_default_str();
  gen_cmd->add_option("--size", dg_size, "Square image side in pixels")->capture_default_str();
  gen_cmd->add_option("--seed", dg_seed, "Generator seed")->capture_default_str();
  gen_cmd->callback([&] {
    const std::vector<std::string> paths = write_toy_dataset(dg_out, dg_count, dg_seed, dg_size);
    std::printf("wrote %zu images to %s\n", paths.size(), dg_out.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}

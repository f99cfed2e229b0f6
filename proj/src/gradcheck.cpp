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

#include "hiif/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "hiif/model.hpp"
#include "hiif/rng.hpp"
#include "hiif/train.hpp"

namespace hiif {

double fd_max_rel_err(const std::function<Tensor<double>()>& loss_fn,
                      std::vector<Tensor<double>> wrt, const FdCheck& opts) {
  // Analytic gradients first.
  for (Tensor<double>& t : wrt) t.zero_grad();
  std::vector<std::vector<double>> analytic;
  {
    Tape<double> tape;
    Tensor<double> loss = loss_fn();
    tape.backward(loss);
  }
  analytic.reserve(wrt.size());
  for (const Tensor<double>& t : wrt) analytic.push_back(t.grad());

  Rng rng(mix_seed(opts.seed, 0x6fd));
  double worst = 0.0;
  for (size_t ti = 0; ti < wrt.size(); ++ti) {
    Tensor<double>& t = wrt[ti];
    const int64_t n = t.numel();
    std::vector<int64_t> coords;
    if (opts.coords_per_tensor < 0 || opts.coords_per_tensor >= n) {
      coords.resize(n);
      for (int64_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      for (int64_t k = 0; k < opts.coords_per_tensor; ++k) coords.push_back(rng.randint(n));
    }
    for (int64_t i : coords) {
      const double saved = t.data()[i];
      const double an = analytic[ti][i];
      const auto rel_at = [&](double step) {
        t.data()[i] = saved + step;
        const double lp = loss_fn().item();
        t.data()[i] = saved - step;
        const double lm = loss_fn().item();
        t.data()[i] = saved;
        const double fd = (lp - lm) / (2.0 * step);
        return std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 0.01});
      };
      double rel = rel_at(opts.step);
      // A relu or L1 kink inside the difference window invalidates the
      // estimate; shrinking the step resolves those, while a genuine
      // backward error is step-independent and stays.
      if (rel > 1e-5) rel = std::min(rel, rel_at(opts.step / 100.0));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

bool gradcheck_passed(const std::vector<GradCheckLine>& lines, double threshold) {
  for (const auto& l : lines) {
    if (!(l.max_rel_err < threshold)) return false;
  }
  return !lines.empty();
}

namespace {

using D = Tensor<double>;

/// Values bounded away from zero so relu/abs kinks sit outside the FD step.
D rnd(Rng& rng, Shape s, bool grad = true, double lo = 0.2, double hi = 1.0) {
  D t = D::zeros(std::move(s));
  for (int64_t i = 0; i < t.numel(); ++i)
    t.data()[i] = rng.uniform(lo, hi) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  t.set_requires_grad(grad);
  return t;
}

/// Mean of y*y: makes gradients input-dependent even for linear ops.
D sq_mean(const D& y) { return mean_all(mul(y, y)); }

std::vector<D> all_params(ParamStore<double>& store) {
  std::vector<D> out;
  for (const auto& [name, t] : store.all()) out.push_back(t);
  return out;
}

/// Gradients are checked at a generic point in parameter space. Fresh
/// zero-initialized tensors (biases, final projections) are degenerate
/// there: a dead relu layer feeds exact zeros into a zero bias, parking
/// the next kink precisely at the evaluation point where finite
/// differences are invalid, and the zero final projection would zero out
/// every upstream gradient.
void randomize_zeros(ParamStore<double>& store, Rng& rng) {
  for (auto& [name, stored] : store.all()) {
    D t = stored;
    bool all_zero = true;
    for (int64_t i = 0; i < t.numel() && all_zero; ++i) all_zero = t.data()[i] == 0.0;
    if (all_zero)
      for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(-0.5, 0.5);
  }
}

std::vector<Coord> random_queries(Rng& rng, int64_t n) {
  std::vector<Coord> qs;
  for (int64_t i = 0; i < n; ++i)
    qs.push_back(Coord{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  return qs;
}

struct Suite {
  uint64_t seed;
  std::vector<GradCheckLine> lines;

  void run(const std::string& name, int instances,
           const std::function<double(Rng&, int)>& one) {
    GradCheckLine line{name, 0.0, instances};
    for (int i = 0; i < instances; ++i) {
      Rng rng(mix_seed(seed, mix_seed(std::hash<std::string>{}(name), uint64_t(i))));
      line.max_rel_err = std::max(line.max_rel_err, one(rng, i));
    }
    lines.push_back(line);
  }
};

double check_decoder_variant(Rng& rng, Variant variant, int64_t coords_per_tensor) {
  DecoderConfig dc;
  dc.L = 3;
  dc.C = 8;
  dc.S = 2;
  dc.B = 1;
  dc.N = 2;
  dc.variant = variant;
  ParamStore<double> store;
  Rng init(mix_seed(0x6463u, rng.randint(1u << 30)));
  HiifDecoder<double> dec(dc, store, init);
  randomize_zeros(store, rng);
  const D latents = rnd(rng, {4, 4, 8}, true);
  const auto queries = random_queries(rng, 6);
  const Cell cell = cell_of(2.0, 2.0, 4, 4);
  // Targets far outside the decoder's range: the L1 kink must not sit
  // inside the finite-difference window.
  const D targets = rnd(rng, {6, 3}, false, 5.0, 6.0);
  std::vector<D> wrt = all_params(store);
  wrt.push_back(latents);
  FdCheck opts;
  opts.coords_per_tensor = coords_per_tensor;
  opts.seed = rng.randint(1u << 30);
  return fd_max_rel_err(
      [&] { return l1_loss(dec.decode(latents, queries, cell, 6.0), targets); }, wrt, opts);
}

}  // namespace

std::vector<GradCheckLine> run_gradcheck_suite(uint64_t seed) {
  Suite s{seed, {}};
  FdCheck full;  // every coordinate

  s.run("matmul", 12, [&](Rng& rng, int) {
    const int64_t m = 1 + int64_t(rng.randint(4)), k = 1 + int64_t(rng.randint(4)),
                  p = 1 + int64_t(rng.randint(4));
    D a = rnd(rng, {m, k}), b = rnd(rng, {k, p});
    return fd_max_rel_err([&] { return sq_mean(matmul(a, b)); }, {a, b}, full);
  });
  s.run("transpose2d", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {3, 4});
    return fd_max_rel_err([&] { return sq_mean(transpose2d(a)); }, {a}, full);
  });
  s.run("add", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {3, 4}), b = rnd(rng, {3, 4});
    return fd_max_rel_err([&] { return sq_mean(add(a, b)); }, {a, b}, full);
  });
  s.run("add_broadcast", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {3, 4}), b = rnd(rng, {4}), c = rnd(rng, {1});
    return fd_max_rel_err([&] { return sq_mean(add(add(a, b), c)); }, {a, b, c}, full);
  });
  s.run("sub", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {2, 5}), b = rnd(rng, {5});
    return fd_max_rel_err([&] { return sq_mean(sub(a, b)); }, {a, b}, full);
  });
  s.run("mul", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {3, 4}), b = rnd(rng, {3, 4});
    return fd_max_rel_err([&] { return mean_all(mul(a, b)); }, {a, b}, full);
  });
  s.run("mul_broadcast", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {2, 3, 2}), b = rnd(rng, {2});
    return fd_max_rel_err([&] { return sq_mean(mul(a, b)); }, {a, b}, full);
  });
  s.run("scale", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {4, 3});
    const double c = rng.uniform(-2.0, 2.0);
    return fd_max_rel_err([&] { return sq_mean(scale(a, c)); }, {a}, full);
  });
  s.run("relu", 12, [&](Rng& rng, int) {
    D a = rnd(rng, {4, 5});
    return fd_max_rel_err([&] { return sq_mean(relu(a)); }, {a}, full);
  });
  s.run("abs", 12, [&](Rng& rng, int) {
    D a = rnd(rng, {4, 5});
    return fd_max_rel_err([&] { return mean_all(abs_val(a)); }, {a}, full);
  });
  s.run("mean_all", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {3, 3});
    return fd_max_rel_err([&] { return mul(mean_all(a), mean_all(a)); }, {a}, full);
  });
  s.run("concat_cols", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {3, 2}), b = rnd(rng, {3, 4}), c = rnd(rng, {3, 1});
    return fd_max_rel_err([&] { return sq_mean(concat_cols({a, b, c})); }, {a, b, c}, full);
  });
  s.run("reshape", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {2, 6});
    return fd_max_rel_err([&] { return sq_mean(reshape(a, {3, 4})); }, {a}, full);
  });
  s.run("gather_rows", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {5, 3});
    // Repeated indices exercise the scatter-add in the backward pass.
    std::vector<int64_t> idx = {0, 2, 2, 4, 1, 2};
    return fd_max_rel_err([&] { return sq_mean(gather_rows(a, idx)); }, {a}, full);
  });
  s.run("slice_cols", 10, [&](Rng& rng, int) {
    D a = rnd(rng, {4, 6});
    return fd_max_rel_err([&] { return sq_mean(slice_cols(a, 1, 4)); }, {a}, full);
  });
  s.run("layer_norm", 12, [&](Rng& rng, int) {
    D a = rnd(rng, {4, 6}, true, 0.5, 3.0);
    return fd_max_rel_err([&] { return sq_mean(layer_norm(a, 1e-5)); }, {a}, full);
  });
  s.run("conv2d_3x3", 10, [&](Rng& rng, int) {
    D x = rnd(rng, {4, 5, 2}), k = rnd(rng, {3, 3, 2, 3}), b = rnd(rng, {3});
    return fd_max_rel_err([&] { return sq_mean(conv2d_3x3(x, k, b)); }, {x, k, b}, full);
  });
  s.run("unfold3x3", 10, [&](Rng& rng, int) {
    D x = rnd(rng, {4, 4, 2});
    return fd_max_rel_err([&] { return sq_mean(unfold3x3(x)); }, {x}, full);
  });
  s.run("l1_loss", 10, [&](Rng& rng, int) {
    D p = rnd(rng, {5, 3}, true, 0.2, 1.0);
    D t = rnd(rng, {5, 3}, false, 1.5, 2.5);  // kept away from pred: no ties
    return fd_max_rel_err([&] { return l1_loss(p, t); }, {p}, full);
  });
  s.run("linear_mlp", 10, [&](Rng& rng, int) {
    ParamStore<double> store;
    Rng init(mix_seed(0x6d6cu, rng.randint(1u << 30)));
    Mlp2<double> mlp(store, "mlp", 4, 6, 3, init);
    randomize_zeros(store, rng);
    D x = rnd(rng, {5, 4});
    std::vector<D> wrt = all_params(store);
    wrt.push_back(x);
    return fd_max_rel_err([&] { return sq_mean(mlp(x)); }, wrt, full);
  });
  s.run("attention", 10, [&](Rng& rng, int) {
    DecoderConfig dc;
    dc.L = 1;
    dc.C = 8;
    dc.B = 1;
    dc.N = 2;
    ParamStore<double> store;
    Rng init(mix_seed(0x617474u, rng.randint(1u << 30)));
    HiifDecoder<double> dec(dc, store, init);
    randomize_zeros(store, rng);
    D z = rnd(rng, {5, 8});
    std::vector<D> wrt = all_params(store);
    wrt.push_back(z);
    return fd_max_rel_err([&] { return sq_mean(dec.attention(0, z, 5.0)); }, wrt, full);
  });
  s.run("level_step", 10, [&](Rng& rng, int) {
    DecoderConfig dc;
    dc.L = 3;
    dc.C = 8;
    dc.B = 2;
    dc.N = 2;
    ParamStore<double> store;
    Rng init(mix_seed(0x6c76u, rng.randint(1u << 30)));
    HiifDecoder<double> dec(dc, store, init);
    randomize_zeros(store, rng);
    D z = rnd(rng, {4, 8});
    D enc = rnd(rng, {4, 2});
    std::vector<D> wrt = all_params(store);
    wrt.push_back(z);
    wrt.push_back(enc);
    return fd_max_rel_err([&] { return sq_mean(dec.level_step(1, z, enc, 4.0)); }, wrt, full);
  });
  s.run("encoder_e2e", 10, [&](Rng& rng, int) {
    EncoderConfig ec{6, 2, 5, false};
    ParamStore<double> store;
    Rng init(mix_seed(0x656eu, rng.randint(1u << 30)));
    Encoder<double> enc(ec, store, init);
    randomize_zeros(store, rng);
    const D x = rnd(rng, {6, 6, 3}, false);
    return fd_max_rel_err([&] { return mean_all(enc(x)); }, all_params(store), full);
  });
  s.run("encoder_unfold", 10, [&](Rng& rng, int) {
    EncoderConfig ec{4, 1, 5, true};
    ParamStore<double> store;
    Rng init(mix_seed(0x6575u, rng.randint(1u << 30)));
    Encoder<double> enc(ec, store, init);
    randomize_zeros(store, rng);
    const D x = rnd(rng, {5, 4, 3}, false);
    return fd_max_rel_err([&] { return sq_mean(enc(x)); }, all_params(store), full);
  });
  s.run("decoder_full", 10,
        [&](Rng& rng, int) { return check_decoder_variant(rng, Variant::kFull, -1); });
  s.run("decoder_v1h", 10,
        [&](Rng& rng, int) { return check_decoder_variant(rng, Variant::kV1H, -1); });
  s.run("decoder_v2ms", 10,
        [&](Rng& rng, int) { return check_decoder_variant(rng, Variant::kV2MS, -1); });
  s.run("decoder_v3mh", 10,
        [&](Rng& rng, int) { return check_decoder_variant(rng, Variant::kV3MH, -1); });
  s.run("decoder_liif", 10,
        [&](Rng& rng, int) { return check_decoder_variant(rng, Variant::kLiif, -1); });
  s.run("model_desk_e2e", 10, [&](Rng& rng, int) {
    RunConfig cfg = preset_config("desk");
    Model<double> model = build_model<double>(cfg, rng.randint(1u << 30));
    randomize_zeros(model.params, rng);
    const D img = rnd(rng, {6, 6, 3}, false);
    const auto queries = random_queries(rng, 8);
    const Cell cell = cell_of(2.0, 2.0, 6, 6);
    const D targets = rnd(rng, {8, 3}, false, 5.0, 6.0);
    FdCheck opts;
    opts.coords_per_tensor = 3;
    opts.seed = rng.randint(1u << 30);
    return fd_max_rel_err(
        [&] {
          const D latents = model.encoder(img);
          return l1_loss(model.decoder.decode(latents, queries, cell, 8.0), targets);
        },
        all_params(model.params), opts);
  });
  return s.lines;
}

}  // namespace hiif

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

#include "hiif/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace hiif {

namespace {
thread_local int g_nograd_depth = 0;
}  // namespace

NoGradGuard::NoGradGuard() { ++g_nograd_depth; }
NoGradGuard::~NoGradGuard() { --g_nograd_depth; }
bool NoGradGuard::enabled() { return g_nograd_depth > 0; }

namespace {

template <typename T>
bool want_record(std::initializer_list<const Tensor<T>*> inputs) {
  if (!Tape<T>::recording()) return false;
  for (const Tensor<T>* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

template <typename T>
void mark_and_record(Tensor<T>& out, std::function<void()> step) {
  out.set_requires_grad(true);
  Tape<T>::active()->record(std::move(step));
}

// Broadcast layout between two shapes: either equal, or the smaller shape is
// a trailing suffix of the larger (repeated over leading extents), or the
// smaller is a single element.
struct BroadcastPlan {
  bool a_is_small = false;  // which operand broadcasts
  int64_t repeat = 1;       // number of leading-group repeats
  int64_t small_n = 1;      // numel of the broadcast operand
};

template <typename T>
BroadcastPlan broadcast_plan(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  BroadcastPlan p;
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa == sb) {
    p.repeat = 1;
    p.small_n = a.numel();
    p.a_is_small = false;
    return p;
  }
  auto suffix_of = [](const Shape& small, const Shape& big) {
    if (small.size() > big.size()) return false;
    return std::equal(small.rbegin(), small.rend(), big.rbegin());
  };
  if (b.numel() == 1 || suffix_of(sb, sa)) {
    p.a_is_small = false;
    p.small_n = b.numel();
    p.repeat = a.numel() / p.small_n;
    if (p.repeat * p.small_n != a.numel())
      throw ShapeError(std::string(op) + ": cannot broadcast " + shape_str(sb) + " to " + shape_str(sa));
    return p;
  }
  if (a.numel() == 1 || suffix_of(sa, sb)) {
    p.a_is_small = true;
    p.small_n = a.numel();
    p.repeat = b.numel() / p.small_n;
    if (p.repeat * p.small_n != b.numel())
      throw ShapeError(std::string(op) + ": cannot broadcast " + shape_str(sa) + " to " + shape_str(sb));
    return p;
  }
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(sa) + " and " + shape_str(sb));
}

// Shared skeleton for add/sub/mul. Computes out = f(big, small) with the
// small operand tiled over leading groups.
template <typename T, typename FwdFn, typename BwdFn>
Tensor<T> binary_op(const char* name, const Tensor<T>& a, const Tensor<T>& b, FwdFn fwd, BwdFn bwd) {
  BroadcastPlan p = broadcast_plan(a, b, name);
  const Tensor<T>& big = p.a_is_small ? b : a;
  const Tensor<T>& small = p.a_is_small ? a : b;
  Tensor<T> out = Tensor<T>::zeros(big.shape());
  const T* bv = big.data();
  const T* sv = small.data();
  T* ov = out.data();
  for (int64_t r = 0; r < p.repeat; ++r) {
    const int64_t base = r * p.small_n;
    for (int64_t i = 0; i < p.small_n; ++i) {
      ov[base + i] = fwd(bv[base + i], sv[i], p.a_is_small);
    }
  }
  if (want_record<T>({&a, &b})) {
    auto ai = a.impl();
    auto bi = b.impl();
    auto oi = out.impl();
    mark_and_record(out, [ai, bi, oi, p, bwd] {
      auto big_i = p.a_is_small ? bi : ai;
      auto small_i = p.a_is_small ? ai : bi;
      if (big_i->requires_grad) big_i->ensure_grad();
      if (small_i->requires_grad) small_i->ensure_grad();
      const T* g = oi->grad.data();
      for (int64_t r = 0; r < p.repeat; ++r) {
        const int64_t base = r * p.small_n;
        for (int64_t i = 0; i < p.small_n; ++i) {
          T gbig, gsmall;
          bwd(g[base + i], big_i->values[base + i], small_i->values[i], p.a_is_small, gbig, gsmall);
          if (big_i->requires_grad) big_i->grad[base + i] += gbig;
          if (small_i->requires_grad) small_i->grad[i] += gsmall;
        }
      }
    });
  }
  return out;
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw ShapeError("matmul expects rank-2 operands, got " + shape_str(a.shape()) + " and " +
                     shape_str(b.shape()));
  const int64_t m = a.dim(0), k = a.dim(1), k2 = b.dim(0), p = b.dim(1);
  if (k != k2)
    throw ShapeError("matmul inner extents disagree: " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  Tensor<T> out = Tensor<T>::zeros({m, p});
  {
    const T* av = a.data();
    const T* bv = b.data();
    T* ov = out.data();
    // Inner products accumulate in double, sequentially over k. Streaming
    // attention reproduces this exact summation order, which keeps tiled and
    // one-shot decoding bitwise identical.
    std::vector<double> row(p);
    for (int64_t i = 0; i < m; ++i) {
      std::fill(row.begin(), row.end(), 0.0);
      const T* arow = av + i * k;
      for (int64_t kk = 0; kk < k; ++kk) {
        const double aik = double(arow[kk]);
        const T* brow = bv + kk * p;
        for (int64_t j = 0; j < p; ++j) row[j] += aik * double(brow[j]);
      }
      T* orow = ov + i * p;
      for (int64_t j = 0; j < p; ++j) orow[j] = T(row[j]);
    }
  }
  if (want_record<T>({&a, &b})) {
    auto ai = a.impl();
    auto bi = b.impl();
    auto oi = out.impl();
    mark_and_record(out, [ai, bi, oi, m, k, p] {
      const T* g = oi->grad.data();
      if (ai->requires_grad) {
        ai->ensure_grad();
        // grad_a = g . b^T
        const T* bv = bi->values.data();
        for (int64_t i = 0; i < m; ++i) {
          const T* grow = g + i * p;
          T* garow = ai->grad.data() + i * k;
          for (int64_t kk = 0; kk < k; ++kk) {
            const T* brow = bv + kk * p;
            T acc = 0;
            for (int64_t j = 0; j < p; ++j) acc += grow[j] * brow[j];
            garow[kk] += acc;
          }
        }
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        // grad_b = a^T . g
        const T* av = ai->values.data();
        for (int64_t i = 0; i < m; ++i) {
          const T* arow = av + i * k;
          const T* grow = g + i * p;
          for (int64_t kk = 0; kk < k; ++kk) {
            const T aik = arow[kk];
            T* gbrow = bi->grad.data() + kk * p;
            for (int64_t j = 0; j < p; ++j) gbrow[j] += aik * grow[j];
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> transpose2d(const Tensor<T>& a) {
  if (a.rank() != 2) throw ShapeError("transpose2d expects rank-2, got " + shape_str(a.shape()));
  const int64_t m = a.dim(0), n = a.dim(1);
  Tensor<T> out = Tensor<T>::zeros({n, m});
  const T* av = a.data();
  T* ov = out.data();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) ov[j * m + i] = av[i * n + j];
  if (want_record<T>({&a})) {
    auto ai = a.impl();
    auto oi = out.impl();
    mark_and_record(out, [ai, oi, m, n] {
      ai->ensure_grad();
      const T* g = oi->grad.data();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) ai->grad[i * n + j] += g[j * m + i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_op<T>(
      "add", a, b, [](T big, T small, bool a_small) { return a_small ? small + big : big + small; },
      [](T g, T, T, bool, T& gbig, T& gsmall) {
        gbig = g;
        gsmall = g;
      });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_op<T>(
      "sub", a, b, [](T big, T small, bool a_small) { return a_small ? small - big : big - small; },
      [](T g, T, T, bool a_small, T& gbig, T& gsmall) {
        gbig = a_small ? -g : g;
        gsmall = a_small ? g : -g;
      });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_op<T>(
      "mul", a, b, [](T big, T small, bool) { return big * small; },
      [](T g, T big, T small, bool, T& gbig, T& gsmall) {
        gbig = g * small;
        gsmall = g * big;
      });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T c) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  const T* xv = x.data();
  T* ov = out.data();
  const int64_t n = x.numel();
  for (int64_t i = 0; i < n; ++i) ov[i] = xv[i] * c;
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, oi, c, n] {
      xi->ensure_grad();
      for (int64_t i = 0; i < n; ++i) xi->grad[i] += oi->grad[i] * c;
    });
  }
  return out;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  const T* xv = x.data();
  T* ov = out.data();
  const int64_t n = x.numel();
  for (int64_t i = 0; i < n; ++i) ov[i] = xv[i] > T(0) ? xv[i] : T(0);
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, oi, n] {
      xi->ensure_grad();
      for (int64_t i = 0; i < n; ++i)
        if (xi->values[i] > T(0)) xi->grad[i] += oi->grad[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> abs_val(const Tensor<T>& x) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  const T* xv = x.data();
  T* ov = out.data();
  const int64_t n = x.numel();
  for (int64_t i = 0; i < n; ++i) ov[i] = std::abs(xv[i]);
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, oi, n] {
      xi->ensure_grad();
      for (int64_t i = 0; i < n; ++i) {
        const T v = xi->values[i];
        if (v > T(0))
          xi->grad[i] += oi->grad[i];
        else if (v < T(0))
          xi->grad[i] -= oi->grad[i];
        // subgradient 0 at v == 0
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> mean_all(const Tensor<T>& x) {
  const int64_t n = x.numel();
  const T* xv = x.data();
  T acc = 0;
  for (int64_t i = 0; i < n; ++i) acc += xv[i];
  Tensor<T> out = Tensor<T>::scalar(acc / static_cast<T>(n));
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, oi, n] {
      xi->ensure_grad();
      const T g = oi->grad[0] / static_cast<T>(n);
      for (int64_t i = 0; i < n; ++i) xi->grad[i] += g;
    });
  }
  return out;
}

template <typename T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols on empty list");
  const int64_t rows = parts[0].rank() == 2 ? parts[0].dim(0) : -1;
  if (rows < 0) throw ShapeError("concat_cols expects rank-2 parts");
  int64_t total = 0;
  for (const auto& p : parts) {
    if (p.rank() != 2 || p.dim(0) != rows)
      throw ShapeError("concat_cols row mismatch: " + shape_str(parts[0].shape()) + " vs " +
                       shape_str(p.shape()));
    total += p.dim(1);
  }
  Tensor<T> out = Tensor<T>::zeros({rows, total});
  T* ov = out.data();
  int64_t off = 0;
  for (const auto& p : parts) {
    const int64_t c = p.dim(1);
    const T* pv = p.data();
    for (int64_t r = 0; r < rows; ++r)
      std::memcpy(ov + r * total + off, pv + r * c, sizeof(T) * c);
    off += c;
  }
  bool rec = Tape<T>::recording();
  if (rec) {
    rec = false;
    for (const auto& p : parts)
      if (p.requires_grad()) rec = true;
  }
  if (rec) {
    std::vector<std::shared_ptr<TensorImpl<T>>> impls;
    impls.reserve(parts.size());
    for (const auto& p : parts) impls.push_back(p.impl());
    auto oi = out.impl();
    mark_and_record(out, [impls, oi, rows, total] {
      const T* g = oi->grad.data();
      int64_t off = 0;
      for (const auto& pi : impls) {
        const int64_t c = pi->shape[1];
        if (pi->requires_grad) {
          pi->ensure_grad();
          for (int64_t r = 0; r < rows; ++r)
            for (int64_t j = 0; j < c; ++j) pi->grad[r * c + j] += g[r * total + off + j];
        }
        off += c;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape s) {
  check_positive_shape(s);
  if (numel_of(s) != x.numel())
    throw ShapeError("reshape " + shape_str(x.shape()) + " -> " + shape_str(s) +
                     " changes element count");
  Tensor<T> out = Tensor<T>::from(std::move(s), x.values());
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    const int64_t n = x.numel();
    mark_and_record(out, [xi, oi, n] {
      xi->ensure_grad();
      for (int64_t i = 0; i < n; ++i) xi->grad[i] += oi->grad[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& x, const std::vector<int64_t>& idx) {
  if (x.rank() != 2) throw ShapeError("gather_rows expects rank-2, got " + shape_str(x.shape()));
  const int64_t rows = x.dim(0), cols = x.dim(1);
  for (int64_t i : idx) {
    if (i < 0 || i >= rows)
      throw ShapeError("gather_rows index " + std::to_string(i) + " out of range [0," +
                       std::to_string(rows) + ")");
  }
  const int64_t t = static_cast<int64_t>(idx.size());
  Tensor<T> out = Tensor<T>::zeros({t, cols});
  const T* xv = x.data();
  T* ov = out.data();
  for (int64_t r = 0; r < t; ++r)
    std::memcpy(ov + r * cols, xv + idx[r] * cols, sizeof(T) * cols);
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, oi, idx, t, cols] {
      xi->ensure_grad();
      const T* g = oi->grad.data();
      for (int64_t r = 0; r < t; ++r) {
        T* dst = xi->grad.data() + idx[r] * cols;
        const T* src = g + r * cols;
        for (int64_t j = 0; j < cols; ++j) dst[j] += src[j];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, int64_t c0, int64_t c1) {
  if (x.rank() != 2) throw ShapeError("slice_cols expects rank-2, got " + shape_str(x.shape()));
  const int64_t rows = x.dim(0), cols = x.dim(1);
  if (c0 < 0 || c1 > cols || c0 >= c1)
    throw ShapeError("slice_cols range [" + std::to_string(c0) + "," + std::to_string(c1) +
                     ") invalid for " + shape_str(x.shape()));
  const int64_t w = c1 - c0;
  Tensor<T> out = Tensor<T>::zeros({rows, w});
  const T* xv = x.data();
  T* ov = out.data();
  for (int64_t r = 0; r < rows; ++r)
    std::memcpy(ov + r * w, xv + r * cols + c0, sizeof(T) * w);
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, oi, rows, cols, c0, w] {
      xi->ensure_grad();
      const T* g = oi->grad.data();
      for (int64_t r = 0; r < rows; ++r) {
        T* dst = xi->grad.data() + r * cols + c0;
        const T* src = g + r * w;
        for (int64_t j = 0; j < w; ++j) dst[j] += src[j];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, T eps) {
  if (x.rank() != 2) throw ShapeError("layer_norm expects rank-2, got " + shape_str(x.shape()));
  if (!(eps >= T(0))) throw ShapeError("layer_norm eps must be >= 0");
  const int64_t rows = x.dim(0), d = x.dim(1);
  Tensor<T> out = Tensor<T>::zeros({rows, d});
  std::vector<T> inv_std(rows);
  const T* xv = x.data();
  T* ov = out.data();
  for (int64_t r = 0; r < rows; ++r) {
    const T* row = xv + r * d;
    T mean = 0;
    for (int64_t j = 0; j < d; ++j) mean += row[j];
    mean /= static_cast<T>(d);
    T var = 0;
    for (int64_t j = 0; j < d; ++j) {
      const T c = row[j] - mean;
      var += c * c;
    }
    var /= static_cast<T>(d);
    const T is = T(1) / std::sqrt(var + eps);
    inv_std[r] = is;
    T* orow = ov + r * d;
    for (int64_t j = 0; j < d; ++j) orow[j] = (row[j] - mean) * is;
  }
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, oi, inv_std, rows, d] {
      xi->ensure_grad();
      const T* g = oi->grad.data();
      const T* y = oi->values.data();
      for (int64_t r = 0; r < rows; ++r) {
        const T* grow = g + r * d;
        const T* yrow = y + r * d;
        T gmean = 0, gymean = 0;
        for (int64_t j = 0; j < d; ++j) {
          gmean += grow[j];
          gymean += grow[j] * yrow[j];
        }
        gmean /= static_cast<T>(d);
        gymean /= static_cast<T>(d);
        const T is = inv_std[r];
        T* gx = xi->grad.data() + r * d;
        for (int64_t j = 0; j < d; ++j) gx[j] += is * (grow[j] - gmean - yrow[j] * gymean);
      }
    });
  }
  return out;
}

namespace {

// Shared loop for conv forward and its input/weight gradients. dy/dx span
// the 3x3 window; out-of-range taps are the zero padding.
template <typename T, typename Fn>
inline void for_each_tap(int64_t h, int64_t w, Fn fn) {
  for (int64_t y = 0; y < h; ++y) {
    for (int64_t x = 0; x < w; ++x) {
      for (int64_t dy = -1; dy <= 1; ++dy) {
        const int64_t sy = y + dy;
        if (sy < 0 || sy >= h) continue;
        for (int64_t dx = -1; dx <= 1; ++dx) {
          const int64_t sx = x + dx;
          if (sx < 0 || sx >= w) continue;
          fn(y, x, sy, sx, dy + 1, dx + 1);
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> conv2d_3x3(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias) {
  if (x.rank() != 3) throw ShapeError("conv2d_3x3 input must be [H,W,Cin], got " + shape_str(x.shape()));
  if (kernel.rank() != 4 || kernel.dim(0) != 3 || kernel.dim(1) != 3)
    throw ShapeError("conv2d_3x3 kernel must be [3,3,Cin,Cout], got " + shape_str(kernel.shape()));
  const int64_t h = x.dim(0), w = x.dim(1), cin = x.dim(2);
  const int64_t cout = kernel.dim(3);
  if (kernel.dim(2) != cin)
    throw ShapeError("conv2d_3x3 channel mismatch: input " + shape_str(x.shape()) + " vs kernel " +
                     shape_str(kernel.shape()));
  if (bias.rank() != 1 || bias.dim(0) != cout)
    throw ShapeError("conv2d_3x3 bias must be [Cout], got " + shape_str(bias.shape()));

  Tensor<T> out = Tensor<T>::zeros({h, w, cout});
  {
    const T* xv = x.data();
    const T* kv = kernel.data();
    const T* bv = bias.data();
    T* ov = out.data();
    for (int64_t i = 0; i < h * w; ++i) {
      T* orow = ov + i * cout;
      for (int64_t co = 0; co < cout; ++co) orow[co] = bv[co];
    }
    for_each_tap<T>(h, w, [&](int64_t y, int64_t xp, int64_t sy, int64_t sx, int64_t ky, int64_t kx) {
      const T* src = xv + (sy * w + sx) * cin;
      T* dst = ov + (y * w + xp) * cout;
      const T* kbase = kv + (ky * 3 + kx) * cin * cout;
      for (int64_t ci = 0; ci < cin; ++ci) {
        const T s = src[ci];
        const T* krow = kbase + ci * cout;
        for (int64_t co = 0; co < cout; ++co) dst[co] += s * krow[co];
      }
    });
  }
  if (want_record<T>({&x, &kernel, &bias})) {
    auto xi = x.impl();
    auto ki = kernel.impl();
    auto bi = bias.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, ki, bi, oi, h, w, cin, cout] {
      const T* g = oi->grad.data();
      if (bi->requires_grad) {
        bi->ensure_grad();
        for (int64_t i = 0; i < h * w; ++i) {
          const T* grow = g + i * cout;
          for (int64_t co = 0; co < cout; ++co) bi->grad[co] += grow[co];
        }
      }
      const bool need_x = xi->requires_grad;
      const bool need_k = ki->requires_grad;
      if (need_x) xi->ensure_grad();
      if (need_k) ki->ensure_grad();
      if (need_x || need_k) {
        const T* xv = xi->values.data();
        const T* kv = ki->values.data();
        for_each_tap<T>(h, w, [&](int64_t y, int64_t xp, int64_t sy, int64_t sx, int64_t ky, int64_t kx) {
          const T* grow = g + (y * w + xp) * cout;
          const int64_t src_off = (sy * w + sx) * cin;
          const int64_t k_off = (ky * 3 + kx) * cin * cout;
          for (int64_t ci = 0; ci < cin; ++ci) {
            const T* krow = kv + k_off + ci * cout;
            if (need_x) {
              T acc = 0;
              for (int64_t co = 0; co < cout; ++co) acc += grow[co] * krow[co];
              xi->grad[src_off + ci] += acc;
            }
            if (need_k) {
              const T s = xv[src_off + ci];
              T* kg = ki->grad.data() + k_off + ci * cout;
              for (int64_t co = 0; co < cout; ++co) kg[co] += s * grow[co];
            }
          }
        });
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> unfold3x3(const Tensor<T>& x) {
  if (x.rank() != 3) throw ShapeError("unfold3x3 input must be [H,W,C], got " + shape_str(x.shape()));
  const int64_t h = x.dim(0), w = x.dim(1), c = x.dim(2);
  Tensor<T> out = Tensor<T>::zeros({h, w, 9 * c});
  auto clampi = [](int64_t v, int64_t n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); };
  const T* xv = x.data();
  T* ov = out.data();
  for (int64_t y = 0; y < h; ++y) {
    for (int64_t xp = 0; xp < w; ++xp) {
      T* dst = ov + (y * w + xp) * 9 * c;
      int64_t slot = 0;
      for (int64_t dy = -1; dy <= 1; ++dy) {
        for (int64_t dx = -1; dx <= 1; ++dx, ++slot) {
          const int64_t sy = clampi(y + dy, h);
          const int64_t sx = clampi(xp + dx, w);
          std::memcpy(dst + slot * c, xv + (sy * w + sx) * c, sizeof(T) * c);
        }
      }
    }
  }
  if (want_record<T>({&x})) {
    auto xi = x.impl();
    auto oi = out.impl();
    mark_and_record(out, [xi, oi, h, w, c, clampi] {
      xi->ensure_grad();
      const T* g = oi->grad.data();
      for (int64_t y = 0; y < h; ++y) {
        for (int64_t xp = 0; xp < w; ++xp) {
          const T* grow = g + (y * w + xp) * 9 * c;
          int64_t slot = 0;
          for (int64_t dy = -1; dy <= 1; ++dy) {
            for (int64_t dx = -1; dx <= 1; ++dx, ++slot) {
              const int64_t sy = clampi(y + dy, h);
              const int64_t sx = clampi(xp + dx, w);
              T* dst = xi->grad.data() + (sy * w + sx) * c;
              const T* src = grow + slot * c;
              for (int64_t ci = 0; ci < c; ++ci) dst[ci] += src[ci];
            }
          }
        }
      }
    });
  }
  return out;
}

#define HIIF_INSTANTIATE_OPS(T)                                                            \
  template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> transpose2d<T>(const Tensor<T>&);                                     \
  template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> sub<T>(const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> scale<T>(const Tensor<T>&, T);                                        \
  template Tensor<T> relu<T>(const Tensor<T>&);                                            \
  template Tensor<T> abs_val<T>(const Tensor<T>&);                                         \
  template Tensor<T> mean_all<T>(const Tensor<T>&);                                        \
  template Tensor<T> concat_cols<T>(const std::vector<Tensor<T>>&);                        \
  template Tensor<T> reshape<T>(const Tensor<T>&, Shape);                                  \
  template Tensor<T> gather_rows<T>(const Tensor<T>&, const std::vector<int64_t>&);        \
  template Tensor<T> slice_cols<T>(const Tensor<T>&, int64_t, int64_t);                    \
  template Tensor<T> layer_norm<T>(const Tensor<T>&, T);                                   \
  template Tensor<T> conv2d_3x3<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&); \
  template Tensor<T> unfold3x3<T>(const Tensor<T>&);

HIIF_INSTANTIATE_OPS(float)
HIIF_INSTANTIATE_OPS(double)

#undef HIIF_INSTANTIATE_OPS

}  // namespace hiif

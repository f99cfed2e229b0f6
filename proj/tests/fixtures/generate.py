# Copyright 2026 The hiif Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the frozen resampling / PSNR / PNG fixtures.

The resampling oracle below is an independent numpy implementation of the
documented convention (Keys bicubic a=-0.5, pixel-center source mapping
u=(i+0.5)/scale-0.5, antialias kernel widening on downscale, per-row weight
normalization, clamped border indices). Pillow is used only as a sanity
cross-check on interior pixels, where its different border policy does not
matter, and to produce PNG files our decoder must read.

Run from the repository root:  python3 tests/fixtures/generate.py
"""

import os

import numpy as np
from PIL import Image

HERE = os.path.dirname(os.path.abspath(__file__))


def save_array(name, arr):
    arr = np.asarray(arr, dtype=np.float64)
    with open(os.path.join(HERE, name), "w") as f:
        f.write(" ".join([str(arr.ndim)] + [str(d) for d in arr.shape]) + "\n")
        for v in arr.reshape(-1):
            f.write("%.17g\n" % v)


def cubic(x, a=-0.5):
    x = abs(x)
    if x < 1.0:
        return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    if x < 2.0:
        return (((x - 5.0) * x + 8.0) * x - 4.0) * a
    return 0.0


def linear(x):
    x = abs(x)
    return 1.0 - x if x < 1.0 else 0.0


def resize_axis(img, n_out, kernel, axis, antialias=True):
    """Resamples one axis: for output center u, every integer tap inside the
    (possibly antialias-widened) kernel support contributes fn(kscale*(u-k)),
    weights normalized, indices clamped at the border."""
    radius = 2.0 if kernel == "bicubic" else 1.0
    fn = cubic if kernel == "bicubic" else linear
    n_in = img.shape[axis]
    scale = n_out / n_in
    kscale = scale if (antialias and scale < 1.0) else 1.0
    r = radius / kscale
    moved = np.moveaxis(img, axis, 0)
    out = np.zeros((n_out,) + moved.shape[1:])
    for i in range(n_out):
        u = (i + 0.5) / scale - 0.5
        ks = np.arange(int(np.ceil(u - r)), int(np.floor(u + r)) + 1)
        wts = np.array([fn(kscale * (u - k)) for k in ks])
        wts /= wts.sum()
        idx = np.clip(ks, 0, n_in - 1)
        out[i] = np.tensordot(wts, moved[idx], axes=(0, 0))
    return np.moveaxis(out, 0, axis)


def resize(img, out_h, out_w, kernel, antialias=True):
    return resize_axis(resize_axis(img, out_h, kernel, 0, antialias),
                       out_w, kernel, 1, antialias)


def psnr(a, b, shave=0):
    if shave:
        a, b = a[shave:-shave, shave:-shave], b[shave:-shave, shave:-shave]
    mse = np.mean((a - b) ** 2)
    return float("inf") if mse == 0 else -10.0 * np.log10(mse)


def to_y(img):
    r, g, b = img[..., 0], img[..., 1], img[..., 2]
    return ((65.481 * r + 128.553 * g + 24.966 * b + 16.0) / 255.0)[..., None]


def main():
    rng = np.random.RandomState(20260823)
    src = rng.rand(16, 12, 3)
    save_array("resample_src.txt", src)

    cases = [
        ("bicubic_up_32x24.txt", 32, 24, "bicubic"),
        ("bicubic_down_8x6.txt", 8, 6, "bicubic"),
        ("bicubic_odd_23x17.txt", 23, 17, "bicubic"),
        ("bilinear_up_32x24.txt", 32, 24, "bilinear"),
        ("bilinear_down_8x6.txt", 8, 6, "bilinear"),
    ]
    for name, oh, ow, kern in cases:
        out = resize(src, oh, ow, kern)
        save_array(name, out)

    # Sanity: Pillow agrees on interior pixels (border handling differs:
    # Pillow renormalizes the window, we clamp indices).
    for name, oh, ow, kern in cases:
        ref = np.stack(
            [np.asarray(Image.fromarray(src[..., ch].astype(np.float32), mode="F")
                        .resize((ow, oh), Image.BICUBIC if kern == "bicubic"
                                else Image.BILINEAR))
             for ch in range(3)], axis=-1)
        ours = resize(src, oh, ow, kern)
        m = 3 if oh >= 16 else 2
        interior = abs(ours - ref)[m:-m, m:-m].max() if oh > 2 * m and ow > 2 * m else 0.0
        print(f"{name}: PIL interior max diff {interior:.3g}")

    # PSNR fixtures against an independently perturbed copy.
    noisy = np.clip(src + rng.randn(16, 12, 3) * 0.03, 0.0, 1.0)
    save_array("psnr_noisy.txt", noisy)
    vals = [
        psnr(src, noisy, shave=0),
        psnr(src, noisy, shave=2),
        psnr(to_y(src), to_y(noisy), shave=0),
        psnr(to_y(src), to_y(noisy), shave=3),
    ]
    save_array("psnr_values.txt", np.array(vals))
    print("psnr fixtures:", ["%.6f" % v for v in vals])

    # PNGs written by Pillow: exercises foreign encoders' filter choices.
    rgb8 = (rng.rand(9, 7, 3) * 255).round().astype(np.uint8)
    Image.fromarray(rgb8, mode="RGB").save(os.path.join(HERE, "pil_rgb8.png"))
    save_array("pil_rgb8.txt", rgb8 / 255.0)

    gray16 = (rng.rand(6, 11) * 65535).round().astype(np.uint16)
    Image.fromarray(gray16, mode="I;16").save(os.path.join(HERE, "pil_gray16.png"))
    save_array("pil_gray16.txt", (gray16 / 65535.0)[..., None])

    # A photographic-ish gradient card Pillow encodes with varied filters.
    yy, xx = np.mgrid[0:24, 0:18]
    card = np.stack([(yy * 7 + xx * 3) % 256, (yy * 2 + 40) % 256,
                     (xx * 11 + yy) % 256], axis=-1).astype(np.uint8)
    Image.fromarray(card, mode="RGB").save(os.path.join(HERE, "pil_card.png"))
    save_array("pil_card.txt", card / 255.0)
    print("wrote PNG fixtures")


if __name__ == "__main__":
    main()

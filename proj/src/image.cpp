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

#include "hiif/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace hiif {

namespace {

uint32_t read_be32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void write_be32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

const uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

void unfilter_rows(std::vector<uint8_t>& raw, int64_t h, int64_t stride, int bpp,
                   const std::string& path) {
  // raw holds h rows of (1 filter byte + stride data bytes); defilters in place.
  std::vector<uint8_t> prev(stride, 0);
  for (int64_t y = 0; y < h; ++y) {
    uint8_t* row = raw.data() + y * (stride + 1);
    const int filter = row[0];
    uint8_t* d = row + 1;
    switch (filter) {
      case 0:
        break;
      case 1:
        for (int64_t i = bpp; i < stride; ++i) d[i] = uint8_t(d[i] + d[i - bpp]);
        break;
      case 2:
        for (int64_t i = 0; i < stride; ++i) d[i] = uint8_t(d[i] + prev[i]);
        break;
      case 3:
        for (int64_t i = 0; i < stride; ++i) {
          const int left = i >= bpp ? d[i - bpp] : 0;
          d[i] = uint8_t(d[i] + (left + prev[i]) / 2);
        }
        break;
      case 4:
        for (int64_t i = 0; i < stride; ++i) {
          const int left = i >= bpp ? d[i - bpp] : 0;
          const int ul = i >= bpp ? prev[i - bpp] : 0;
          d[i] = uint8_t(d[i] + paeth(left, prev[i], ul));
        }
        break;
      default:
        throw FormatError("unknown PNG filter type " + std::to_string(filter) + " in " + path);
    }
    std::memcpy(prev.data(), d, stride);
  }
}

}  // namespace

Image load_png(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngSig, 8) != 0)
    throw FormatError("not a PNG file: " + path);

  int64_t w = 0, h = 0;
  int depth = 0, color = -1;
  std::vector<uint8_t> idat;
  size_t pos = 8;
  bool saw_iend = false;
  while (pos + 8 <= bytes.size()) {
    const uint32_t len = read_be32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) throw FormatError("truncated PNG chunk in " + path);
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const uint8_t* data = &bytes[pos + 8];
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw FormatError("bad IHDR in " + path);
      w = read_be32(data);
      h = read_be32(data + 4);
      depth = data[8];
      color = data[9];
      if (data[10] != 0 || data[11] != 0) throw FormatError("bad compression/filter method in " + path);
      if (data[12] != 0) throw FormatError("interlaced PNG unsupported: " + path);
      if (depth != 8 && depth != 16)
        throw FormatError("unsupported PNG bit depth " + std::to_string(depth) + ": " + path);
      if (color != 0 && color != 2)
        throw FormatError("unsupported PNG color type " + std::to_string(color) +
                          " (need grayscale or RGB): " + path);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
      break;
    }
    pos += 12 + len;
  }
  if (w <= 0 || h <= 0 || color < 0) throw FormatError("missing IHDR in " + path);
  if (!saw_iend || idat.empty()) throw FormatError("missing image data in " + path);

  const int64_t channels = color == 2 ? 3 : 1;
  const int bytes_per_sample = depth / 8;
  const int64_t stride = w * channels * bytes_per_sample;
  std::vector<uint8_t> raw(size_t(h) * (stride + 1));
  uLongf raw_len = raw.size();
  if (uncompress(raw.data(), &raw_len, idat.data(), idat.size()) != Z_OK ||
      raw_len != raw.size())
    throw FormatError("PNG inflate failed: " + path);
  unfilter_rows(raw, h, stride, channels * bytes_per_sample, path);

  Image img(h, w, channels);
  const double maxv = depth == 8 ? 255.0 : 65535.0;
  for (int64_t y = 0; y < h; ++y) {
    const uint8_t* row = raw.data() + y * (stride + 1) + 1;
    for (int64_t i = 0; i < w * channels; ++i) {
      uint32_t v;
      if (depth == 8) {
        v = row[i];
      } else {
        v = (uint32_t(row[2 * i]) << 8) | row[2 * i + 1];  // 16-bit samples are big-endian
      }
      img.pix[y * w * channels + i] = v / maxv;
    }
  }
  return img;
}

void save_png(const Image& img, const std::string& path) {
  const int64_t channels = img.c;
  const int64_t stride = img.w * channels;
  std::vector<uint8_t> raw(size_t(img.h) * (stride + 1));
  for (int64_t y = 0; y < img.h; ++y) {
    uint8_t* row = raw.data() + y * (stride + 1);
    row[0] = 0;  // filter: none
    for (int64_t i = 0; i < stride; ++i) {
      const double v = std::clamp(img.pix[y * stride + i], 0.0, 1.0);
      row[1 + i] = uint8_t(std::floor(v * 255.0 + 0.5));  // round half away from zero
    }
  }

  uLongf bound = compressBound(raw.size());
  std::vector<uint8_t> deflated(bound);
  if (compress2(deflated.data(), &bound, raw.data(), raw.size(), Z_DEFAULT_COMPRESSION) != Z_OK)
    throw IoError("PNG deflate failed for " + path);
  deflated.resize(bound);

  std::vector<uint8_t> out(kPngSig, kPngSig + 8);
  auto put_chunk = [&out](const char* type, const std::vector<uint8_t>& data) {
    write_be32(out, uint32_t(data.size()));
    const size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uint32_t crc =
        crc32(0, out.data() + crc_start, uInt(out.size() - crc_start));
    write_be32(out, crc);
  };

  std::vector<uint8_t> ihdr;
  write_be32(ihdr, uint32_t(img.w));
  write_be32(ihdr, uint32_t(img.h));
  ihdr.push_back(8);                            // bit depth
  ihdr.push_back(channels == 3 ? 2 : 0);        // color type
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  put_chunk("IHDR", ihdr);
  put_chunk("IDAT", deflated);
  put_chunk("IEND", {});

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(reinterpret_cast<const char*>(out.data()), out.size());
  if (!f) throw IoError("short write to " + path);
}

Image crop(const Image& img, int64_t y0, int64_t x0, int64_t h, int64_t w) {
  if (y0 < 0 || x0 < 0 || y0 + h > img.h || x0 + w > img.w)
    throw ShapeError("crop out of range");
  Image out(h, w, img.c);
  for (int64_t y = 0; y < h; ++y)
    std::memcpy(&out.pix[y * w * img.c], &img.pix[((y0 + y) * img.w + x0) * img.c],
                sizeof(double) * w * img.c);
  return out;
}

Image center_crop(const Image& img, int64_t h, int64_t w) {
  return crop(img, (img.h - h) / 2, (img.w - w) / 2, h, w);
}

Image hflip(const Image& img) {
  Image out(img.h, img.w, img.c);
  for (int64_t y = 0; y < img.h; ++y)
    for (int64_t x = 0; x < img.w; ++x)
      for (int64_t ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = img.at(y, img.w - 1 - x, ch);
  return out;
}

Image to_rgb(const Image& img) {
  if (img.c == 3) return img;
  Image out(img.h, img.w, 3);
  for (int64_t i = 0; i < img.h * img.w; ++i)
    for (int64_t ch = 0; ch < 3; ++ch) out.pix[i * 3 + ch] = img.pix[i];
  return out;
}

}  // namespace hiif

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

#include "hiif/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hiif {

namespace {

constexpr char kMagic[4] = {'H', 'I', 'I', 'F'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }

void put_f64(std::string& out, double v) {
  const uint64_t u = std::bit_cast<uint64_t>(v);
  put_u32(out, uint32_t(u & 0xffffffffu));
  put_u32(out, uint32_t(u >> 32));
}

struct Reader {
  const std::string& buf;
  const std::string& path;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > buf.size()) throw FormatError("truncated checkpoint: " + path);
  }
  uint32_t u32() {
    need(4);
    const auto* p = reinterpret_cast<const uint8_t*>(buf.data() + pos);
    pos += 4;
    return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) | (uint32_t(p[3]) << 24);
  }
  uint8_t u8() {
    need(1);
    return uint8_t(buf[pos++]);
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() {
    const uint64_t lo = u32();
    const uint64_t hi = u32();
    return std::bit_cast<double>(lo | (hi << 32));
  }
};

template <typename T>
void save_impl(const std::string& path, const std::string& metadata, const ParamStore<T>& params) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, uint32_t(metadata.size()));
  out += metadata;
  put_u32(out, uint32_t(params.all().size()));
  for (const auto& [name, t] : params.all()) {
    put_u32(out, uint32_t(name.size()));
    out += name;
    out.push_back(std::is_same_v<T, float> ? char(0) : char(1));
    out.push_back(char(t.rank()));
    for (int i = 0; i < t.rank(); ++i) put_u32(out, uint32_t(t.dim(i)));
    for (int64_t i = 0; i < t.numel(); ++i) {
      if constexpr (std::is_same_v<T, float>) {
        put_f32(out, t.data()[i]);
      } else {
        put_f64(out, t.data()[i]);
      }
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write checkpoint " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw IoError("short write to checkpoint " + path);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return buf;
}

// Reads header + metadata; leaves the reader at the record count.
std::string read_header(Reader& r) {
  const std::string magic = r.bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0)
    throw FormatError("not a checkpoint file: " + r.path);
  const uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version) + ": " + r.path);
  const uint32_t meta_len = r.u32();
  return r.bytes(meta_len);
}

template <typename T>
void load_records(Reader& r, std::map<std::string, Tensor<T>>& out) {
  const uint32_t count = r.u32();
  const uint8_t want_dtype = std::is_same_v<T, float> ? 0 : 1;
  for (uint32_t rec = 0; rec < count; ++rec) {
    const uint32_t name_len = r.u32();
    const std::string name = r.bytes(name_len);
    const uint8_t dtype = r.u8();
    if (dtype != want_dtype)
      throw FormatError("checkpoint tensor " + name + " has dtype " + std::to_string(dtype) +
                        ", expected " + std::to_string(want_dtype) + ": " + r.path);
    const uint8_t rank = r.u8();
    Shape shape(rank);
    for (uint8_t i = 0; i < rank; ++i) shape[i] = int64_t(r.u32());
    const int64_t n = numel_of(shape);
    std::vector<T> values(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      if constexpr (std::is_same_v<T, float>) {
        values[size_t(i)] = r.f32();
      } else {
        values[size_t(i)] = r.f64();
      }
    }
    if (!out.emplace(name, Tensor<T>::from(std::move(shape), std::move(values))).second)
      throw FormatError("duplicate tensor name in checkpoint: " + name);
  }
  if (r.pos != r.buf.size()) throw FormatError("trailing bytes in checkpoint " + r.path);
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& metadata,
                     const ParamStore<float>& params) {
  save_impl(path, metadata, params);
}

void save_checkpoint(const std::string& path, const std::string& metadata,
                     const ParamStore<double>& params) {
  save_impl(path, metadata, params);
}

std::string load_checkpoint_metadata(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, path};
  return read_header(r);
}

CheckpointF32 load_checkpoint_f32(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, path};
  CheckpointF32 ckpt;
  ckpt.metadata = read_header(r);
  load_records(r, ckpt.tensors);
  return ckpt;
}

CheckpointF64 load_checkpoint_f64(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, path};
  CheckpointF64 ckpt;
  ckpt.metadata = read_header(r);
  load_records(r, ckpt.tensors);
  return ckpt;
}

}  // namespace hiif

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

#ifndef HIIF_CHECKPOINT_HPP_
#define HIIF_CHECKPOINT_HPP_

#include <map>
#include <string>

#include "hiif/tensor.hpp"

namespace hiif {

// Checkpoint container. Binary layout, all integers little-endian:
//   "HIIF" | u32 version (1) | u32 metadata length | metadata bytes |
//   u32 record count | records
// One record per tensor, in ascending name order:
//   u32 name length | name | u8 dtype (0 = f32, 1 = f64) | u8 rank |
//   u32 dims[rank] | raw values
// Identical parameters serialize to identical bytes, so a save/load/save
// round trip is byte-identical.

struct CheckpointF32 {
  std::string metadata;
  std::map<std::string, Tensor<float>> tensors;
};

struct CheckpointF64 {
  std::string metadata;
  std::map<std::string, Tensor<double>> tensors;
};

void save_checkpoint(const std::string& path, const std::string& metadata,
                     const ParamStore<float>& params);
void save_checkpoint(const std::string& path, const std::string& metadata,
                     const ParamStore<double>& params);

/// Reads only the metadata block (for config reconstruction before the
/// model exists).
std::string load_checkpoint_metadata(const std::string& path);

CheckpointF32 load_checkpoint_f32(const std::string& path);
CheckpointF64 load_checkpoint_f64(const std::string& path);

}  // namespace hiif

#endif  // HIIF_CHECKPOINT_HPP_

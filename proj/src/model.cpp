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

#include "hiif/model.hpp"

namespace hiif {

template <typename T>
Model<T> load_model(const std::string& path) {
  std::string metadata;
  std::map<std::string, Tensor<T>> tensors;
  if constexpr (std::is_same_v<T, float>) {
    CheckpointF32 ckpt = load_checkpoint_f32(path);
    metadata = std::move(ckpt.metadata);
    tensors = std::move(ckpt.tensors);
  } else {
    CheckpointF64 ckpt = load_checkpoint_f64(path);
    metadata = std::move(ckpt.metadata);
    tensors = std::move(ckpt.tensors);
  }
  RunConfig cfg;
  apply_kv(cfg, parse_kv_text(metadata, path + "(metadata)"), path + "(metadata)");
  Model<T> model = build_model<T>(cfg, /*init_seed=*/0);
  if (model.params.all().size() != tensors.size())
    throw FormatError("checkpoint holds " + std::to_string(tensors.size()) +
                      " tensors, model has " + std::to_string(model.params.all().size()));
  for (const auto& [name, t] : tensors) {
    Tensor<T>* dst = model.params.find(name);
    if (dst == nullptr) throw FormatError("checkpoint tensor not in model: " + name);
    if (dst->shape() != t.shape())
      throw FormatError("shape mismatch for " + name + ": model " + shape_str(dst->shape()) +
                        " vs checkpoint " + shape_str(t.shape()));
    dst->values() = t.values();
  }
  return model;
}

template Model<float> load_model<float>(const std::string&);
template Model<double> load_model<double>(const std::string&);

}  // namespace hiif

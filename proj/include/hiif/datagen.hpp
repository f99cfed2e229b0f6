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

#ifndef HIIF_DATAGEN_HPP_
#define HIIF_DATAGEN_HPP_

#include <string>
#include <vector>

#include "hiif/image.hpp"

namespace hiif {

/// Deterministic synthetic test card: smooth color gradients, elliptical
/// blobs with crisp boundaries, and oriented gratings. Same seed, same
/// pixels.
Image synth_image(uint64_t seed, int64_t h, int64_t w);

/// Writes `count` synthetic PNGs (img000.png, ...) of side `size` under
/// `dir`, creating it if needed. Returns the file paths in index order.
std::vector<std::string> write_toy_dataset(const std::string& dir, int64_t count, uint64_t seed,
                                           int64_t size);

}  // namespace hiif

#endif  // HIIF_DATAGEN_HPP_

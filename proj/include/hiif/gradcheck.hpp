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

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hiif/tensor.hpp"

namespace hiif {

/// Central finite differences vs analytic gradients, double precision only.
/// The loss function re-runs the forward pass from the current values of the
/// checked tensors; it must not capture stale outputs.
struct FdCheck {
  double step = 1e-5;
  /// When >= 0, only this many coordinates per tensor are probed (drawn
  /// deterministically); -1 probes every coordinate.
  int64_t coords_per_tensor = -1;
  uint64_t seed = 0;
};

/// Returns the max relative error over all probed coordinates, where
/// rel_err = |fd - analytic| / max(|fd|, |analytic|, 0.01).
double fd_max_rel_err(const std::function<Tensor<double>()>& loss_fn,
                      std::vector<Tensor<double>> wrt, const FdCheck& opts = {});

struct GradCheckLine {
  std::string name;
  double max_rel_err = 0.0;
  int instances = 0;
};

/// Runs the finite-difference suite over every differentiable operation and
/// the end-to-end model (desk configuration), >= 10 random instances each.
/// Pass threshold is 1e-4.
std::vector<GradCheckLine> run_gradcheck_suite(uint64_t seed);

bool gradcheck_passed(const std::vector<GradCheckLine>& lines, double threshold = 1e-4);

}  // namespace hiif

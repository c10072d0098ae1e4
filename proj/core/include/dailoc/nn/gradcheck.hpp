// Copyright 2026 The dailoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dailoc/nn/adam.hpp"

namespace dailoc::nn {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-6;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, scale_floor);
  // the floor keeps near-zero gradients from amplifying roundoff in the
  // finite difference.
  double scale_floor = 1e-3;
  // 0 checks every coordinate; otherwise a seeded sample of at most this many
  // coordinates per block.
  std::size_t max_coords_per_block = 0;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;  // "<block>[<index>]"
  std::string worst_block;
  std::size_t coords_checked = 0;
  bool passed = false;
};

// Evaluates the loss at the current parameter values.
using LossFn = std::function<double()>;

// Compares `analytic` gradients against central differences of `loss`.
// `params` and `analytic` must list the same blocks in the same order. The
// parameters are perturbed in place and restored bit-exactly before return.
GradCheckReport gradient_check(const LossFn& loss, std::span<const ParamBlock> params,
                               std::span<const GradBlock> analytic,
                               const GradCheckOptions& options);

}  // namespace dailoc::nn

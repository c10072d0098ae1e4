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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dailoc::nn {

// A named view over one contiguous parameter array (a weight matrix or bias).
struct ParamBlock {
  std::string name;
  std::span<double> values;
};

struct GradBlock {
  std::string name;
  std::span<const double> values;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// Zero moments shaped like `params`.
AdamState make_adam_state(std::span<const ParamBlock> params, AdamConfig config = {});

// One bias-corrected Adam update. Throws TrainingError naming the offending
// block if any gradient is non-finite; params are untouched in that case.
void adam_step(std::span<const ParamBlock> params, std::span<const GradBlock> grads,
               AdamState& state);

}  // namespace dailoc::nn

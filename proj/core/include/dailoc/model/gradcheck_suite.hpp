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
#include <string>
#include <vector>

#include "dailoc/nn/gradcheck.hpp"

namespace dailoc::model {

struct GradCheckSuiteOptions {
  std::uint64_t seed = 0;
  std::size_t n_aps = 4;
  std::size_t n_rps = 3;
  std::size_t batch = 6;
  nn::GradCheckOptions check{.step = 1e-5,
                             .tolerance = 1e-5,
                             .scale_floor = 1e-3,
                             .max_coords_per_block = 64,
                             .seed = 0};
};

struct GradCheckCase {
  std::string name;
  nn::GradCheckReport report;
};

// Finite-difference check of every loss term, each stage objective and the
// staged total on a seeded toy model with the default layer widths. Kernel
// bandwidths are resolved once and held fixed, as in training; eps is a
// constant input.
std::vector<GradCheckCase> run_gradcheck_suite(const GradCheckSuiteOptions& options = {});

}  // namespace dailoc::model

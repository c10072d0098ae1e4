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

#include <optional>
#include <vector>

#include "dailoc/nn/matrix.hpp"

namespace dailoc::cesa {

// RBF-mixture kernel k(a, b) = sum_g exp(-|a - b|^2 / (2 g^2)).
//
// With `median_heuristic` set, the bandwidths are `multipliers` times the
// median pairwise distance of the pooled sample, recomputed on every call.
// Otherwise `bandwidths` is used as given.
struct KernelConfig {
  bool median_heuristic = true;
  std::vector<double> multipliers{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> bandwidths;

  static KernelConfig fixed(std::vector<double> bandwidths);
  // Throws DomainError if the configuration has no usable positive bandwidth.
  void validate() const;
};

// Bandwidths actually used for this pair of samples. A zero median (all points
// identical) falls back to a base bandwidth of 1.
std::vector<double> resolve_bandwidths(const KernelConfig& cfg, const nn::Matrix& a,
                                       const nn::Matrix& b);

double median_pairwise_distance(const nn::Matrix& a, const nn::Matrix& b);

// Biased (V-statistic) squared MMD between the row sets `current` and
// `prototypes`. Returns nullopt when either set is empty, meaning alignment is
// skipped. Exactly symmetric in its two arguments.
std::optional<double> mmd_loss(const nn::Matrix& current, const nn::Matrix& prototypes,
                               const KernelConfig& cfg);

struct MmdWithGrad {
  double value = 0.0;
  nn::Matrix grad_current;  // d value / d current, bandwidths held fixed
};

std::optional<MmdWithGrad> mmd_loss_with_grad(const nn::Matrix& current,
                                              const nn::Matrix& prototypes,
                                              const KernelConfig& cfg);

}  // namespace dailoc::cesa

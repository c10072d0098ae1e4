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

#include "dailoc/nn/adam.hpp"

#include <cmath>

#include "dailoc/common/errors.hpp"
#include "dailoc/nn/matrix.hpp"

namespace dailoc::nn {

AdamState make_adam_state(std::span<const ParamBlock> params, AdamConfig config) {
  AdamState state;
  state.config = config;
  for (const auto& block : params) {
    state.first_moment.emplace_back(block.values.size(), 0.0);
    state.second_moment.emplace_back(block.values.size(), 0.0);
  }
  return state;
}

void adam_step(std::span<const ParamBlock> params, std::span<const GradBlock> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameter blocks, " +
                     std::to_string(grads.size()) + " gradient blocks, " +
                     std::to_string(state.first_moment.size()) + " moment blocks");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].values.size() != grads[b].values.size() ||
        params[b].values.size() != state.first_moment[b].size()) {
      throw ShapeError("adam_step: block '" + params[b].name + "' size mismatch");
    }
    if (!all_finite(grads[b].values)) {
      throw TrainingError("adam_step: non-finite gradient in block '" + params[b].name + "'");
    }
  }

  const auto& cfg = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    auto p = params[b].values;
    auto g = grads[b].values;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace dailoc::nn

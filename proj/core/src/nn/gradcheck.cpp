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

#include "dailoc/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dailoc/common/errors.hpp"
#include "dailoc/common/rng.hpp"

namespace dailoc::nn {

GradCheckReport gradient_check(const LossFn& loss, std::span<const ParamBlock> params,
                               std::span<const GradBlock> analytic,
                               const GradCheckOptions& options) {
  if (options.step <= 0.0) throw CheckInvalidError("gradient_check: step must be positive");
  if (params.size() != analytic.size()) {
    throw ShapeError("gradient_check: parameter and gradient block counts differ");
  }
  const double base = loss();
  if (loss() != base) {
    throw CheckInvalidError("gradient_check: loss function is not deterministic");
  }

  GradCheckReport report;
  Rng rng(options.seed);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto values = params[b].values;
    const auto grad = analytic[b].values;
    if (values.size() != grad.size()) {
      throw ShapeError("gradient_check: block '" + params[b].name + "' size mismatch");
    }
    std::vector<std::size_t> coords(values.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coords_per_block != 0 && coords.size() > options.max_coords_per_block) {
      rng.shuffle(std::span<std::size_t>(coords));
      coords.resize(options.max_coords_per_block);
      std::ranges::sort(coords);
    }
    for (std::size_t i : coords) {
      const double original = values[i];
      values[i] = original + options.step;
      const double plus = loss();
      values[i] = original - options.step;
      const double minus = loss();
      values[i] = original;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double scale =
          std::max({std::abs(grad[i]), std::abs(numeric), options.scale_floor});
      double rel = std::abs(grad[i] - numeric) / scale;
      if (std::isnan(rel)) rel = INFINITY;
      ++report.coords_checked;
      if (report.worst_param.empty() || rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = params[b].name + "[" + std::to_string(i) + "]";
        report.worst_block = params[b].name;
      }
    }
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace dailoc::nn

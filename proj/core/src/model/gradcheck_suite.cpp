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

#include "dailoc/model/gradcheck_suite.hpp"

#include "dailoc/cesa/mmd.hpp"
#include "dailoc/common/rng.hpp"
#include "dailoc/model/objective.hpp"

namespace dailoc::model {

std::vector<GradCheckCase> run_gradcheck_suite(const GradCheckSuiteOptions& options) {
  ArchConfig arch;
  arch.input_dim = options.n_aps;
  arch.n_rps = options.n_rps;
  MlvaeModel model = make_model(arch, mix_seed(options.seed, 1));

  Rng rng(mix_seed(options.seed, 2));
  nn::Matrix x(options.batch, arch.input_dim);
  for (double& v : x.values()) v = rng.uniform(0.05, 0.95);
  nn::Matrix eps(options.batch, arch.latent_dim);
  for (double& v : eps.values()) v = rng.normal();
  std::vector<std::size_t> labels(options.batch);
  for (auto& l : labels) l = rng.index(arch.n_rps);
  nn::Matrix prototypes(arch.n_rps, arch.latent_dim);
  for (double& v : prototypes.values()) v = rng.normal();

  const auto z_c = encode(model, x).z_c;
  const auto kernel = cesa::KernelConfig::fixed(
      cesa::resolve_bandwidths(cesa::KernelConfig{}, z_c, prototypes));

  struct Case {
    const char* name;
    LossWeights weights;
    bool reconstruction;
    bool labeled;
    bool align;
  };
  const Case cases[] = {
      {"L_rec", {1, 0, 0, 0}, true, false, false},
      {"L_KL", {0, 1, 0, 0}, true, false, false},
      {"L_c", {0, 0, 0, 1}, false, true, false},
      {"L_align", {0, 0, 1, 0}, false, false, true},
      {"stage 1 (L_rec + L_KL + L_align)", {1, 1, 1, 0}, true, false, true},
      {"stage 2 (L_align + L_c)", {0, 0, 1, 1}, false, true, true},
      {"L_total", {1, 1, 1, 1}, true, true, true},
  };

  std::vector<GradCheckCase> out;
  for (const auto& c : cases) {
    ObjectiveInput input;
    input.x = &x;
    input.eps = &eps;
    if (c.labeled) input.labels = labels;
    if (c.align) input.prototypes = &prototypes;
    input.kernel = kernel;
    input.weights = c.weights;
    input.with_reconstruction = c.reconstruction;

    ModelGrads grads;
    evaluate_objective(model, input, &grads);
    const auto loss = [&] { return evaluate_objective(model, input, nullptr).weighted_total(c.weights); };
    const auto params = parameter_blocks(model);
    const auto analytic = gradient_blocks(grads, model);
    out.push_back({c.name, nn::gradient_check(loss, params, analytic, options.check)});
  }
  return out;
}

}  // namespace dailoc::model

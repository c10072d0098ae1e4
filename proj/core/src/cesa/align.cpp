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

#include "dailoc/cesa/align.hpp"

#include "dailoc/common/errors.hpp"

namespace dailoc::cesa {

nn::AdamState make_classifier_optimizer(model::MlvaeModel& model, nn::AdamConfig config) {
  const auto blocks = model::parameter_blocks(model, model::Group::kClassifier);
  return nn::make_adam_state(blocks, config);
}

AlignReport align_step(model::MlvaeModel& model, nn::AdamState& classifier_optimizer,
                       const nn::Matrix& x, std::span<const std::size_t> pseudo_labels,
                       const RepresentationMemory& memory, const KernelConfig& kernel,
                       const model::LossWeights& weights) {
  AlignReport report;
  if (x.rows() == 0) {
    report.skipped = true;
    report.warning = "empty pseudo-labeled batch; alignment step skipped";
    return report;
  }
  if (pseudo_labels.size() != x.rows()) {
    throw ShapeError("align_step: " + std::to_string(pseudo_labels.size()) +
                     " pseudo labels for " + std::to_string(x.rows()) + " samples");
  }
  const nn::Matrix prototypes = memory.pooled();
  if (prototypes.rows() == 0) report.warning = "representation memory is empty; L_align skipped";

  model::ObjectiveInput input;
  input.x = &x;
  input.labels = pseudo_labels;
  input.prototypes = &prototypes;
  input.kernel = kernel;
  input.weights = weights;
  input.with_reconstruction = false;
  input.grad_groups = model::Group::kClassifier;

  model::ModelGrads grads;
  const auto terms = model::evaluate_objective(model, input, &grads);
  report.align_loss = terms.align;
  report.class_loss = terms.cls.value_or(0.0);
  report.classifier_grad_norm = grads.l2_norm(model::Group::kClassifier);

  const auto params = model::parameter_blocks(model, model::Group::kClassifier);
  const auto grad_blocks = model::gradient_blocks(grads, model, model::Group::kClassifier);
  nn::adam_step(params, grad_blocks, classifier_optimizer);
  return report;
}

}  // namespace dailoc::cesa

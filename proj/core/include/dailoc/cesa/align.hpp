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
#include <optional>
#include <span>
#include <string>

#include "dailoc/cesa/memory.hpp"
#include "dailoc/cesa/mmd.hpp"
#include "dailoc/model/mlvae.hpp"
#include "dailoc/model/objective.hpp"
#include "dailoc/nn/adam.hpp"

namespace dailoc::cesa {

struct AlignReport {
  bool skipped = false;
  std::optional<double> align_loss;  // absent when the memory is empty
  double class_loss = 0.0;
  double classifier_grad_norm = 0.0;
  std::string warning;
};

// Adam state over exactly the classifier blocks of `model`.
nn::AdamState make_classifier_optimizer(model::MlvaeModel& model, nn::AdamConfig config = {});

// One class-latent alignment step. z_C comes from the frozen encoder; the
// loss L_align (batch z_C vs every stored prototype) + L_c (pseudo labels) is
// evaluated and one Adam step is applied to the classifier only. Encoder and
// decoder parameters are not written.
//
// z_C does not depend on classifier parameters, so L_align adds nothing to the
// update. It is still evaluated and reported.
AlignReport align_step(model::MlvaeModel& model, nn::AdamState& classifier_optimizer,
                       const nn::Matrix& x, std::span<const std::size_t> pseudo_labels,
                       const RepresentationMemory& memory, const KernelConfig& kernel,
                       const model::LossWeights& weights);

}  // namespace dailoc::cesa

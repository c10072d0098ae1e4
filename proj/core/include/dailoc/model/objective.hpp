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

#include "dailoc/cesa/mmd.hpp"
#include "dailoc/model/mlvae.hpp"
#include "dailoc/nn/matrix.hpp"

namespace dailoc::model {

// Multipliers of the four loss terms in L_total = L_rec + L_KL + L_align + L_c.
struct LossWeights {
  double rec = 1.0;
  double kl = 1.0;
  double align = 1.0;
  double cls = 1.0;

  bool operator==(const LossWeights&) const = default;
};

// Batch-mean loss values. A term is absent when it was not evaluated: no
// decoder pass, no prototypes, or no labels.
struct LossTerms {
  std::optional<double> rec;
  double kl = 0.0;
  std::optional<double> align;
  std::optional<double> cls;

  double weighted_total(const LossWeights& w) const;
  // Unweighted L_total over the terms that are present.
  double total() const { return weighted_total(LossWeights{}); }
};

struct ObjectiveInput {
  const nn::Matrix* x = nullptr;    // batch x input_dim, standardized
  const nn::Matrix* eps = nullptr;  // batch x latent_dim reparameterization noise
  std::span<const std::size_t> labels;  // empty: no classification term
  const nn::Matrix* prototypes = nullptr;  // null or empty: no alignment term
  cesa::KernelConfig kernel;
  LossWeights weights;
  // Skip the decoder (and L_rec) entirely, e.g. while only the classifier trains.
  bool with_reconstruction = true;
  // Groups whose parameter gradients are needed; backpropagation stops early
  // when the rest of the graph cannot contribute.
  GroupMask grad_groups = kAllGroups;
};

// Evaluates every available loss term and, if `grads` is non-null, the
// gradient of the weighted sum with respect to the parameters in
// `input.grad_groups`. eps is treated as a constant.
LossTerms evaluate_objective(const MlvaeModel& model, const ObjectiveInput& input,
                             ModelGrads* grads);

}  // namespace dailoc::model

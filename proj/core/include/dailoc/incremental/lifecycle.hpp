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
#include <optional>
#include <string>
#include <vector>

#include "dailoc/cesa/memory.hpp"
#include "dailoc/cesa/mmd.hpp"
#include "dailoc/incremental/batch.hpp"
#include "dailoc/incremental/registry.hpp"
#include "dailoc/model/mlvae.hpp"
#include "dailoc/model/noise_buffer.hpp"
#include "dailoc/model/objective.hpp"

namespace dailoc::incremental {

struct AdaptationConfig {
  std::size_t pretrain_epochs = 200;
  std::size_t onboard_epochs = 50;
  std::size_t stage1_epochs = 50;
  std::size_t stage2_epochs = 50;
  std::size_t batch_size = 32;
  model::LossWeights weights;
  double tau = 0.0;  // pseudo-label confidence threshold
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  cesa::KernelConfig kernel;

  // Mechanism switches (ablations).
  bool use_cesa = true;     // L_align against the representation memory
  bool disentangle = true;  // buffered eps_D; false draws fresh noise per sample
  bool run_stage1 = true;   // encoder adaptation before pseudo-labeling

  // L_align also acts on the encoder during stage 1. z_C does not depend on
  // classifier parameters, so in stage 2 the term has no gradient; false
  // gives the strict L_rec + L_KL stage 1.
  bool align_in_stage1 = true;
  // Stage 1 always trains the encoder; this adds the decoder.
  bool stage1_updates_decoder = false;

  void validate() const;
};

// Everything that evolves over the deployment lifetime; one checkpoint.
struct LearnerState {
  model::MlvaeModel model;
  model::DomainNoiseBuffer noise;
  cesa::RepresentationMemory memory;
  DomainRegistry registry;
  std::uint64_t seed = 0;
};

LearnerState make_learner(const model::ArchConfig& arch, std::uint64_t seed,
                          std::size_t memory_capacity = 1);

struct EpochLoss {
  std::optional<double> rec;
  double kl = 0.0;
  std::optional<double> align;
  std::optional<double> cls;
};

struct PretrainReport {
  DomainKey key;
  std::vector<EpochLoss> curve;
  double train_accuracy = 0.0;
};

// Joint L_rec + L_KL + L_c training of encoder, decoder and classifier on the
// labeled epoch-0 data of a single device.
PretrainReport pretrain_offline(model::MlvaeModel& model, model::DomainNoiseBuffer& noise,
                                const DomainBatch& batch, const AdaptationConfig& config);

// pretrain_offline, then registers the device and seeds the representation
// memory with the resulting class latents.
PretrainReport pretrain(LearnerState& state, const DomainBatch& batch,
                        const AdaptationConfig& config, AccessLog* log = nullptr);

struct OnboardReport {
  DomainKey key;
  std::vector<EpochLoss> curve;
  std::size_t prototypes_offered = 0;
  std::size_t prototypes_stored = 0;
  std::vector<std::string> warnings;
};

// Supervised onboarding of an unknown device: full fine-tuning on
// L_rec + L_KL + L_c, reservoir insertion of the labeled class latents, device
// registration, and creation of eps_D for the new domain.
OnboardReport onboard_device(LearnerState& state, const DomainBatch& batch,
                             const AdaptationConfig& config, AccessLog* log = nullptr);

struct PseudoLabel {
  std::size_t rp = 0;
  double confidence = 0.0;
};

// argmax of classify(z_C); nullopt when the top probability is below tau.
std::optional<PseudoLabel> pseudo_label(const model::MlvaeModel& model,
                                        std::span<const double> x, double tau);
std::vector<std::optional<PseudoLabel>> pseudo_label_batch(const model::MlvaeModel& model,
                                                           const nn::Matrix& x, double tau);

enum class AdaptPoint { kBeforeStage1, kAfterStage1 };

// Invoked with the model state at each pipeline point.
using AdaptObserver = std::function<void(AdaptPoint, const model::MlvaeModel&)>;

struct AdaptReport {
  DomainKey key;
  bool skipped = false;
  std::vector<std::string> warnings;
  std::vector<EpochLoss> stage1_curve;
  std::vector<EpochLoss> stage2_curve;
  std::size_t pseudo_labels = 0;
  std::size_t rejected = 0;
  double rejected_fraction = 0.0;
  double encoder_drift_linf = 0.0;
  double decoder_drift_linf = 0.0;
  double classifier_drift_linf = 0.0;
  bool classifier_frozen_in_stage1 = true;
  bool encoder_decoder_frozen_in_stage2 = true;
  // Staged L_total: last stage-1 epoch plus last stage-2 epoch.
  double total_loss = 0.0;
};

// Two-stage unsupervised adaptation of a known device. Stage 1 freezes the
// classifier and adapts the encoder on L_rec + L_KL (+ L_align, see
// AdaptationConfig::align_in_stage1); pseudo-labels then come
// from the adapted encoder and the frozen classifier; stage 2 freezes encoder
// and decoder and runs align_step over the pseudo-labeled data.
AdaptReport adapt_unsupervised(LearnerState& state, const DomainBatch& batch,
                               const AdaptationConfig& config,
                               const AdaptObserver& observer = {}, AccessLog* log = nullptr);

}  // namespace dailoc::incremental

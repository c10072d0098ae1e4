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

#include "dailoc/incremental/lifecycle.hpp"

#include <algorithm>
#include <numeric>

#include "dailoc/cesa/align.hpp"
#include "dailoc/common/errors.hpp"
#include "dailoc/common/rng.hpp"

namespace dailoc::incremental {
namespace {

using model::Group;
using model::GroupMask;

constexpr std::size_t kOnboardWarnBelow = 5;

Rng event_rng(const AdaptationConfig& config, std::string_view tag, const DomainKey& key) {
  return Rng(mix_seed(mix_seed(config.seed, hash_string(tag)), hash_string(key.to_string())));
}

struct TrainPlan {
  GroupMask trainable;
  model::LossWeights weights;
  bool use_labels = false;
  const nn::Matrix* prototypes = nullptr;
  std::size_t epochs = 0;
};

nn::Matrix make_eps(model::DomainNoiseBuffer& noise, const DomainKey& key, std::size_t rows,
                    std::size_t dim, bool disentangle, Rng& rng) {
  if (disentangle) return noise.noise_rows(key, rows);
  nn::Matrix eps(rows, dim);
  for (double& v : eps.values()) v = rng.normal();
  return eps;
}

// Mini-batch Adam over the `trainable` groups; returns per-epoch means.
std::vector<EpochLoss> train_epochs(model::MlvaeModel& net, model::DomainNoiseBuffer& noise,
                                    const DomainBatch& batch, const TrainPlan& plan,
                                    const AdaptationConfig& config, Rng& rng) {
  const auto params = model::parameter_blocks(net, plan.trainable);
  auto optimizer = nn::make_adam_state(params, {.learning_rate = config.learning_rate});

  const std::size_t n = batch.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochLoss> curve;
  curve.reserve(plan.epochs);
  for (std::size_t epoch = 0; epoch < plan.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double rec = 0.0, kl = 0.0, align = 0.0, cls = 0.0;
    bool has_rec = false, has_align = false, has_cls = false;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const nn::Matrix xb = nn::gather_rows(batch.x, idx);
      const nn::Matrix eps =
          make_eps(noise, batch.key, idx.size(), net.arch.latent_dim, config.disentangle, rng);
      std::vector<std::size_t> labels;
      if (plan.use_labels) {
        labels.reserve(idx.size());
        for (std::size_t i : idx) labels.push_back(batch.labels[i]);
      }

      model::ObjectiveInput input;
      input.x = &xb;
      input.eps = &eps;
      input.labels = labels;
      input.prototypes = plan.prototypes;
      input.kernel = config.kernel;
      input.weights = plan.weights;
      input.grad_groups = plan.trainable;

      model::ModelGrads grads;
      const auto terms = model::evaluate_objective(net, input, &grads);
      const auto grad_blocks = model::gradient_blocks(grads, net, plan.trainable);
      nn::adam_step(params, grad_blocks, optimizer);

      const double w = static_cast<double>(idx.size());
      kl += w * terms.kl;
      if (terms.rec) rec += w * *terms.rec, has_rec = true;
      if (terms.align) align += w * *terms.align, has_align = true;
      if (terms.cls) cls += w * *terms.cls, has_cls = true;
    }
    const double inv = 1.0 / static_cast<double>(n);
    EpochLoss e;
    e.kl = kl * inv;
    if (has_rec) e.rec = rec * inv;
    if (has_align) e.align = align * inv;
    if (has_cls) e.cls = cls * inv;
    curve.push_back(e);
  }
  return curve;
}

void require_labeled(const DomainBatch& batch, std::size_t n_rps, std::string_view op) {
  if (!batch.labeled()) {
    throw InputError(std::string(op) + ": " + batch.key.to_string() +
                     " batch contains unlabeled samples");
  }
  for (std::size_t i = 0; i < batch.labels.size(); ++i) {
    if (batch.labels[i] >= n_rps) {
      throw InputError(std::string(op) + ": sample " + std::to_string(batch.sample_ids[i]) +
                       " has RP label " + std::to_string(batch.labels[i]) + " but the model has " +
                       std::to_string(n_rps) + " RPs");
    }
  }
}

std::size_t store_prototypes(LearnerState& state, const DomainBatch& batch) {
  const auto latents = model::encode(state.model, batch.x);
  std::size_t stored = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (state.memory.reservoir_insert(batch.labels[i], latents.z_c.row(i))) ++stored;
  }
  return stored;
}

double accuracy(const model::MlvaeModel& net, const DomainBatch& batch) {
  const auto labels = pseudo_label_batch(net, batch.x, 0.0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] && labels[i]->rp == batch.labels[i]) ++hits;
  }
  return batch.size() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(batch.size());
}

double staged_total(const EpochLoss& e, const model::LossWeights& w) {
  return w.rec * e.rec.value_or(0.0) + w.kl * e.kl + w.align * e.align.value_or(0.0) +
         w.cls * e.cls.value_or(0.0);
}

}  // namespace

void AdaptationConfig::validate() const {
  if (pretrain_epochs == 0 || onboard_epochs == 0 || stage1_epochs == 0 || stage2_epochs == 0) {
    throw InputError("adaptation config: epochs per stage must be >= 1");
  }
  if (batch_size == 0) throw InputError("adaptation config: batch size must be >= 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("adaptation config: tau must be in [0, 1]");
  if (!(learning_rate > 0.0)) throw InputError("adaptation config: learning rate must be > 0");
  kernel.validate();
}

LearnerState make_learner(const model::ArchConfig& arch, std::uint64_t seed,
                          std::size_t memory_capacity) {
  return LearnerState{
      .model = model::make_model(arch, mix_seed(seed, 1)),
      .noise = model::DomainNoiseBuffer(mix_seed(seed, 2), arch.latent_dim),
      .memory = cesa::RepresentationMemory(arch.n_rps, arch.latent_dim, memory_capacity,
                                           mix_seed(seed, 3)),
      .registry = {},
      .seed = seed,
  };
}

PretrainReport pretrain_offline(model::MlvaeModel& model, model::DomainNoiseBuffer& noise,
                                const DomainBatch& batch, const AdaptationConfig& config) {
  config.validate();
  if (batch.size() == 0) throw InputError("pretrain_offline: empty dataset");
  require_labeled(batch, model.arch.n_rps, "pretrain_offline");
  if (batch.key.epoch != 0) {
    throw InputError("pretrain_offline: expects time epoch 0, got " + batch.key.to_string());
  }

  Rng rng = event_rng(config, "pretrain", batch.key);
  model::LossWeights weights = config.weights;
  weights.align = 0.0;
  const TrainPlan plan{model::kAllGroups, weights, true, nullptr, config.pretrain_epochs};

  PretrainReport report;
  report.key = batch.key;
  report.curve = train_epochs(model, noise, batch, plan, config, rng);
  report.train_accuracy = accuracy(model, batch);
  return report;
}

PretrainReport pretrain(LearnerState& state, const DomainBatch& batch,
                        const AdaptationConfig& config, AccessLog* log) {
  if (log) log->record("pretrain", batch.key);
  auto report = pretrain_offline(state.model, state.noise, batch, config);
  state.noise.get_or_create(batch.key);
  store_prototypes(state, batch);
  state.registry.record(batch.key, EventType::kPretrain);
  return report;
}

OnboardReport onboard_device(LearnerState& state, const DomainBatch& batch,
                             const AdaptationConfig& config, AccessLog* log) {
  config.validate();
  if (state.registry.is_known(batch.key.device)) {
    throw PreconditionError("device '" + batch.key.device +
                            "' is already known; use adapt_unsupervised for its new data");
  }
  if (log) log->record("onboard_device", batch.key);
  const std::size_t n_rps = state.model.arch.n_rps;
  require_labeled(batch, n_rps, "onboard_device");

  OnboardReport report;
  report.key = batch.key;
  std::vector<std::size_t> per_rp(n_rps, 0);
  for (std::size_t label : batch.labels) ++per_rp[label];
  for (std::size_t rp = 0; rp < n_rps; ++rp) {
    if (per_rp[rp] == 0) {
      throw InputError("onboard_device: " + batch.key.to_string() + " has no labeled sample for RP " +
                       std::to_string(rp));
    }
    if (per_rp[rp] < kOnboardWarnBelow) {
      report.warnings.push_back("RP " + std::to_string(rp) + " has only " +
                                std::to_string(per_rp[rp]) + " onboarding samples");
    }
  }

  Rng rng = event_rng(config, "onboard", batch.key);
  model::LossWeights weights = config.weights;
  weights.align = 0.0;
  const TrainPlan plan{model::kAllGroups, weights, true, nullptr, config.onboard_epochs};
  report.curve = train_epochs(state.model, state.noise, batch, plan, config, rng);

  report.prototypes_offered = batch.size();
  report.prototypes_stored = store_prototypes(state, batch);
  state.noise.get_or_create(batch.key);
  state.registry.record(batch.key, EventType::kOnboard);
  return report;
}

std::optional<PseudoLabel> pseudo_label(const model::MlvaeModel& model,
                                        std::span<const double> x, double tau) {
  return pseudo_label_batch(model, nn::Matrix::from_row(x), tau).front();
}

std::vector<std::optional<PseudoLabel>> pseudo_label_batch(const model::MlvaeModel& model,
                                                           const nn::Matrix& x, double tau) {
  const auto latents = model::encode(model, x);
  const nn::Matrix probs = model::classify(model, latents.z_c);
  std::vector<std::optional<PseudoLabel>> out;
  out.reserve(x.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const auto row = probs.row(r);
    const auto best = std::max_element(row.begin(), row.end());
    const double confidence = *best;
    if (confidence < tau) {
      out.emplace_back(std::nullopt);
    } else {
      out.push_back(PseudoLabel{static_cast<std::size_t>(best - row.begin()), confidence});
    }
  }
  return out;
}

AdaptReport adapt_unsupervised(LearnerState& state, const DomainBatch& batch,
                               const AdaptationConfig& config, const AdaptObserver& observer,
                               AccessLog* log) {
  config.validate();
  if (!state.registry.is_known(batch.key.device)) {
    throw PreconditionError("device '" + batch.key.device +
                            "' is unknown; it must be onboarded with labeled data first");
  }
  AdaptReport report;
  report.key = batch.key;
  if (batch.size() == 0) {
    report.skipped = true;
    report.warnings.push_back("empty batch; nothing to adapt");
    return report;
  }
  if (log) log->record("adapt_unsupervised", batch.key);

  auto& net = state.model;
  const model::MlvaeModel before = net;
  Rng rng = event_rng(config, "adapt", batch.key);
  state.noise.get_or_create(batch.key);

  if (observer) observer(AdaptPoint::kBeforeStage1, net);

  // Stage 1: classifier frozen.
  if (config.run_stage1) {
    const auto classifier_sum = model::parameter_checksum(net, Group::kClassifier);
    GroupMask trainable = Group::kEncoder;
    if (config.stage1_updates_decoder) trainable = trainable | Group::kDecoder;
    model::LossWeights weights = config.weights;
    weights.cls = 0.0;
    nn::Matrix prototypes;
    const bool align = config.align_in_stage1 && config.use_cesa;
    if (align) prototypes = state.memory.pooled();
    const TrainPlan plan{trainable, weights, false, align ? &prototypes : nullptr,
                         config.stage1_epochs};
    report.stage1_curve = train_epochs(net, state.noise, batch, plan, config, rng);
    report.classifier_frozen_in_stage1 =
        model::parameter_checksum(net, Group::kClassifier) == classifier_sum;
    if (!report.classifier_frozen_in_stage1) {
      throw TrainingError("stage 1 modified classifier parameters");
    }
  }

  if (observer) observer(AdaptPoint::kAfterStage1, net);

  // Pseudo-labels from the adapted encoder and the frozen classifier.
  const auto labels = pseudo_label_batch(net, batch.x, config.tau);
  std::vector<std::size_t> accepted;
  std::vector<std::size_t> accepted_labels(batch.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    accepted.push_back(i);
    accepted_labels[i] = labels[i]->rp;
  }
  report.pseudo_labels = accepted.size();
  report.rejected = batch.size() - accepted.size();
  report.rejected_fraction =
      static_cast<double>(report.rejected) / static_cast<double>(batch.size());

  // Stage 2: encoder and decoder frozen.
  if (accepted.empty()) {
    report.warnings.push_back("no pseudo-label passed tau; stage 2 skipped");
  } else {
    const GroupMask frozen = GroupMask(Group::kEncoder) | Group::kDecoder;
    const auto frozen_sum = model::parameter_checksum(net, frozen);
    auto optimizer = cesa::make_classifier_optimizer(net, {.learning_rate = config.learning_rate});
    const cesa::RepresentationMemory no_memory(net.arch.n_rps, net.arch.latent_dim);
    const auto& memory = config.use_cesa ? state.memory : no_memory;
    if (config.use_cesa && memory.total() == 0) {
      report.warnings.push_back("representation memory is empty; L_align skipped");
    }
    model::LossWeights weights = config.weights;
    weights.rec = 0.0;
    weights.kl = 0.0;

    for (std::size_t epoch = 0; epoch < config.stage2_epochs; ++epoch) {
      rng.shuffle(std::span<std::size_t>(accepted));
      double align = 0.0, cls = 0.0;
      bool has_align = false;
      for (std::size_t begin = 0; begin < accepted.size(); begin += config.batch_size) {
        const std::size_t end = std::min(accepted.size(), begin + config.batch_size);
        const std::span<const std::size_t> idx(accepted.data() + begin, end - begin);
        const nn::Matrix xb = nn::gather_rows(batch.x, idx);
        std::vector<std::size_t> yb;
        yb.reserve(idx.size());
        for (std::size_t i : idx) yb.push_back(accepted_labels[i]);
        const auto step =
            cesa::align_step(net, optimizer, xb, yb, memory, config.kernel, weights);
        const double w = static_cast<double>(idx.size());
        cls += w * step.class_loss;
        if (step.align_loss) align += w * *step.align_loss, has_align = true;
      }
      const double inv = 1.0 / static_cast<double>(accepted.size());
      EpochLoss e;
      e.cls = cls * inv;
      if (has_align) e.align = align * inv;
      report.stage2_curve.push_back(e);
    }
    report.encoder_decoder_frozen_in_stage2 = model::parameter_checksum(net, frozen) == frozen_sum;
    if (!report.encoder_decoder_frozen_in_stage2) {
      throw TrainingError("stage 2 modified encoder or decoder parameters");
    }
  }

  report.encoder_drift_linf = model::parameter_drift_linf(before, net, Group::kEncoder);
  report.decoder_drift_linf = model::parameter_drift_linf(before, net, Group::kDecoder);
  report.classifier_drift_linf = model::parameter_drift_linf(before, net, Group::kClassifier);
  if (!report.stage1_curve.empty()) {
    report.total_loss += staged_total(report.stage1_curve.back(), config.weights);
  }
  if (!report.stage2_curve.empty()) {
    report.total_loss += staged_total(report.stage2_curve.back(), config.weights);
  }
  state.registry.record(batch.key, EventType::kAdapt);
  return report;
}

}  // namespace dailoc::incremental

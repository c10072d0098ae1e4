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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dailoc/common/errors.hpp"
#include "dailoc/incremental/batch.hpp"
#include "dailoc/incremental/lifecycle.hpp"
#include "dailoc/incremental/registry.hpp"
#include "fixtures.hpp"

namespace dailoc::incremental {
namespace {

using testing::separable_batch;
using testing::tiny_arch;

constexpr std::size_t kAps = 8;
constexpr std::size_t kRps = 3;

AdaptationConfig quick_config() {
  AdaptationConfig c;
  c.pretrain_epochs = 200;
  c.onboard_epochs = 20;
  c.stage1_epochs = 10;
  c.stage2_epochs = 10;
  c.batch_size = 8;
  c.seed = 3;
  return c;
}

LearnerState pretrained(AccessLog* log = nullptr, std::uint64_t seed = 1) {
  auto state = make_learner(tiny_arch(kAps, kRps), seed, 1);
  pretrain(state, separable_batch({"BLU", 0}, kRps, kAps, 8, 10), quick_config(), log);
  return state;
}

TEST(Registry, KnownOnlyAfterSupervisedEvents) {
  DomainRegistry reg;
  EXPECT_FALSE(reg.is_known("S7"));
  reg.record({"S7", 1}, EventType::kAdapt);
  EXPECT_FALSE(reg.is_known("S7"));
  reg.record({"BLU", 0}, EventType::kPretrain);
  reg.record({"S7", 2}, EventType::kOnboard);
  EXPECT_TRUE(reg.is_known("S7"));
  EXPECT_TRUE(reg.is_known("BLU"));
  ASSERT_EQ(reg.history().size(), 3u);
  EXPECT_EQ(reg.history()[0].type, EventType::kAdapt);
  EXPECT_EQ(reg.history()[2].key, (DomainKey{"S7", 2}));
  EXPECT_EQ(reg.known_devices().size(), 2u);
  EXPECT_TRUE(reg.known_devices().contains("BLU"));
}

TEST(Registry, EventNamesRoundTrip) {
  for (auto t : {EventType::kPretrain, EventType::kOnboard, EventType::kAdapt}) {
    EXPECT_EQ(event_type_from_string(to_string(t)), t);
  }
  EXPECT_THROW(event_type_from_string("replay"), ParseError);
}

TEST(DomainKeyOrdering, ExactPairEquality) {
  EXPECT_EQ((DomainKey{"S7", 1}), (DomainKey{"S7", 1}));
  EXPECT_NE((DomainKey{"S7", 1}), (DomainKey{"S7", 2}));
  EXPECT_NE((DomainKey{"S7", 1}), (DomainKey{"LG", 1}));
  EXPECT_LT((DomainKey{"LG", 5}), (DomainKey{"S7", 0}));
  EXPECT_EQ((DomainKey{"HTC", 3}).to_string(), "HTC@3");
}

io::FingerprintRecord record(std::uint64_t id, std::string dev, std::uint32_t epoch,
                             std::optional<std::size_t> rp, std::vector<double> rss) {
  return {id, std::move(dev), epoch, rp, std::move(rss)};
}

TEST(Batch, StandardizesAndValidates) {
  const std::vector<io::FingerprintRecord> recs{record(1, "S7", 2, 0, {-100, 0, -50}),
                                                record(2, "S7", 2, 1, {-75, -25, -100})};
  const auto b = make_batch({"S7", 2}, recs);
  EXPECT_EQ(b.x, (nn::Matrix{{0.0, 1.0, 0.5}, {0.25, 0.75, 0.0}}));
  EXPECT_EQ(b.labels, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(b.sample_ids, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_TRUE(b.labeled());
  EXPECT_FALSE(make_batch({"S7", 2}, recs, LabelUse::kDrop).labeled());

  EXPECT_THROW(make_batch({"S7", 3}, recs), InputError);
  auto mixed = recs;
  mixed[1].rp.reset();
  EXPECT_THROW(make_batch({"S7", 2}, mixed), InputError);
  EXPECT_NO_THROW(make_batch({"S7", 2}, mixed, LabelUse::kDrop));
  auto ragged = recs;
  ragged[1].rss.push_back(-60);
  EXPECT_THROW(make_batch({"S7", 2}, ragged), ShapeError);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(AdaptationConfig{}.validate());
  const auto bad = [](auto mutate) {
    AdaptationConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](auto& c) { c.stage1_epochs = 0; }).validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.pretrain_epochs = 0; }).validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.batch_size = 0; }).validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.tau = 1.5; }).validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.tau = -0.1; }).validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.learning_rate = 0.0; }).validate(), InputError);
  EXPECT_DOUBLE_EQ(AdaptationConfig{}.learning_rate, 1e-3);
  EXPECT_EQ(AdaptationConfig{}.tau, 0.0);
  EXPECT_EQ(AdaptationConfig{}.weights, model::LossWeights{});
}

TEST(Pretrain, SeparableToyReachesFullAccuracy) {
  auto model = model::make_model(tiny_arch(kAps, kRps), 5);
  model::DomainNoiseBuffer noise(1, 4);
  const auto batch = separable_batch({"BLU", 0}, kRps, kAps, 10, 1);
  auto cfg = quick_config();
  cfg.pretrain_epochs = 200;
  const auto r = pretrain_offline(model, noise, batch, cfg);
  EXPECT_EQ(r.train_accuracy, 1.0);
  ASSERT_EQ(r.curve.size(), 200u);
  for (const auto& e : r.curve) {
    ASSERT_TRUE(e.rec && e.cls);
    EXPECT_TRUE(std::isfinite(*e.rec) && std::isfinite(e.kl) && std::isfinite(*e.cls));
    EXPECT_FALSE(e.align.has_value());
  }
  EXPECT_LT(*r.curve.back().cls, *r.curve.front().cls);
}

TEST(Pretrain, SameSeedSameParameters) {
  const auto a = pretrained(nullptr, 4);
  const auto b = pretrained(nullptr, 4);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.noise, b.noise);
  EXPECT_NE(a.model, pretrained(nullptr, 5).model);
}

TEST(Pretrain, RejectsUnlabeledOrLateData) {
  auto model = model::make_model(tiny_arch(kAps, kRps), 5);
  model::DomainNoiseBuffer noise(1, 4);
  const auto cfg = quick_config();
  EXPECT_THROW(pretrain_offline(model, noise,
                                separable_batch({"BLU", 0}, kRps, kAps, 2, 1, false), cfg),
               InputError);
  EXPECT_THROW(pretrain_offline(model, noise, separable_batch({"BLU", 1}, kRps, kAps, 2, 1), cfg),
               InputError);
}

TEST(Pretrain, RegistersBaseDeviceAndPrototypes) {
  const auto s = pretrained();
  EXPECT_TRUE(s.registry.is_known("BLU"));
  EXPECT_TRUE(s.memory.covers_all_rps());
  EXPECT_TRUE(s.noise.contains({"BLU", 0}));
}

TEST(Onboard, FillsMemoryAndRegisters) {
  auto s = make_learner(tiny_arch(kAps, kRps), 2, 1);
  const auto batch = separable_batch({"S7", 1}, kRps, kAps, 6, 3, true, 0.05);
  const auto r = onboard_device(s, batch, quick_config());
  EXPECT_TRUE(s.registry.is_known("S7"));
  for (std::size_t rp = 0; rp < kRps; ++rp) EXPECT_GE(s.memory.prototypes(rp).size(), 1u);
  EXPECT_EQ(s.memory.total(), kRps);
  EXPECT_EQ(r.prototypes_offered, batch.size());
  EXPECT_TRUE(r.warnings.empty());
  ASSERT_TRUE(s.noise.contains({"S7", 1}));
  const auto eps = *s.noise.find({"S7", 1});
  EXPECT_THROW(onboard_device(s, batch, quick_config()), PreconditionError);
  EXPECT_EQ(*s.noise.find({"S7", 1}), eps);
}

TEST(Onboard, CoverageErrorsAndWarnings) {
  auto s = make_learner(tiny_arch(kAps, kRps), 2, 1);
  auto missing = separable_batch({"S7", 1}, kRps, kAps, 2, 3);
  missing.x = nn::slice_rows(missing.x, 0, 4);  // RP 2 absent
  missing.labels.resize(4);
  missing.sample_ids.resize(4);
  EXPECT_THROW(onboard_device(s, missing, quick_config()), InputError);
  EXPECT_FALSE(s.registry.is_known("S7"));
  EXPECT_THROW(onboard_device(s, separable_batch({"S7", 1}, kRps, kAps, 2, 3, false),
                              quick_config()),
               InputError);
  const auto r = onboard_device(s, separable_batch({"S7", 1}, kRps, kAps, 2, 3), quick_config());
  EXPECT_EQ(r.warnings.size(), kRps);
}

TEST(PseudoLabel, OneHotAndThresholds) {
  auto m = model::make_model(tiny_arch(kAps, kRps), 7);
  const std::vector<double> x(kAps, 0.4);
  auto hot = m;
  auto& out = hot.layer(model::LayerId::kClassifierOut);
  for (auto& w : out.weights.values()) w = 0.0;
  out.bias = {0.0, 1000.0, 0.0};
  const auto p = pseudo_label(hot, x, 1.0);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->rp, 1u);
  EXPECT_EQ(p->confidence, 1.0);

  const auto batch = separable_batch({"BLU", 1}, kRps, kAps, 4, 2, false);
  for (const auto& l : pseudo_label_batch(m, batch.x, 1.0)) EXPECT_FALSE(l.has_value());
  for (const auto& l : pseudo_label_batch(m, batch.x, 0.0)) EXPECT_TRUE(l.has_value());
}

TEST(Adapt, PreconditionsAndEmptyBatch) {
  auto s = pretrained();
  EXPECT_THROW(adapt_unsupervised(s, separable_batch({"S7", 1}, kRps, kAps, 2, 1, false),
                                  quick_config()),
               PreconditionError);
  const auto before = s.model;
  DomainBatch empty{{"BLU", 1}, nn::Matrix(0, kAps), {}, {}};
  const auto r = adapt_unsupervised(s, empty, quick_config());
  EXPECT_TRUE(r.skipped);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(s.model, before);
}

TEST(Adapt, StagesFreezeTheRightBlocks) {
  auto s = pretrained();
  const auto batch = separable_batch({"BLU", 1}, kRps, kAps, 6, 5, false, 0.08);
  model::MlvaeModel start, after_stage1;
  const auto observer = [&](AdaptPoint p, const model::MlvaeModel& m) {
    (p == AdaptPoint::kBeforeStage1 ? start : after_stage1) = m;
  };
  const auto r = adapt_unsupervised(s, batch, quick_config(), observer);
  EXPECT_TRUE(r.classifier_frozen_in_stage1);
  EXPECT_TRUE(r.encoder_decoder_frozen_in_stage2);
  // Stage 1: classifier bit-identical, encoder moved.
  EXPECT_EQ(model::parameter_checksum(start, model::Group::kClassifier),
            model::parameter_checksum(after_stage1, model::Group::kClassifier));
  EXPECT_GT(model::parameter_drift_linf(start, after_stage1, model::Group::kEncoder), 0.0);
  // Stage 2: encoder and decoder bit-identical, classifier moved.
  EXPECT_EQ(model::parameter_checksum(after_stage1, model::Group::kEncoder),
            model::parameter_checksum(s.model, model::Group::kEncoder));
  EXPECT_EQ(model::parameter_checksum(after_stage1, model::Group::kDecoder),
            model::parameter_checksum(s.model, model::Group::kDecoder));
  EXPECT_GT(model::parameter_drift_linf(after_stage1, s.model, model::Group::kClassifier), 0.0);

  EXPECT_EQ(r.stage1_curve.size(), 10u);
  EXPECT_EQ(r.stage2_curve.size(), 10u);
  EXPECT_EQ(r.pseudo_labels, batch.size());
  EXPECT_EQ(r.rejected, 0u);
  EXPECT_EQ(r.rejected_fraction, 0.0);
  EXPECT_TRUE(std::isfinite(r.total_loss));
  EXPECT_FALSE(s.registry.is_known("S7"));
  EXPECT_EQ(s.registry.history().back().type, EventType::kAdapt);
  EXPECT_TRUE(s.noise.contains({"BLU", 1}));
}

TEST(Adapt, TauRejectsEverything) {
  auto s = pretrained();
  auto cfg = quick_config();
  cfg.tau = 1.0;
  const auto batch = separable_batch({"BLU", 1}, kRps, kAps, 4, 5, false);
  const auto r = adapt_unsupervised(s, batch, cfg);
  EXPECT_EQ(r.pseudo_labels, 0u);
  EXPECT_EQ(r.rejected, batch.size());
  EXPECT_EQ(r.rejected_fraction, 1.0);
  EXPECT_TRUE(r.stage2_curve.empty());
}

TEST(Adapt, StageOneChangesPseudoLabelsUnderDeviceOffset) {
  auto s = pretrained();
  const auto batch = separable_batch({"BLU", 1}, kRps, kAps, 6, 5, false, 0.25);
  std::vector<std::optional<PseudoLabel>> before, after;
  const auto observer = [&](AdaptPoint p, const model::MlvaeModel& m) {
    (p == AdaptPoint::kBeforeStage1 ? before : after) = pseudo_label_batch(m, batch.x, 0.0);
  };
  adapt_unsupervised(s, batch, quick_config(), observer);
  ASSERT_EQ(before.size(), after.size());
  bool differs = false;
  for (std::size_t i = 0; i < before.size(); ++i) {
    differs |= before[i]->rp != after[i]->rp || before[i]->confidence != after[i]->confidence;
  }
  EXPECT_TRUE(differs);
}

TEST(Adapt, ZeroShiftBatchBarelyMovesParameters) {
  // The batch is the pretraining data itself, seen again unlabeled.
  auto s = make_learner(tiny_arch(kAps, kRps), 1, 1);
  const auto train = separable_batch({"BLU", 0}, kRps, kAps, 8, 10);
  auto cfg = quick_config();
  cfg.pretrain_epochs = 300;
  pretrain(s, train, cfg);
  auto unlabeled = train;
  unlabeled.labels.clear();
  AdaptationConfig adapt = AdaptationConfig{};
  adapt.seed = cfg.seed;
  const auto r = adapt_unsupervised(s, unlabeled, adapt);
  RecordProperty("encoder_drift_linf", std::to_string(r.encoder_drift_linf));
  EXPECT_LT(r.encoder_drift_linf, 1e-3);
  EXPECT_LT(r.decoder_drift_linf, 1e-3);
}

TEST(Lifecycle, AccessLogShowsNoReplay) {
  AccessLog log;
  auto s = pretrained(&log);
  const auto cfg = quick_config();
  onboard_device(s, separable_batch({"S7", 1}, kRps, kAps, 5, 2), cfg, &log);
  adapt_unsupervised(s, separable_batch({"BLU", 2}, kRps, kAps, 3, 3, false), cfg, {}, &log);
  adapt_unsupervised(s, separable_batch({"S7", 2}, kRps, kAps, 3, 4, false), cfg, {}, &log);
  const auto& e = log.entries();
  ASSERT_EQ(e.size(), 4u);
  EXPECT_EQ(e[0].operation, "pretrain");
  EXPECT_EQ(e[1].operation, "onboard_device");
  EXPECT_EQ(e[1].key, (DomainKey{"S7", 1}));
  EXPECT_EQ(e[2].key, (DomainKey{"BLU", 2}));
  EXPECT_EQ(e[3].key, (DomainKey{"S7", 2}));
}

TEST(Lifecycle, FullPipelineIsBitReproducible) {
  const auto run = [] {
    auto s = pretrained(nullptr, 9);
    const auto cfg = quick_config();
    onboard_device(s, separable_batch({"S7", 1}, kRps, kAps, 5, 2, true, 0.1), cfg);
    adapt_unsupervised(s, separable_batch({"BLU", 2}, kRps, kAps, 3, 3, false, 0.05), cfg);
    adapt_unsupervised(s, separable_batch({"S7", 2}, kRps, kAps, 3, 4, false, 0.12), cfg);
    return s;
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.noise, b.noise);
  EXPECT_EQ(a.memory.pooled(), b.memory.pooled());
  EXPECT_EQ(a.registry.history().size(), b.registry.history().size());
}

}  // namespace
}  // namespace dailoc::incremental

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
#include <sstream>

#include "dailoc/common/errors.hpp"
#include "dailoc/eval/metrics.hpp"
#include "dailoc/eval/report.hpp"
#include "dailoc/eval/timeline.hpp"
#include "dailoc/incremental/lifecycle.hpp"
#include "dailoc/sim/scenario.hpp"
#include "fixtures.hpp"

namespace dailoc::eval {
namespace {

const io::CoordinateTable kCoords{{{0, 0, 0}, {1, 2, 2}, {3, 4, 0}}};

TEST(Euclidean, ClosedForms) {
  EXPECT_EQ(euclidean_error(1, 1, kCoords), 0.0);
  EXPECT_EQ(euclidean_error(0, 1, kCoords), 3.0);
  EXPECT_EQ(euclidean_error(0, 2, kCoords), 5.0);
  EXPECT_EQ(euclidean_error(2, 0, kCoords), 5.0);
  EXPECT_THROW(euclidean_error(0, 3, kCoords), MetricError);
}

TEST(Stats, LinearPercentiles) {
  const auto s = summarize_errors({4.0, 1.0, 3.0, 2.0});
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  // Position 0.9 * 3 = 2.7 between 3 and 4.
  EXPECT_DOUBLE_EQ(s.p90, 3.7);
  EXPECT_DOUBLE_EQ(s.max, 4.0);
  const auto one = summarize_errors({2.0});
  EXPECT_EQ(one.median, 2.0);
  EXPECT_EQ(one.p90, 2.0);
  EXPECT_THROW(summarize_errors({}), MetricError);
}

// Classifier forced to a single RP regardless of input.
model::MlvaeModel constant_predictor(std::size_t rp) {
  auto m = model::make_model(testing::tiny_arch(4, 3), 1);
  auto& out = m.layer(model::LayerId::kClassifierOut);
  for (auto& w : out.weights.values()) w = 0.0;
  out.bias.assign(3, 0.0);
  out.bias[rp] = 50.0;
  return m;
}

incremental::DomainBatch probe_with_labels(std::vector<std::size_t> labels) {
  auto b = testing::separable_batch({"S7", 2}, 1, 4, labels.size(), 5);
  b.labels = std::move(labels);
  return b;
}

TEST(PseudoLabelError, ConstantPredictorGivesItsDistance) {
  const auto m = constant_predictor(2);
  EXPECT_DOUBLE_EQ(pseudo_label_error(m, probe_with_labels({0, 0, 0, 0}), kCoords), 5.0);
  EXPECT_DOUBLE_EQ(pseudo_label_error(m, probe_with_labels({2, 2}), kCoords), 0.0);
  EXPECT_DOUBLE_EQ(pseudo_label_error(m, probe_with_labels({0, 1}), kCoords),
                   0.5 * (5.0 + std::sqrt(4.0 + 4.0 + 4.0)));
}

TEST(PseudoLabelError, PerfectClassifierGivesZero) {
  auto model = model::make_model(testing::tiny_arch(8, 3), 5);
  model::DomainNoiseBuffer noise(1, 4);
  const auto batch = testing::separable_batch({"BLU", 0}, 3, 8, 10, 1);
  incremental::AdaptationConfig cfg;
  cfg.pretrain_epochs = 200;
  cfg.batch_size = 8;
  ASSERT_EQ(incremental::pretrain_offline(model, noise, batch, cfg).train_accuracy, 1.0);
  EXPECT_EQ(pseudo_label_error(model, batch, kCoords), 0.0);
  EXPECT_EQ(evaluate_domain(model, batch, kCoords).max, 0.0);
}

TEST(PseudoLabelError, RejectsUnusableProbes) {
  const auto m = constant_predictor(0);
  EXPECT_THROW(pseudo_label_error(m, probe_with_labels({}), kCoords), MetricError);
  auto unlabeled = probe_with_labels({0, 1});
  unlabeled.labels.clear();
  EXPECT_THROW(pseudo_label_error(m, unlabeled, kCoords), MetricError);
  auto soft = model::make_model(testing::tiny_arch(4, 3), 2);
  EXPECT_THROW(pseudo_label_error(soft, probe_with_labels({0, 1}), kCoords, 1.0), MetricError);
}

TEST(Forgetting, SingleDomainIsPlainMeanEd) {
  const auto m = constant_predictor(1);
  const auto test = probe_with_labels({0, 2, 1});
  const DomainKey key{"S7", 2};
  const std::vector<TimelineCheckpoint> cps{{"pretrain S7@2", m, {key}}};
  const auto f = forgetting_report(
      cps, [&](const DomainKey& k) { return k == key ? &test : nullptr; }, kCoords);
  ASSERT_EQ(f.cells.size(), 1u);
  ASSERT_EQ(f.cells[0].size(), 1u);
  EXPECT_DOUBLE_EQ(*f.cells[0][0], evaluate_domain(m, test, kCoords).mean);
}

TEST(Forgetting, LowerTriangleAndMissingSplit) {
  const auto a = probe_with_labels({0, 1});
  const auto b = probe_with_labels({2, 2});
  const DomainKey ka{"BLU", 0}, kb{"S7", 1};
  const std::vector<TimelineCheckpoint> cps{{"pretrain", constant_predictor(0), {ka}},
                                            {"onboard", constant_predictor(2), {ka, kb}}};
  const auto lookup = [&](const DomainKey& k) -> const incremental::DomainBatch* {
    if (k == ka) return &a;
    if (k == kb) return &b;
    return nullptr;
  };
  const auto f = forgetting_report(cps, lookup, kCoords);
  ASSERT_EQ(f.domains.size(), 2u);
  EXPECT_FALSE(f.cells[0][1].has_value());
  for (const auto& row : f.cells) {
    for (const auto& v : row) {
      if (v) {
        EXPECT_GE(*v, 0.0);
      }
    }
  }
  EXPECT_DOUBLE_EQ(*f.cells[0][0], 1.5);
  EXPECT_DOUBLE_EQ(*f.cells[1][1], 0.0);
  EXPECT_THROW(forgetting_report({}, lookup, kCoords), MetricError);
  EXPECT_THROW(forgetting_report(cps, [](const DomainKey&) -> const incremental::DomainBatch* {
                 return nullptr;
               }, kCoords),
               MetricError);
}

class SmallTimeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sim::ScenarioSpec spec;
    spec.seed = 4;
    spec.n_epochs = 3;
    spec.roster.resize(2);
    spec.samples_per_rp = 4;
    spec.test_samples_per_rp = 2;
    scenario_ = new sim::Scenario(sim::generate_scenario(spec));
    TimelineOptions opt;
    opt.arch = testing::tiny_arch(0, 0);
    opt.train.pretrain_epochs = 30;
    opt.train.onboard_epochs = 5;
    opt.train.stage1_epochs = 3;
    opt.train.stage2_epochs = 3;
    result_ = new TimelineResult(run_timeline(*scenario_, opt));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete scenario_;
  }
  static sim::Scenario* scenario_;
  static TimelineResult* result_;
};

sim::Scenario* SmallTimeline::scenario_ = nullptr;
TimelineResult* SmallTimeline::result_ = nullptr;

TEST_F(SmallTimeline, HeatmapHasTwoByThreeCells) {
  const auto& r = result_->report;
  EXPECT_EQ(r.devices, (std::vector<std::string>{"BLU", "HTC"}));
  EXPECT_EQ(r.cells.size(), 6u);
  for (const auto& d : r.devices) {
    for (std::uint32_t t = 0; t < 3; ++t) {
      const auto* c = r.find({d, t});
      ASSERT_NE(c, nullptr) << d << "@" << t;
      EXPECT_GE(c->stats.count, 1u);
      EXPECT_GE(c->stats.mean, 0.0);
    }
  }
  // HTC is unknown at epoch 0 and onboarded at epoch 1.
  EXPECT_FALSE(r.find({"HTC", 0})->known);
  EXPECT_TRUE(r.find({"HTC", 1})->known);

  const auto text = render_text(r);
  std::istringstream lines(text);
  std::string line;
  int heat_rows = 0;
  bool in_heat = false;
  while (std::getline(lines, line)) {
    if (line.starts_with("mean ED (m) by device")) {
      in_heat = true;
      std::getline(lines, line);  // header
      continue;
    }
    if (in_heat) {
      if (line.empty()) break;
      std::istringstream cells(line);
      std::string device, cell;
      cells >> device;
      int n = 0;
      while (cells >> cell) ++n;
      EXPECT_EQ(n, 3) << line;
      ++heat_rows;
    }
  }
  EXPECT_EQ(heat_rows, 2);
  // Exactly one cell (HTC at epoch 0) is marked unknown.
  EXPECT_EQ(std::count(text.begin(), text.end(), '*'), 2);  // legend + cell
}

TEST_F(SmallTimeline, PseudoLabelAndForgettingSections) {
  const auto& r = result_->report;
  // BLU adapts at epochs 1 and 2; HTC at epoch 2.
  EXPECT_EQ(r.pseudo.size(), 3u);
  ASSERT_TRUE(r.forgetting.has_value());
  EXPECT_EQ(r.forgetting->events.size(), 1u + 1u + 2u + 1u);
  EXPECT_EQ(r.forgetting->domains.size(), 2u);
  for (const auto& row : r.forgetting->cells) {
    for (const auto& v : row) {
      if (v) {
        EXPECT_GE(*v, 0.0);
      }
    }
  }
  for (const auto& a : result_->adapted) {
    EXPECT_TRUE(a.classifier_frozen_in_stage1);
    EXPECT_TRUE(a.encoder_decoder_frozen_in_stage2);
  }
}

TEST_F(SmallTimeline, ReportSerializationRoundTrips) {
  const auto& r = result_->report;
  const auto back = report_from_json(to_json(r));
  EXPECT_EQ(back, r);
  EXPECT_EQ(render_text(back), render_text(r));
  EXPECT_EQ(render_tsv(back), render_tsv(r));
  auto bad = to_json(r);
  bad["schema"] = "other";
  EXPECT_THROW(report_from_json(bad), SchemaError);

  const auto tsv = render_tsv(r);
  EXPECT_TRUE(tsv.starts_with("table\tdevice\tepoch\tepoch_label\tevent\tmetric\tvalue\n"));
  std::istringstream rows(tsv);
  std::string row;
  while (std::getline(rows, row)) EXPECT_EQ(std::count(row.begin(), row.end(), '\t'), 6) << row;
}

TEST_F(SmallTimeline, ConfigEchoCarriesSeeds) {
  const auto& c = result_->report.config;
  EXPECT_EQ(c.at("scenario_seed"), 4);
  EXPECT_TRUE(c.contains("learner_seed"));
  EXPECT_TRUE(c.at("train").contains("seed"));
  EXPECT_EQ(adaptation_config_from_json(c.at("train")).pretrain_epochs, 30u);
}

TEST_F(SmallTimeline, EvaluateStateMatchesFinalEpoch) {
  const auto r = evaluate_state(result_->state, *scenario_, {});
  const auto* final_cell = result_->report.find({"HTC", 2});
  ASSERT_NE(r.find({"HTC", 2}), nullptr);
  EXPECT_EQ(r.find({"HTC", 2})->stats, final_cell->stats);
}

TEST(Report, WorstCaseAndMeans) {
  EvalReport r;
  r.devices = {"A"};
  r.epoch_labels = {"T0", "T1"};
  r.cells = {{{"A", 0}, true, {2, 1.0, 1.0, 1.5, 2.0}}, {{"A", 1}, true, {2, 3.0, 3.0, 3.5, 4.0}}};
  EXPECT_DOUBLE_EQ(r.mean_ed(), 2.0);
  EXPECT_DOUBLE_EQ(r.worst_case_ed(), 4.0);
  EXPECT_DOUBLE_EQ(r.final_mean_ed(), 3.0);
}

}  // namespace
}  // namespace dailoc::eval

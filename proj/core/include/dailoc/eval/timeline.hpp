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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dailoc/eval/metrics.hpp"
#include "dailoc/eval/report.hpp"
#include "dailoc/incremental/lifecycle.hpp"
#include "dailoc/sim/scenario.hpp"

namespace dailoc::eval {

struct TimelineOptions {
  model::ArchConfig arch;  // input_dim and n_rps are taken from the scenario
  incremental::AdaptationConfig train;
  std::uint64_t learner_seed = 0;
  std::size_t memory_capacity = 1;
  std::vector<std::string> order;  // onboarding order of non-base devices; empty = roster order
  std::size_t n_epochs = 0;        // 0 = every scenario epoch
  bool track_forgetting = true;
  bool track_pseudo_labels = true;
};

struct TimelineResult {
  EvalReport report;
  incremental::PretrainReport pretrain;
  std::vector<incremental::OnboardReport> onboarded;
  std::vector<incremental::AdaptReport> adapted;
  incremental::LearnerState state;
};

// Runs the deployment lifetime: offline pretraining of the base device at
// epoch 0; at every later epoch t, unsupervised adaptation of every known
// device on its epoch-t data followed by onboarding of the next device in
// `order`. After each epoch all devices are evaluated on that epoch's
// test splits.
TimelineResult run_timeline(const sim::Scenario& scenario, const TimelineOptions& options);

// Evaluates a learner on every test split of a scenario (all devices,
// all epochs).
EvalReport evaluate_state(const incremental::LearnerState& state, const sim::Scenario& scenario,
                          nlohmann::json config);

incremental::DomainBatch test_batch(const sim::Scenario& scenario, const DomainKey& key);

nlohmann::json to_json(const incremental::AdaptationConfig& config);
incremental::AdaptationConfig adaptation_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const incremental::AdaptReport& report);
nlohmann::json to_json(const incremental::OnboardReport& report);
nlohmann::json to_json(const incremental::PretrainReport& report);

}  // namespace dailoc::eval

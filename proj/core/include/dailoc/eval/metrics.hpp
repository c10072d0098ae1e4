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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dailoc/common/domain_key.hpp"
#include "dailoc/incremental/batch.hpp"
#include "dailoc/incremental/lifecycle.hpp"
#include "dailoc/io/dataset.hpp"
#include "dailoc/model/mlvae.hpp"

namespace dailoc::eval {

// Distance in meters between the coordinates of two RPs.
double euclidean_error(std::size_t pred_rp, std::size_t true_rp, const io::CoordinateTable& coords);

struct ErrorStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;

  bool operator==(const ErrorStats&) const = default;
};

// Percentiles interpolate linearly between order statistics.
ErrorStats summarize_errors(std::vector<double> errors);
double percentile(std::span<const double> sorted, double q);

std::vector<std::size_t> predict_rps(const model::MlvaeModel& model, const nn::Matrix& x);

// Per-sample ED of the model's RP prediction on a labeled batch.
std::vector<double> localization_errors(const model::MlvaeModel& model,
                                        const incremental::DomainBatch& batch,
                                        const io::CoordinateTable& coords);
ErrorStats evaluate_domain(const model::MlvaeModel& model, const incremental::DomainBatch& batch,
                           const io::CoordinateTable& coords);

// Mean ED between pseudo-labels (at confidence threshold tau) and the true
// RPs of a held-out labeled probe set. The pipeline point is whatever state
// the model is in when this is called.
double pseudo_label_error(const model::MlvaeModel& model, const incremental::DomainBatch& probe,
                          const io::CoordinateTable& coords, double tau = 0.0);

struct TimelineCheckpoint {
  std::string event;  // e.g. "onboard HTC@1"
  model::MlvaeModel model;
  std::vector<DomainKey> onboarded;  // supervised domains seen up to this event
};

struct ForgettingMatrix {
  std::vector<std::string> events;
  std::vector<DomainKey> domains;
  // cells[e][d]: mean ED on domain d's test split after event e; empty when d
  // was not yet onboarded at e.
  std::vector<std::vector<std::optional<double>>> cells;

  bool operator==(const ForgettingMatrix&) const = default;
};

// `test_for` maps a domain to its labeled test batch; it returns nullptr
// when the split is missing.
ForgettingMatrix forgetting_report(
    std::span<const TimelineCheckpoint> checkpoints,
    const std::function<const incremental::DomainBatch*(const DomainKey&)>& test_for,
    const io::CoordinateTable& coords);

}  // namespace dailoc::eval

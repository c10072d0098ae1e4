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

#include "dailoc/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dailoc/common/errors.hpp"

namespace dailoc::eval {

double euclidean_error(std::size_t pred_rp, std::size_t true_rp,
                       const io::CoordinateTable& coords) {
  return distance(coords.at(pred_rp), coords.at(true_rp));
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw MetricError("percentile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ErrorStats summarize_errors(std::vector<double> errors) {
  if (errors.empty()) throw MetricError("no samples to summarize");
  std::sort(errors.begin(), errors.end());
  ErrorStats s;
  s.count = errors.size();
  s.mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(s.count);
  s.median = percentile(errors, 0.5);
  s.p90 = percentile(errors, 0.9);
  s.max = errors.back();
  return s;
}

std::vector<std::size_t> predict_rps(const model::MlvaeModel& model, const nn::Matrix& x) {
  const auto latents = model::encode(model, x);
  const nn::Matrix logits = model::classifier_logits(model, latents.z_c);
  std::vector<std::size_t> out(x.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    out[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

std::vector<double> localization_errors(const model::MlvaeModel& model,
                                        const incremental::DomainBatch& batch,
                                        const io::CoordinateTable& coords) {
  if (batch.size() == 0) throw MetricError(batch.key.to_string() + ": empty test split");
  if (!batch.labeled()) throw MetricError(batch.key.to_string() + ": test split is unlabeled");
  const auto pred = predict_rps(model, batch.x);
  std::vector<double> errors(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    errors[i] = euclidean_error(pred[i], batch.labels[i], coords);
  }
  return errors;
}

ErrorStats evaluate_domain(const model::MlvaeModel& model, const incremental::DomainBatch& batch,
                           const io::CoordinateTable& coords) {
  return summarize_errors(localization_errors(model, batch, coords));
}

double pseudo_label_error(const model::MlvaeModel& model, const incremental::DomainBatch& probe,
                          const io::CoordinateTable& coords, double tau) {
  if (probe.size() == 0) throw MetricError("pseudo_label_error: empty probe set");
  if (!probe.labeled()) throw MetricError("pseudo_label_error: probe set is unlabeled");
  const auto labels = incremental::pseudo_label_batch(model, probe.x, tau);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    sum += euclidean_error(labels[i]->rp, probe.labels[i], coords);
    ++n;
  }
  if (n == 0) throw MetricError("pseudo_label_error: every probe sample was rejected by tau");
  return sum / static_cast<double>(n);
}

ForgettingMatrix forgetting_report(
    std::span<const TimelineCheckpoint> checkpoints,
    const std::function<const incremental::DomainBatch*(const DomainKey&)>& test_for,
    const io::CoordinateTable& coords) {
  if (checkpoints.empty()) throw MetricError("forgetting_report: no lifecycle checkpoints");
  ForgettingMatrix m;
  for (const auto& cp : checkpoints) {
    for (const auto& d : cp.onboarded) {
      if (std::find(m.domains.begin(), m.domains.end(), d) == m.domains.end()) {
        m.domains.push_back(d);
      }
    }
  }
  for (const auto& cp : checkpoints) {
    m.events.push_back(cp.event);
    std::vector<std::optional<double>> row(m.domains.size());
    for (std::size_t j = 0; j < m.domains.size(); ++j) {
      const auto& d = m.domains[j];
      if (std::find(cp.onboarded.begin(), cp.onboarded.end(), d) == cp.onboarded.end()) continue;
      const auto* test = test_for(d);
      if (test == nullptr) {
        throw MetricError("forgetting_report: no test split for " + d.to_string());
      }
      row[j] = evaluate_domain(cp.model, *test, coords).mean;
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

}  // namespace dailoc::eval

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

#include "dailoc/incremental/batch.hpp"

#include "dailoc/common/errors.hpp"

namespace dailoc::incremental {

DomainBatch make_batch(const DomainKey& key, std::span<const io::FingerprintRecord> records,
                       LabelUse labels) {
  DomainBatch batch;
  batch.key = key;
  if (records.empty()) return batch;

  const std::size_t n_aps = records.front().rss.size();
  std::vector<double> values;
  values.reserve(records.size() * n_aps);
  std::size_t with_label = 0;
  for (const auto& r : records) {
    if (r.device_id != key.device || r.epoch != key.epoch) {
      throw InputError("sample " + std::to_string(r.sample_id) + " belongs to " +
                       DomainKey{r.device_id, r.epoch}.to_string() + ", not " +
                       key.to_string());
    }
    if (r.rss.size() != n_aps) {
      throw ShapeError("sample " + std::to_string(r.sample_id) + " has " +
                       std::to_string(r.rss.size()) + " APs, expected " +
                       std::to_string(n_aps));
    }
    const auto x = io::standardize_rss(r.rss, r.sample_id);
    values.insert(values.end(), x.begin(), x.end());
    batch.sample_ids.push_back(r.sample_id);
    if (r.rp) ++with_label;
  }
  batch.x = nn::Matrix(records.size(), n_aps, std::move(values));

  if (labels == LabelUse::kKeep && with_label > 0) {
    if (with_label != records.size()) {
      throw InputError(key.to_string() + ": " + std::to_string(records.size() - with_label) +
                       " of " + std::to_string(records.size()) + " samples are unlabeled");
    }
    batch.labels.reserve(records.size());
    for (const auto& r : records) batch.labels.push_back(*r.rp);
  }
  return batch;
}

}  // namespace dailoc::incremental

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
#include <span>
#include <string>
#include <vector>

#include "dailoc/common/domain_key.hpp"
#include "dailoc/io/dataset.hpp"
#include "dailoc/nn/matrix.hpp"

namespace dailoc::incremental {

// Standardized samples of a single domain.
struct DomainBatch {
  DomainKey key;
  nn::Matrix x;                      // rows x APs, values in [0, 1]
  std::vector<std::size_t> labels;   // empty for unlabeled data
  std::vector<std::uint64_t> sample_ids;

  std::size_t size() const { return x.rows(); }
  bool labeled() const { return !labels.empty() && labels.size() == x.rows(); }
};

enum class LabelUse { kKeep, kDrop };

// Builds a batch from raw records. Every record must belong to `key`; with
// LabelUse::kKeep, labels must be present on all records or on none.
DomainBatch make_batch(const DomainKey& key, std::span<const io::FingerprintRecord> records,
                       LabelUse labels = LabelUse::kKeep);

// Records which domains each lifecycle call read data from.
class AccessLog {
 public:
  struct Entry {
    std::string operation;
    DomainKey key;
  };

  void record(std::string operation, const DomainKey& key) {
    entries_.push_back({std::move(operation), key});
  }
  const std::vector<Entry>& entries() const { return entries_; }
  void clear() { entries_.clear(); }

 private:
  std::vector<Entry> entries_;
};

}  // namespace dailoc::incremental

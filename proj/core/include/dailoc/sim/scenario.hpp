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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dailoc/common/domain_key.hpp"
#include "dailoc/io/dataset.hpp"
#include "dailoc/sim/world.hpp"

namespace dailoc::sim {

enum class SplitKind { kTrain, kOnboard, kAdapt, kTest };

std::string_view to_string(SplitKind kind);
SplitKind split_kind_from_string(std::string_view name);

struct Split {
  std::string name;
  SplitKind kind = SplitKind::kTrain;
  DomainKey key;
  bool labeled = true;
  std::vector<io::FingerprintRecord> records;
};

struct ScenarioSpec {
  std::uint64_t seed = 0;
  BuildingSpec building = building_preset("toy");
  std::vector<DeviceProfile> roster = default_roster();  // roster[0] is the base device
  std::size_t n_epochs = 6;
  std::size_t samples_per_rp = 8;       // train, onboard and adapt splits
  std::size_t test_samples_per_rp = 4;  // held-out test splits
  DriftSpec drift;
  std::vector<std::string> epoch_labels;  // empty: default labels
};

// Generated world plus its labeled/unlabeled splits:
//   train   (base device, epoch 0), labeled
//   onboard (every other device, epochs >= 1), labeled
//   adapt   (every device, epochs >= 1), unlabeled
//   test    (every device, every epoch), labeled, held out
// Sample ids are globally unique, so splits are disjoint.
struct Scenario {
  ScenarioSpec spec;
  BuildingLayout layout;
  DriftSchedule drift;
  std::vector<Split> splits;

  const std::string& base_device() const { return spec.roster.front().id; }
  io::CoordinateTable coordinates() const;
  // Throws InputError when the split does not exist.
  const Split& split(SplitKind kind, const DomainKey& key) const;
  const Split* find_split(SplitKind kind, const DomainKey& key) const;
  const DeviceProfile& device(std::string_view id) const;
};

Scenario generate_scenario(const ScenarioSpec& spec);

std::string split_name(SplitKind kind, const DomainKey& key);

// Directory layout: manifest.json, coords.csv, splits/<name>.fp
void save_scenario(const std::filesystem::path& dir, const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& dir);

}  // namespace dailoc::sim

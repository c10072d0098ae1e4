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
#include <string_view>
#include <utility>
#include <vector>

#include "dailoc/common/geometry.hpp"
#include "dailoc/common/rng.hpp"

namespace dailoc::sim {

struct AccessPoint {
  Point3 position;
  double tx_power_dbm = -30.0;       // RSS at the 1 m reference distance
  double path_loss_exponent = 3.0;

  bool operator==(const AccessPoint&) const = default;
};

struct BuildingLayout {
  std::string id;
  std::vector<Point3> rps;
  std::vector<AccessPoint> aps;
  double rp_spacing = 1.0;

  bool operator==(const BuildingLayout&) const = default;
};

// Inputs to generate_building.
struct BuildingSpec {
  std::string id = "toy";
  std::size_t n_rps = 12;
  std::size_t n_aps = 16;
  double width = 5.0;      // meters, x extent of the RP area
  double depth = 2.0;      // meters, y extent of the RP area
  double ap_margin = 4.0;  // APs may sit this far outside the RP area
  double ap_height = 2.5;
  double min_tx_dbm = -40.0;
  double max_tx_dbm = -25.0;
};

// "toy", "building1" (60 RPs, 193 APs) or "building2" (48 RPs, 168 APs).
BuildingSpec building_preset(std::string_view name);

// RPs fill a 1 m grid over the RP area in row-major order; APs are uniform
// over the area plus margin with path-loss exponents in [2, 4].
BuildingLayout generate_building(std::uint64_t seed, const BuildingSpec& spec);

// Affine dB transfer function, noise and detection floor of one handset.
struct DeviceProfile {
  std::string id;
  double gain = 1.0;
  double offset_db = 0.0;
  double noise_sigma_db = 0.0;
  double detection_floor_dbm = -100.0;
  double resolution_db = 0.0;  // reported RSS granularity; 0 keeps full precision

  bool operator==(const DeviceProfile&) const = default;
};

// BLU, HTC, S7, LG, MOTO, OP3.
std::vector<DeviceProfile> default_roster();

struct DriftEpoch {
  std::string label;
  std::vector<std::pair<std::size_t, double>> power_deltas;  // (AP, dB), new this epoch
  std::vector<std::size_t> dropped_aps;                      // newly silent APs
  double ambient_noise_db = 0.0;                             // added noise sigma

  bool operator==(const DriftEpoch&) const = default;
};

// Environmental evolution. Events accumulate: the state at epoch t is the
// sum of epochs 1..t. Epoch 0 never carries drift.
struct DriftSchedule {
  std::vector<DriftEpoch> epochs;

  std::size_t size() const { return epochs.size(); }
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& e : epochs) out.push_back(e.label);
    return out;
  }
  bool operator==(const DriftSchedule&) const = default;
};

struct DriftSpec {
  double shift_fraction = 0.3;   // share of APs receiving a power change per epoch
  double shift_sigma_db = 4.0;
  double dropout_fraction = 0.04;
  double ambient_step_db = 0.5;
  double magnitude = 1.0;  // scales every effect; draws are shared across magnitudes
};

std::vector<std::string> default_epoch_labels(std::size_t n_epochs);

DriftSchedule generate_drift(std::uint64_t seed, std::size_t n_aps, std::size_t n_epochs,
                             const DriftSpec& spec,
                             const std::vector<std::string>& labels = {});

// Cumulative per-AP state at an epoch.
struct DriftState {
  std::vector<double> power_delta;
  std::vector<bool> dropped;
  double ambient_noise_db = 0.0;
};

DriftState drift_state(const DriftSchedule& schedule, std::size_t n_aps, std::uint32_t epoch);

// One raw scan at `rp`, dBm in [-100, 0]. Per AP: log-distance path loss with
// drift, device transfer gain*RSS + offset, Gaussian noise, optional
// quantization, then anything below the detection floor (or dropped) reads -100.
std::vector<double> sample_fingerprint(const BuildingLayout& layout, std::size_t rp,
                                       const DeviceProfile& device, std::uint32_t epoch,
                                       const DriftSchedule& schedule, Rng& rng);

}  // namespace dailoc::sim

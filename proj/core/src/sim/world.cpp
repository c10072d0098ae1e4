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

#include "dailoc/sim/world.hpp"

#include <algorithm>
#include <cmath>

#include "dailoc/common/errors.hpp"
#include "dailoc/io/dataset.hpp"

namespace dailoc::sim {

BuildingSpec building_preset(std::string_view name) {
  BuildingSpec spec;
  if (name == "toy") return spec;
  if (name == "building1") {
    spec.id = "building1";
    spec.n_rps = 60;
    spec.n_aps = 193;
    spec.width = 14.0;
    spec.depth = 4.0;
    spec.ap_margin = 10.0;
    return spec;
  }
  if (name == "building2") {
    spec.id = "building2";
    spec.n_rps = 48;
    spec.n_aps = 168;
    spec.width = 11.0;
    spec.depth = 3.0;
    spec.ap_margin = 10.0;
    return spec;
  }
  throw InputError("unknown building preset '" + std::string(name) +
                   "' (expected toy, building1 or building2)");
}

BuildingLayout generate_building(std::uint64_t seed, const BuildingSpec& spec) {
  if (spec.n_rps == 0 || spec.n_aps == 0) {
    throw LayoutError("building needs at least one RP and one AP");
  }
  constexpr double kSpacing = 1.0;
  if (spec.width < 0.0 || spec.depth < 0.0) throw LayoutError("negative building extent");
  const auto cols = static_cast<std::size_t>(std::floor(spec.width / kSpacing)) + 1;
  const auto rows = static_cast<std::size_t>(std::floor(spec.depth / kSpacing)) + 1;
  if (cols * rows < spec.n_rps) {
    throw LayoutError("extent " + std::to_string(spec.width) + " x " +
                      std::to_string(spec.depth) + " m holds " + std::to_string(cols * rows) +
                      " RPs at 1 m spacing, " + std::to_string(spec.n_rps) + " requested");
  }
  BuildingLayout layout;
  layout.id = spec.id;
  layout.rp_spacing = kSpacing;
  for (std::size_t i = 0; i < spec.n_rps; ++i) {
    layout.rps.push_back({static_cast<double>(i % cols) * kSpacing,
                          static_cast<double>(i / cols) * kSpacing, 0.0});
  }
  Rng rng(mix_seed(seed, 0x6c61796f7574ULL));
  for (std::size_t i = 0; i < spec.n_aps; ++i) {
    AccessPoint ap;
    ap.position.x = rng.uniform(-spec.ap_margin, spec.width + spec.ap_margin);
    ap.position.y = rng.uniform(-spec.ap_margin, spec.depth + spec.ap_margin);
    ap.position.z = spec.ap_height;
    ap.tx_power_dbm = rng.uniform(spec.min_tx_dbm, spec.max_tx_dbm);
    ap.path_loss_exponent = rng.uniform(2.0, 4.0);
    layout.aps.push_back(ap);
  }
  return layout;
}

std::vector<DeviceProfile> default_roster() {
  // id, gain, offset, noise sigma, detection floor, resolution
  return {
      {"BLU", 1.00, 0.0, 2.0, -95.0, 1.0},  {"HTC", 0.92, -6.0, 2.5, -92.0, 1.0},
      {"S7", 1.08, 5.0, 2.0, -95.0, 1.0},   {"LG", 0.95, 3.0, 3.0, -90.0, 1.0},
      {"MOTO", 1.05, -4.0, 2.5, -93.0, 1.0}, {"OP3", 0.90, -8.0, 2.0, -94.0, 1.0},
  };
}

std::vector<std::string> default_epoch_labels(std::size_t n_epochs) {
  if (n_epochs == 6) return {"T0", "9h", "1w", "1m", "2m", "3m"};
  std::vector<std::string> labels;
  for (std::size_t t = 0; t < n_epochs; ++t) labels.push_back("T" + std::to_string(t));
  return labels;
}

DriftSchedule generate_drift(std::uint64_t seed, std::size_t n_aps, std::size_t n_epochs,
                             const DriftSpec& spec, const std::vector<std::string>& labels) {
  if (n_epochs == 0) throw InputError("drift schedule needs at least one epoch");
  if (spec.magnitude < 0.0) throw InputError("drift magnitude must be non-negative");
  const auto names = labels.empty() ? default_epoch_labels(n_epochs) : labels;
  if (names.size() != n_epochs) throw InputError("one epoch label per epoch is required");

  DriftSchedule schedule;
  schedule.epochs.resize(n_epochs);
  std::vector<bool> dropped(n_aps, false);
  for (std::size_t t = 0; t < n_epochs; ++t) {
    auto& epoch = schedule.epochs[t];
    epoch.label = names[t];
    if (t == 0) continue;
    Rng rng(mix_seed(seed, t));
    for (std::size_t ap = 0; ap < n_aps; ++ap) {
      // Every draw is consumed regardless of outcome so that schedules with
      // different magnitudes share their random numbers.
      const double pick = rng.uniform();
      const double delta = rng.normal() * spec.shift_sigma_db * spec.magnitude;
      const double drop = rng.uniform();
      if (pick < spec.shift_fraction && delta != 0.0) epoch.power_deltas.emplace_back(ap, delta);
      if (!dropped[ap] && drop < spec.dropout_fraction * spec.magnitude) {
        dropped[ap] = true;
        epoch.dropped_aps.push_back(ap);
      }
    }
    epoch.ambient_noise_db = spec.ambient_step_db * spec.magnitude;
  }
  return schedule;
}

DriftState drift_state(const DriftSchedule& schedule, std::size_t n_aps, std::uint32_t epoch) {
  if (epoch >= schedule.size()) {
    throw InputError("epoch " + std::to_string(epoch) + " outside drift schedule of " +
                     std::to_string(schedule.size()) + " epochs");
  }
  DriftState state;
  state.power_delta.assign(n_aps, 0.0);
  state.dropped.assign(n_aps, false);
  double ambient = 0.0;
  for (std::uint32_t t = 1; t <= epoch; ++t) {
    const auto& e = schedule.epochs[t];
    for (const auto& [ap, delta] : e.power_deltas) {
      if (ap >= n_aps) throw InputError("drift event names AP " + std::to_string(ap));
      state.power_delta[ap] += delta;
    }
    for (std::size_t ap : e.dropped_aps) {
      if (ap >= n_aps) throw InputError("drift event names AP " + std::to_string(ap));
      state.dropped[ap] = true;
    }
    ambient += e.ambient_noise_db;
  }
  state.ambient_noise_db = ambient;
  return state;
}

std::vector<double> sample_fingerprint(const BuildingLayout& layout, std::size_t rp,
                                       const DeviceProfile& device, std::uint32_t epoch,
                                       const DriftSchedule& schedule, Rng& rng) {
  if (rp >= layout.rps.size()) {
    throw InputError("RP " + std::to_string(rp) + " outside layout of " +
                     std::to_string(layout.rps.size()) + " RPs");
  }
  const auto drift = drift_state(schedule, layout.aps.size(), epoch);
  const double sigma = std::sqrt(device.noise_sigma_db * device.noise_sigma_db +
                                 drift.ambient_noise_db * drift.ambient_noise_db);
  const double floor = std::max(device.detection_floor_dbm, io::kRssFloorDbm);
  std::vector<double> rss(layout.aps.size());
  for (std::size_t a = 0; a < layout.aps.size(); ++a) {
    const auto& ap = layout.aps[a];
    const double d = std::max(distance(layout.rps[rp], ap.position), 0.1);
    const double path = ap.tx_power_dbm + drift.power_delta[a] -
                        10.0 * ap.path_loss_exponent * std::log10(d / 1.0);
    double v = device.gain * path + device.offset_db;
    v += sigma * rng.normal();
    if (device.resolution_db > 0.0) v = std::round(v / device.resolution_db) * device.resolution_db;
    if (drift.dropped[a] || v < floor) v = io::kRssFloorDbm;
    rss[a] = std::clamp(v, io::kRssFloorDbm, io::kRssCeilingDbm);
  }
  return rss;
}

}  // namespace dailoc::sim

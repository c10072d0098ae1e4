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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dailoc/common/geometry.hpp"

namespace dailoc::io {

inline constexpr double kRssFloorDbm = -100.0;  // also the missing-AP sentinel
inline constexpr double kRssCeilingDbm = 0.0;

// One RSS scan.
struct FingerprintRecord {
  std::uint64_t sample_id = 0;
  std::string device_id;
  std::uint32_t epoch = 0;
  std::optional<std::size_t> rp;  // absent in unlabeled splits
  std::vector<double> rss;        // dBm in [-100, 0], one entry per AP

  bool operator==(const FingerprintRecord&) const = default;
};

struct FingerprintFile {
  std::string building_id;
  std::size_t n_aps = 0;
  std::vector<FingerprintRecord> records;

  bool operator==(const FingerprintFile&) const = default;
};

// RP index -> coordinates, dense over [0, n_rps).
struct CoordinateTable {
  std::vector<Point3> coords;

  std::size_t size() const { return coords.size(); }
  // Throws MetricError for an unknown RP.
  const Point3& at(std::size_t rp) const;

  bool operator==(const CoordinateTable&) const = default;
};

// v -> (v + 100) / 100, so -100 dBm -> 0 and 0 dBm -> 1.
double standardize_rss(double dbm);
double destandardize_rss(double normalized);
// Throws DataError naming the sample and AP on an out-of-range entry.
std::vector<double> standardize_rss(std::span<const double> dbm, std::uint64_t sample_id = 0);

// Text format: header `#dailoc-fp v1 building=<id> aps=<n>`, then one record per
// line `sample_id,device_id,epoch,rp_label|_,rss_0,...,rss_{n-1}`.
void save_dataset(const std::filesystem::path& path, const FingerprintFile& file);
FingerprintFile load_dataset(const std::filesystem::path& path);

// `rp_id,x,y,z` per line.
void save_coordinates(const std::filesystem::path& path, const CoordinateTable& table);
CoordinateTable load_coordinates(const std::filesystem::path& path);

// Shortest decimal text that parses back to the identical double.
std::string format_real(double value);

}  // namespace dailoc::io

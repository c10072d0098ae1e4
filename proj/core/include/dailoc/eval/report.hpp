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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dailoc/common/domain_key.hpp"
#include "dailoc/eval/metrics.hpp"

namespace dailoc::eval {

struct CellStats {
  DomainKey key;
  bool known = true;  // device was known to the model when evaluated
  ErrorStats stats;

  bool operator==(const CellStats&) const = default;
};

struct PseudoLabelErrors {
  DomainKey key;
  double before = 0.0;  // pseudo-label ED before stage 1
  double after = 0.0;   // after stage 1

  bool operator==(const PseudoLabelErrors&) const = default;
};

struct EvalReport {
  nlohmann::json config;  // config echo including every seed
  std::vector<std::string> devices;
  std::vector<std::string> epoch_labels;  // indexed by time epoch
  std::vector<CellStats> cells;
  std::vector<PseudoLabelErrors> pseudo;
  std::optional<ForgettingMatrix> forgetting;

  const CellStats* find(const DomainKey& key) const;
  double mean_ed() const;          // mean of cell means
  double worst_case_ed() const;    // max over every test sample
  double final_mean_ed() const;    // mean of cell means at the last epoch

  bool operator==(const EvalReport&) const = default;
};

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

std::string render_text(const EvalReport& report);
std::string render_tsv(const EvalReport& report);

// Writes report.txt and report.tsv into `dir`.
void write_report(const std::filesystem::path& dir, const EvalReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace dailoc::eval

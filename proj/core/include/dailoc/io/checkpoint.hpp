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

#include <filesystem>

#include <nlohmann/json.hpp>

#include "dailoc/incremental/lifecycle.hpp"

namespace dailoc::io {

// Full learner state: architecture, every layer, the domain noise buffer, the
// representation memory (with its sampler state), the registry and the seed.
// Reals are stored as shortest round-trip text, so save/load is bit-exact.
nlohmann::json checkpoint_to_json(const incremental::LearnerState& state);
incremental::LearnerState checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const incremental::LearnerState& state);
incremental::LearnerState load_checkpoint(const std::filesystem::path& path);

}  // namespace dailoc::io

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

#include "dailoc/common/domain_key.hpp"
#include "dailoc/incremental/batch.hpp"
#include "dailoc/model/mlvae.hpp"

namespace dailoc::testing {

// Narrow network for fast tests.
model::ArchConfig tiny_arch(std::size_t n_aps, std::size_t n_rps, std::size_t latent = 4);

// Linearly separable toy domain: RP r lights up AP r % n_aps, every other AP
// sits near the floor. `shift` is added to all standardized values.
incremental::DomainBatch separable_batch(const DomainKey& key, std::size_t n_rps,
                                         std::size_t n_aps, std::size_t per_rp,
                                         std::uint64_t seed, bool labeled = true,
                                         double shift = 0.0);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace dailoc::testing

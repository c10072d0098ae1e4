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

#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "dailoc/common/rng.hpp"

namespace dailoc::testing {

model::ArchConfig tiny_arch(std::size_t n_aps, std::size_t n_rps, std::size_t latent) {
  model::ArchConfig a;
  a.input_dim = n_aps;
  a.n_rps = n_rps;
  a.trunk1 = 24;
  a.trunk2 = 16;
  a.latent_dim = latent;
  a.class_hidden = 12;
  a.decoder1 = 16;
  a.decoder2 = 24;
  a.classifier_hidden = 12;
  return a;
}

incremental::DomainBatch separable_batch(const DomainKey& key, std::size_t n_rps,
                                         std::size_t n_aps, std::size_t per_rp,
                                         std::uint64_t seed, bool labeled, double shift) {
  Rng rng(seed);
  incremental::DomainBatch b;
  b.key = key;
  b.x = nn::Matrix(n_rps * per_rp, n_aps);
  std::uint64_t id = 0;
  for (std::size_t rp = 0; rp < n_rps; ++rp) {
    for (std::size_t s = 0; s < per_rp; ++s) {
      const std::size_t row = rp * per_rp + s;
      for (std::size_t ap = 0; ap < n_aps; ++ap) {
        const double base = ap == rp % n_aps ? 0.8 : 0.1;
        b.x(row, ap) = std::clamp(base + shift + rng.uniform(-0.03, 0.03), 0.0, 1.0);
      }
      if (labeled) b.labels.push_back(rp);
      b.sample_ids.push_back(id++);
    }
  }
  return b;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("dailoc-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dailoc::testing

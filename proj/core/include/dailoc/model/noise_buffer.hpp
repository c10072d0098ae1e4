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
#include <map>
#include <span>
#include <vector>

#include "dailoc/common/domain_key.hpp"
#include "dailoc/nn/matrix.hpp"

namespace dailoc::model {

// One fixed reparameterization noise vector per domain.
//
// An entry is drawn from N(0, I) the first time its key is seen and is never
// modified afterwards. The draw is seeded from (buffer seed, key), so the
// vector for a key does not depend on the order in which domains appear.
// Insertion is single-writer; std::map keeps references to existing entries
// stable across later insertions.
class DomainNoiseBuffer {
 public:
  explicit DomainNoiseBuffer(std::uint64_t seed = 0, std::size_t dim = 16)
      : seed_(seed), dim_(dim) {}

  const std::vector<double>& get_or_create(const DomainKey& key);
  const std::vector<double>* find(const DomainKey& key) const;
  bool contains(const DomainKey& key) const { return entries_.contains(key); }

  // Restores a persisted entry. Throws if the key exists with other contents
  // or the length is wrong.
  void restore(const DomainKey& key, std::vector<double> eps);

  // `rows` copies of the key's noise vector, creating it if needed.
  nn::Matrix noise_rows(const DomainKey& key, std::size_t rows);

  std::uint64_t seed() const { return seed_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const std::map<DomainKey, std::vector<double>>& entries() const { return entries_; }

  bool operator==(const DomainNoiseBuffer&) const = default;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
  std::map<DomainKey, std::vector<double>> entries_;
};

// z_D = mu_D + sigma_D * eps_D for a single sample, with eps_D looked up (or
// lazily created) in `buffer`.
std::vector<double> reparameterize_domain(std::span<const double> mu_d,
                                          std::span<const double> sigma_d,
                                          const DomainKey& key, DomainNoiseBuffer& buffer);

}  // namespace dailoc::model

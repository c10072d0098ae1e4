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

#include "dailoc/model/noise_buffer.hpp"

#include <algorithm>

#include "dailoc/common/errors.hpp"
#include "dailoc/common/rng.hpp"

namespace dailoc::model {

const std::vector<double>& DomainNoiseBuffer::get_or_create(const DomainKey& key) {
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  Rng rng(mix_seed(mix_seed(seed_, hash_string(key.device)), key.epoch));
  std::vector<double> eps(dim_);
  for (double& v : eps) v = rng.normal();
  return entries_.emplace(key, std::move(eps)).first->second;
}

const std::vector<double>* DomainNoiseBuffer::find(const DomainKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void DomainNoiseBuffer::restore(const DomainKey& key, std::vector<double> eps) {
  if (eps.size() != dim_) {
    throw ShapeError("noise buffer entry for " + key.to_string() + " has length " +
                     std::to_string(eps.size()) + ", expected " + std::to_string(dim_));
  }
  auto [it, inserted] = entries_.emplace(key, eps);
  if (!inserted && it->second != eps) {
    throw Error("noise buffer entry for " + key.to_string() + " is immutable");
  }
}

nn::Matrix DomainNoiseBuffer::noise_rows(const DomainKey& key, std::size_t rows) {
  const auto& eps = get_or_create(key);
  nn::Matrix out(rows, dim_);
  for (std::size_t r = 0; r < rows; ++r) std::ranges::copy(eps, out.row(r).begin());
  return out;
}

std::vector<double> reparameterize_domain(std::span<const double> mu_d,
                                          std::span<const double> sigma_d,
                                          const DomainKey& key, DomainNoiseBuffer& buffer) {
  if (mu_d.size() != buffer.dim() || sigma_d.size() != buffer.dim()) {
    throw ShapeError("reparameterize_domain: expected " + std::to_string(buffer.dim()) +
                     "-dimensional mu and sigma");
  }
  const auto& eps = buffer.get_or_create(key);
  std::vector<double> z(mu_d.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = mu_d[i] + sigma_d[i] * eps[i];
  return z;
}

}  // namespace dailoc::model

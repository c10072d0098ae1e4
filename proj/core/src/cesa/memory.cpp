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

#include "dailoc/cesa/memory.hpp"

#include <algorithm>

#include "dailoc/common/errors.hpp"

namespace dailoc::cesa {

RepresentationMemory::RepresentationMemory(std::size_t n_rps, std::size_t latent_dim,
                                           std::size_t capacity, std::uint64_t seed)
    : latent_dim_(latent_dim),
      capacity_(capacity),
      seed_(seed),
      rng_(seed),
      slots_(n_rps),
      seen_(n_rps, 0) {
  if (capacity == 0) throw InputError("representation memory capacity must be at least 1");
}

void RepresentationMemory::check_rp(std::size_t rp) const {
  if (rp >= slots_.size()) {
    throw InputError("representation memory: RP " + std::to_string(rp) + " outside " +
                     std::to_string(slots_.size()) + " RPs");
  }
}

bool RepresentationMemory::reservoir_insert(std::size_t rp, std::span<const double> z_c) {
  check_rp(rp);
  if (z_c.size() != latent_dim_) {
    throw ShapeError("representation memory stores " + std::to_string(latent_dim_) +
                     "-dimensional latents, got " + std::to_string(z_c.size()));
  }
  auto& slot = slots_[rp];
  const std::uint64_t k = ++seen_[rp];
  std::vector<double> entry(z_c.begin(), z_c.end());
  if (slot.size() < capacity_) {
    slot.push_back(std::move(entry));
    return true;
  }
  // Keep with probability c / k.
  if (rng_.index(static_cast<std::size_t>(k)) < capacity_) {
    slot[rng_.index(capacity_)] = std::move(entry);
    return true;
  }
  return false;
}

const std::vector<std::vector<double>>& RepresentationMemory::prototypes(std::size_t rp) const {
  check_rp(rp);
  return slots_[rp];
}

nn::Matrix RepresentationMemory::pooled() const {
  nn::Matrix out(total(), latent_dim_);
  std::size_t row = 0;
  for (const auto& slot : slots_) {
    for (const auto& z : slot) std::ranges::copy(z, out.row(row++).begin());
  }
  return out;
}

std::vector<std::size_t> RepresentationMemory::pooled_labels() const {
  std::vector<std::size_t> labels;
  for (std::size_t rp = 0; rp < slots_.size(); ++rp) labels.insert(labels.end(), slots_[rp].size(), rp);
  return labels;
}

std::size_t RepresentationMemory::total() const {
  std::size_t n = 0;
  for (const auto& slot : slots_) n += slot.size();
  return n;
}

std::uint64_t RepresentationMemory::seen(std::size_t rp) const {
  check_rp(rp);
  return seen_[rp];
}

bool RepresentationMemory::covers_all_rps() const {
  return std::ranges::all_of(slots_, [](const auto& slot) { return !slot.empty(); });
}

RepresentationMemory RepresentationMemory::restore(
    std::size_t latent_dim, std::size_t capacity, std::uint64_t seed, Rng rng,
    std::vector<std::vector<std::vector<double>>> slots, std::vector<std::uint64_t> seen) {
  if (slots.size() != seen.size()) throw SchemaError("memory: slot and counter counts differ");
  RepresentationMemory memory(slots.size(), latent_dim, capacity, seed);
  for (std::size_t rp = 0; rp < slots.size(); ++rp) {
    if (slots[rp].size() > capacity || slots[rp].size() > seen[rp]) {
      throw SchemaError("memory: RP " + std::to_string(rp) + " holds too many prototypes");
    }
    for (const auto& z : slots[rp]) {
      if (z.size() != latent_dim) throw SchemaError("memory: prototype has wrong dimension");
    }
  }
  memory.rng_ = std::move(rng);
  memory.slots_ = std::move(slots);
  memory.seen_ = std::move(seen);
  return memory;
}

}  // namespace dailoc::cesa

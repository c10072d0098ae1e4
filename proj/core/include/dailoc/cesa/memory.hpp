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
#include <span>
#include <vector>

#include "dailoc/common/rng.hpp"
#include "dailoc/nn/matrix.hpp"

namespace dailoc::cesa {

// Per-RP prototype store of class latents z_C, filled by stratified reservoir
// sampling. Only latent vectors of `latent_dim` entries are accepted, so raw
// fingerprints can never end up here.
class RepresentationMemory {
 public:
  RepresentationMemory() = default;
  RepresentationMemory(std::size_t n_rps, std::size_t latent_dim = 16, std::size_t capacity = 1,
                       std::uint64_t seed = 0);

  // Classic reservoir step within the RP's stratum: the k-th sample offered
  // to an RP of capacity c is kept with probability min(1, c / k), replacing a
  // uniformly chosen occupant. Returns true when the sample was stored.
  bool reservoir_insert(std::size_t rp, std::span<const double> z_c);

  const std::vector<std::vector<double>>& prototypes(std::size_t rp) const;
  // Every stored prototype, RP-ascending.
  nn::Matrix pooled() const;
  // RP label of each row of pooled().
  std::vector<std::size_t> pooled_labels() const;

  std::size_t n_rps() const { return slots_.size(); }
  std::size_t latent_dim() const { return latent_dim_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t total() const;
  std::uint64_t seen(std::size_t rp) const;
  bool covers_all_rps() const;

  // Persistence hooks.
  const Rng& rng() const { return rng_; }
  std::uint64_t seed() const { return seed_; }
  static RepresentationMemory restore(std::size_t latent_dim, std::size_t capacity,
                                      std::uint64_t seed, Rng rng,
                                      std::vector<std::vector<std::vector<double>>> slots,
                                      std::vector<std::uint64_t> seen);

 private:
  void check_rp(std::size_t rp) const;

  std::size_t latent_dim_ = 16;
  std::size_t capacity_ = 1;
  std::uint64_t seed_ = 0;
  Rng rng_;
  std::vector<std::vector<std::vector<double>>> slots_;
  std::vector<std::uint64_t> seen_;
};

}  // namespace dailoc::cesa

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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dailoc/nn/adam.hpp"
#include "dailoc/nn/dense.hpp"
#include "dailoc/nn/matrix.hpp"

namespace dailoc::model {

// Layer widths. Defaults are the reference architecture; tests shrink them.
struct ArchConfig {
  std::size_t input_dim = 0;  // number of APs
  std::size_t n_rps = 0;
  std::size_t trunk1 = 256;
  std::size_t trunk2 = 128;
  std::size_t latent_dim = 16;  // dim(z_D) == dim(z_C)
  std::size_t class_hidden = 64;
  std::size_t decoder1 = 128;
  std::size_t decoder2 = 256;
  std::size_t classifier_hidden = 64;

  bool operator==(const ArchConfig&) const = default;
};

// Fixed layer order; also the parameter order used by checkpoints.
enum class LayerId : std::size_t {
  kTrunk1,
  kTrunk2,
  kMuHead,
  kSigmaHead,
  kClassHidden,
  kClassOut,
  kDecoder1,
  kDecoder2,
  kDecoder3,
  kClassifierHidden,
  kClassifierOut,
};
inline constexpr std::size_t kLayerCount = 11;

enum class Group : unsigned { kEncoder = 1u, kDecoder = 2u, kClassifier = 4u };

// Bit set of Groups.
struct GroupMask {
  unsigned bits = 0;

  constexpr GroupMask() = default;
  constexpr GroupMask(Group g) : bits(static_cast<unsigned>(g)) {}  // NOLINT
  constexpr bool has(Group g) const { return (bits & static_cast<unsigned>(g)) != 0; }
  constexpr bool empty() const { return bits == 0; }
  friend constexpr GroupMask operator|(GroupMask a, GroupMask b) {
    GroupMask m;
    m.bits = a.bits | b.bits;
    return m;
  }
};

inline constexpr GroupMask kAllGroups = GroupMask(Group::kEncoder) | Group::kDecoder |
                                        Group::kClassifier;

std::string_view layer_name(LayerId id);
Group layer_group(LayerId id);

// Offset added after Softplus so that ln(sigma^2) stays finite.
inline constexpr double kSigmaFloor = 1e-6;

struct MlvaeModel {
  ArchConfig arch;
  std::array<nn::DenseLayer, kLayerCount> layers;

  nn::DenseLayer& layer(LayerId id) { return layers[static_cast<std::size_t>(id)]; }
  const nn::DenseLayer& layer(LayerId id) const {
    return layers[static_cast<std::size_t>(id)];
  }

  std::size_t parameter_count(GroupMask mask = kAllGroups) const;

  bool operator==(const MlvaeModel&) const = default;
};

// Builds the network for `arch` with He-uniform weights drawn from `seed`.
MlvaeModel make_model(const ArchConfig& arch, std::uint64_t seed);

// Latents for a batch; one row per sample.
struct LatentPair {
  nn::Matrix mu_d;
  nn::Matrix sigma_d;  // strictly positive
  nn::Matrix z_d;      // empty until reparameterized
  nn::Matrix z_c;
};

// Encoder pass: mu_D, sigma_D and the deterministic z_C. Inputs must be
// standardized RSS in [0, 1].
LatentPair encode(const MlvaeModel& model, const nn::Matrix& x);

// z_D = mu_D + sigma_D * eps, elementwise.
nn::Matrix reparameterize(const nn::Matrix& mu_d, const nn::Matrix& sigma_d,
                          const nn::Matrix& eps);

// Reconstruction from [z_D, z_C] (that order).
nn::Matrix decode(const MlvaeModel& model, const nn::Matrix& z_d, const nn::Matrix& z_c);

nn::Matrix classifier_logits(const MlvaeModel& model, const nn::Matrix& z_c);
// Row-wise RP probabilities.
nn::Matrix classify(const MlvaeModel& model, const nn::Matrix& z_c);

// Cached activations of a complete forward pass, used for backpropagation.
struct ForwardCache {
  std::array<nn::DenseCache, kLayerCount> layers;
  nn::Matrix eps;
  LatentPair latents;
  nn::Matrix x_hat;
  nn::Matrix logits;
  nn::Matrix probs;
  bool has_decoder = false;
  bool has_classifier = false;
};

struct ForwardOptions {
  bool run_decoder = true;
  bool run_classifier = true;
};

ForwardCache forward(const MlvaeModel& model, const nn::Matrix& x, const nn::Matrix& eps,
                     ForwardOptions options = {});

// Per-layer gradients, indexed like MlvaeModel::layers.
struct ModelGrads {
  std::array<nn::Matrix, kLayerCount> weight;
  std::array<std::vector<double>, kLayerCount> bias;

  static ModelGrads zeros_like(const MlvaeModel& model);
  double l2_norm(GroupMask mask = kAllGroups) const;
};

// Parameter views in canonical order, restricted to `mask`.
std::vector<nn::ParamBlock> parameter_blocks(MlvaeModel& model, GroupMask mask = kAllGroups);
std::vector<nn::GradBlock> gradient_blocks(const ModelGrads& grads, const MlvaeModel& model,
                                           GroupMask mask = kAllGroups);

// FNV-1a over the raw bytes of every parameter in `mask`.
std::uint64_t parameter_checksum(const MlvaeModel& model, GroupMask mask);
// Largest absolute parameter difference within `mask`.
double parameter_drift_linf(const MlvaeModel& a, const MlvaeModel& b, GroupMask mask);

}  // namespace dailoc::model

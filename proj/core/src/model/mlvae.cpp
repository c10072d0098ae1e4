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

#include "dailoc/model/mlvae.hpp"

#include <cmath>
#include <cstring>

#include "dailoc/common/errors.hpp"
#include "dailoc/common/rng.hpp"

namespace dailoc::model {
namespace {

using nn::Activation;
using nn::DenseLayer;
using nn::Matrix;

constexpr std::size_t idx(LayerId id) { return static_cast<std::size_t>(id); }

// Applies sigma = softplus(head) + floor to the raw head output.
Matrix sigma_from_head(const Matrix& head_out) {
  Matrix sigma = head_out;
  for (double& v : sigma.values()) v += kSigmaFloor;
  return sigma;
}

void check_batch_input(const MlvaeModel& model, const Matrix& x) {
  if (x.cols() != model.arch.input_dim) {
    throw ShapeError("encode: input " + x.shape_string() + " but model expects " +
                     std::to_string(model.arch.input_dim) + " APs");
  }
  for (double v : x.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("encode: standardized RSS must lie in [0, 1], got " +
                        std::to_string(v));
    }
  }
}

void check_latent(const MlvaeModel& model, const Matrix& z, const char* what) {
  if (z.cols() != model.arch.latent_dim) {
    throw ShapeError(std::string(what) + ": latent " + z.shape_string() + " but model uses " +
                     std::to_string(model.arch.latent_dim) + " dimensions");
  }
}

std::uint64_t fnv_bytes(std::uint64_t h, std::span<const double> values) {
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace

std::string_view layer_name(LayerId id) {
  switch (id) {
    case LayerId::kTrunk1:
      return "encoder.trunk1";
    case LayerId::kTrunk2:
      return "encoder.trunk2";
    case LayerId::kMuHead:
      return "encoder.mu_head";
    case LayerId::kSigmaHead:
      return "encoder.sigma_head";
    case LayerId::kClassHidden:
      return "encoder.class_hidden";
    case LayerId::kClassOut:
      return "encoder.class_out";
    case LayerId::kDecoder1:
      return "decoder.hidden1";
    case LayerId::kDecoder2:
      return "decoder.hidden2";
    case LayerId::kDecoder3:
      return "decoder.output";
    case LayerId::kClassifierHidden:
      return "classifier.hidden";
    case LayerId::kClassifierOut:
      return "classifier.output";
  }
  return "unknown";
}

Group layer_group(LayerId id) {
  switch (id) {
    case LayerId::kDecoder1:
    case LayerId::kDecoder2:
    case LayerId::kDecoder3:
      return Group::kDecoder;
    case LayerId::kClassifierHidden:
    case LayerId::kClassifierOut:
      return Group::kClassifier;
    default:
      return Group::kEncoder;
  }
}

std::size_t MlvaeModel::parameter_count(GroupMask mask) const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    if (mask.has(layer_group(static_cast<LayerId>(i)))) total += layers[i].parameter_count();
  }
  return total;
}

MlvaeModel make_model(const ArchConfig& arch, std::uint64_t seed) {
  if (arch.input_dim == 0 || arch.n_rps == 0 || arch.latent_dim == 0) {
    throw ShapeError("make_model: input_dim, n_rps and latent_dim must be positive");
  }
  MlvaeModel model;
  model.arch = arch;
  const std::size_t l = arch.latent_dim;
  model.layer(LayerId::kTrunk1) = DenseLayer(arch.input_dim, arch.trunk1, Activation::kReLU);
  model.layer(LayerId::kTrunk2) = DenseLayer(arch.trunk1, arch.trunk2, Activation::kReLU);
  model.layer(LayerId::kMuHead) = DenseLayer(arch.trunk2, l, Activation::kIdentity);
  model.layer(LayerId::kSigmaHead) = DenseLayer(arch.trunk2, l, Activation::kSoftplus);
  model.layer(LayerId::kClassHidden) =
      DenseLayer(arch.trunk2, arch.class_hidden, Activation::kReLU);
  model.layer(LayerId::kClassOut) = DenseLayer(arch.class_hidden, l, Activation::kIdentity);
  model.layer(LayerId::kDecoder1) = DenseLayer(2 * l, arch.decoder1, Activation::kReLU);
  model.layer(LayerId::kDecoder2) = DenseLayer(arch.decoder1, arch.decoder2, Activation::kReLU);
  model.layer(LayerId::kDecoder3) =
      DenseLayer(arch.decoder2, arch.input_dim, Activation::kSigmoid);
  model.layer(LayerId::kClassifierHidden) =
      DenseLayer(l, arch.classifier_hidden, Activation::kReLU);
  model.layer(LayerId::kClassifierOut) =
      DenseLayer(arch.classifier_hidden, arch.n_rps, Activation::kIdentity);

  Rng rng(seed);
  for (auto& layer : model.layers) nn::he_uniform_init(layer, rng);
  return model;
}

LatentPair encode(const MlvaeModel& model, const Matrix& x) {
  check_batch_input(model, x);
  const Matrix h1 = nn::dense_forward(model.layer(LayerId::kTrunk1), x);
  const Matrix h2 = nn::dense_forward(model.layer(LayerId::kTrunk2), h1);
  LatentPair out;
  out.mu_d = nn::dense_forward(model.layer(LayerId::kMuHead), h2);
  out.sigma_d = sigma_from_head(nn::dense_forward(model.layer(LayerId::kSigmaHead), h2));
  const Matrix c1 = nn::dense_forward(model.layer(LayerId::kClassHidden), h2);
  out.z_c = nn::dense_forward(model.layer(LayerId::kClassOut), c1);
  return out;
}

Matrix reparameterize(const Matrix& mu_d, const Matrix& sigma_d, const Matrix& eps) {
  if (mu_d.rows() != sigma_d.rows() || mu_d.cols() != sigma_d.cols() ||
      mu_d.rows() != eps.rows() || mu_d.cols() != eps.cols()) {
    throw ShapeError("reparameterize: mu " + mu_d.shape_string() + ", sigma " +
                     sigma_d.shape_string() + ", eps " + eps.shape_string());
  }
  Matrix z(mu_d.rows(), mu_d.cols());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z.values()[i] = mu_d.values()[i] + sigma_d.values()[i] * eps.values()[i];
  }
  return z;
}

Matrix decode(const MlvaeModel& model, const Matrix& z_d, const Matrix& z_c) {
  check_latent(model, z_d, "decode");
  check_latent(model, z_c, "decode");
  const Matrix z = nn::hconcat(z_d, z_c);
  const Matrix d1 = nn::dense_forward(model.layer(LayerId::kDecoder1), z);
  const Matrix d2 = nn::dense_forward(model.layer(LayerId::kDecoder2), d1);
  return nn::dense_forward(model.layer(LayerId::kDecoder3), d2);
}

Matrix classifier_logits(const MlvaeModel& model, const Matrix& z_c) {
  check_latent(model, z_c, "classify");
  const Matrix h = nn::dense_forward(model.layer(LayerId::kClassifierHidden), z_c);
  return nn::dense_forward(model.layer(LayerId::kClassifierOut), h);
}

Matrix classify(const MlvaeModel& model, const Matrix& z_c) {
  return nn::softmax_rows(classifier_logits(model, z_c));
}

ForwardCache forward(const MlvaeModel& model, const Matrix& x, const Matrix& eps,
                     ForwardOptions options) {
  check_batch_input(model, x);
  ForwardCache fc;
  auto& c = fc.layers;
  const Matrix h1 = nn::dense_forward(model.layer(LayerId::kTrunk1), x, c[idx(LayerId::kTrunk1)]);
  const Matrix h2 =
      nn::dense_forward(model.layer(LayerId::kTrunk2), h1, c[idx(LayerId::kTrunk2)]);
  fc.latents.mu_d =
      nn::dense_forward(model.layer(LayerId::kMuHead), h2, c[idx(LayerId::kMuHead)]);
  fc.latents.sigma_d = sigma_from_head(
      nn::dense_forward(model.layer(LayerId::kSigmaHead), h2, c[idx(LayerId::kSigmaHead)]));
  const Matrix ch =
      nn::dense_forward(model.layer(LayerId::kClassHidden), h2, c[idx(LayerId::kClassHidden)]);
  fc.latents.z_c =
      nn::dense_forward(model.layer(LayerId::kClassOut), ch, c[idx(LayerId::kClassOut)]);

  if (options.run_decoder) {
    fc.eps = eps;
    fc.latents.z_d = reparameterize(fc.latents.mu_d, fc.latents.sigma_d, eps);
    const Matrix z = nn::hconcat(fc.latents.z_d, fc.latents.z_c);
    const Matrix d1 =
        nn::dense_forward(model.layer(LayerId::kDecoder1), z, c[idx(LayerId::kDecoder1)]);
    const Matrix d2 =
        nn::dense_forward(model.layer(LayerId::kDecoder2), d1, c[idx(LayerId::kDecoder2)]);
    fc.x_hat =
        nn::dense_forward(model.layer(LayerId::kDecoder3), d2, c[idx(LayerId::kDecoder3)]);
    fc.has_decoder = true;
  }
  if (options.run_classifier) {
    const Matrix k1 = nn::dense_forward(model.layer(LayerId::kClassifierHidden), fc.latents.z_c,
                                        c[idx(LayerId::kClassifierHidden)]);
    fc.logits = nn::dense_forward(model.layer(LayerId::kClassifierOut), k1,
                                  c[idx(LayerId::kClassifierOut)]);
    fc.probs = nn::softmax_rows(fc.logits);
    fc.has_classifier = true;
  }
  return fc;
}

ModelGrads ModelGrads::zeros_like(const MlvaeModel& model) {
  ModelGrads g;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    g.weight[i] = Matrix(model.layers[i].weights.rows(), model.layers[i].weights.cols());
    g.bias[i].assign(model.layers[i].bias.size(), 0.0);
  }
  return g;
}

double ModelGrads::l2_norm(GroupMask mask) const {
  double total = 0.0;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    if (!mask.has(layer_group(static_cast<LayerId>(i)))) continue;
    for (double v : weight[i].values()) total += v * v;
    for (double v : bias[i]) total += v * v;
  }
  return std::sqrt(total);
}

std::vector<nn::ParamBlock> parameter_blocks(MlvaeModel& model, GroupMask mask) {
  std::vector<nn::ParamBlock> blocks;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    const auto id = static_cast<LayerId>(i);
    if (!mask.has(layer_group(id))) continue;
    const std::string name(layer_name(id));
    blocks.push_back({name + ".weight", model.layers[i].weights.values()});
    blocks.push_back({name + ".bias", model.layers[i].bias});
  }
  return blocks;
}

std::vector<nn::GradBlock> gradient_blocks(const ModelGrads& grads, const MlvaeModel& model,
                                           GroupMask mask) {
  std::vector<nn::GradBlock> blocks;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    const auto id = static_cast<LayerId>(i);
    if (!mask.has(layer_group(id))) continue;
    if (grads.weight[i].size() != model.layers[i].weights.size() ||
        grads.bias[i].size() != model.layers[i].bias.size()) {
      throw ShapeError("gradient_blocks: gradient for " + std::string(layer_name(id)) +
                       " does not match the model");
    }
    const std::string name(layer_name(id));
    blocks.push_back({name + ".weight", grads.weight[i].values()});
    blocks.push_back({name + ".bias", grads.bias[i]});
  }
  return blocks;
}

std::uint64_t parameter_checksum(const MlvaeModel& model, GroupMask mask) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    if (!mask.has(layer_group(static_cast<LayerId>(i)))) continue;
    h = fnv_bytes(h, model.layers[i].weights.values());
    h = fnv_bytes(h, model.layers[i].bias);
  }
  return h;
}

double parameter_drift_linf(const MlvaeModel& a, const MlvaeModel& b, GroupMask mask) {
  if (!(a.arch == b.arch)) throw ShapeError("parameter_drift_linf: architectures differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    if (!mask.has(layer_group(static_cast<LayerId>(i)))) continue;
    worst = std::max(worst, nn::max_abs_diff(a.layers[i].weights.values(),
                                             b.layers[i].weights.values()));
    worst = std::max(worst, nn::max_abs_diff(a.layers[i].bias, b.layers[i].bias));
  }
  return worst;
}

}  // namespace dailoc::model

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

#include "dailoc/model/objective.hpp"

#include <algorithm>
#include <cmath>

#include "dailoc/common/errors.hpp"
#include "dailoc/model/losses.hpp"

namespace dailoc::model {
namespace {

using nn::Matrix;

constexpr std::size_t idx(LayerId id) { return static_cast<std::size_t>(id); }

void add_into(Matrix& acc, const Matrix& term) {
  auto a = acc.values();
  auto t = term.values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += t[i];
}

// Mean cross-entropy from logits via log-sum-exp.
double cross_entropy_from_logits(const Matrix& logits, std::span<const std::size_t> labels) {
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    const double peak = *std::ranges::max_element(row);
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - peak);
    total += peak + std::log(sum) - row[labels[r]];
  }
  return total / static_cast<double>(logits.rows());
}

class Backprop {
 public:
  Backprop(const MlvaeModel& model, const ForwardCache& fc, ModelGrads& grads, GroupMask mask)
      : model_(model), fc_(fc), grads_(grads), mask_(mask) {}

  // Backpropagates `upstream` through one layer, storing the parameter
  // gradient when the layer's group is requested. Returns the input gradient.
  Matrix through(LayerId id, const Matrix& upstream) {
    auto g = nn::dense_backward(model_.layer(id), fc_.layers[idx(id)], upstream);
    if (mask_.has(layer_group(id))) {
      add_into(grads_.weight[idx(id)], g.weight_grad);
      auto& b = grads_.bias[idx(id)];
      for (std::size_t i = 0; i < b.size(); ++i) b[i] += g.bias_grad[i];
    }
    return std::move(g.input_grad);
  }

 private:
  const MlvaeModel& model_;
  const ForwardCache& fc_;
  ModelGrads& grads_;
  GroupMask mask_;
};

}  // namespace

double LossTerms::weighted_total(const LossWeights& w) const {
  double total = w.kl * kl;
  if (rec) total += w.rec * *rec;
  if (align) total += w.align * *align;
  if (cls) total += w.cls * *cls;
  return total;
}

LossTerms evaluate_objective(const MlvaeModel& model, const ObjectiveInput& input,
                             ModelGrads* grads) {
  if (input.x == nullptr) throw InputError("evaluate_objective: missing input batch");
  const Matrix& x = *input.x;
  const std::size_t batch = x.rows();
  if (batch == 0) throw InputError("evaluate_objective: empty batch");
  const bool labeled = !input.labels.empty();
  if (labeled && input.labels.size() != batch) {
    throw ShapeError("evaluate_objective: " + std::to_string(input.labels.size()) +
                     " labels for a batch of " + std::to_string(batch));
  }
  for (std::size_t label : input.labels) {
    if (label >= model.arch.n_rps) {
      throw InputError("evaluate_objective: label " + std::to_string(label) + " outside " +
                       std::to_string(model.arch.n_rps) + " RPs");
    }
  }
  if (input.with_reconstruction) {
    if (input.eps == nullptr) throw InputError("evaluate_objective: missing noise matrix");
    if (input.eps->rows() != batch || input.eps->cols() != model.arch.latent_dim) {
      throw ShapeError("evaluate_objective: noise " + input.eps->shape_string());
    }
  }

  ForwardOptions options;
  options.run_decoder = input.with_reconstruction;
  options.run_classifier = labeled;
  static const Matrix kNoEps;
  const ForwardCache fc =
      forward(model, x, input.with_reconstruction ? *input.eps : kNoEps, options);
  const auto& lat = fc.latents;
  const double inv_batch = 1.0 / static_cast<double>(batch);

  LossTerms terms;
  terms.kl = kl_loss(lat.mu_d, lat.sigma_d);
  if (fc.has_decoder) terms.rec = rec_loss(x, fc.x_hat);
  if (labeled) terms.cls = cross_entropy_from_logits(fc.logits, input.labels);

  std::optional<cesa::MmdWithGrad> mmd;
  if (input.prototypes != nullptr && input.prototypes->rows() > 0) {
    mmd = cesa::mmd_loss_with_grad(lat.z_c, *input.prototypes, input.kernel);
    if (mmd) terms.align = mmd->value;
  }

  if (grads == nullptr) return terms;
  *grads = ModelGrads::zeros_like(model);
  const GroupMask mask = input.grad_groups;
  const LossWeights& w = input.weights;
  const bool need_encoder = mask.has(Group::kEncoder);
  Backprop bp(model, fc, *grads, mask);

  const std::size_t l = model.arch.latent_dim;
  Matrix d_mu(batch, l);
  Matrix d_sigma(batch, l);
  Matrix d_zc(batch, l);

  if (fc.has_decoder && w.rec != 0.0 && (need_encoder || mask.has(Group::kDecoder))) {
    Matrix d_xhat(batch, x.cols());
    const double scale = 2.0 * w.rec * inv_batch;
    for (std::size_t i = 0; i < d_xhat.size(); ++i) {
      d_xhat.values()[i] = scale * (fc.x_hat.values()[i] - x.values()[i]);
    }
    Matrix d = bp.through(LayerId::kDecoder3, d_xhat);
    d = bp.through(LayerId::kDecoder2, d);
    const Matrix d_z = bp.through(LayerId::kDecoder1, d);
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t c = 0; c < l; ++c) {
        const double dzd = d_z(r, c);
        d_mu(r, c) += dzd;
        d_sigma(r, c) += dzd * fc.eps(r, c);
        d_zc(r, c) += d_z(r, l + c);
      }
    }
  }

  if (need_encoder && w.kl != 0.0) {
    const double scale = w.kl * inv_batch;
    for (std::size_t i = 0; i < d_mu.size(); ++i) {
      const double mu = lat.mu_d.values()[i];
      const double sigma = lat.sigma_d.values()[i];
      d_mu.values()[i] += scale * mu;
      d_sigma.values()[i] += scale * (sigma - 1.0 / sigma);
    }
  }

  if (labeled && w.cls != 0.0 && (need_encoder || mask.has(Group::kClassifier))) {
    Matrix d_logits = fc.probs;
    const double scale = w.cls * inv_batch;
    for (std::size_t r = 0; r < batch; ++r) {
      d_logits(r, input.labels[r]) -= 1.0;
      for (double& v : d_logits.row(r)) v *= scale;
    }
    const Matrix d = bp.through(LayerId::kClassifierOut, d_logits);
    add_into(d_zc, bp.through(LayerId::kClassifierHidden, d));
  }

  if (mmd && w.align != 0.0 && need_encoder) {
    for (std::size_t i = 0; i < d_zc.size(); ++i) {
      d_zc.values()[i] += w.align * mmd->grad_current.values()[i];
    }
  }

  if (need_encoder) {
    // sigma = softplus(head) + floor; the floor has zero derivative.
    Matrix d_h2 = bp.through(LayerId::kMuHead, d_mu);
    add_into(d_h2, bp.through(LayerId::kSigmaHead, d_sigma));
    const Matrix d_ch = bp.through(LayerId::kClassOut, d_zc);
    add_into(d_h2, bp.through(LayerId::kClassHidden, d_ch));
    const Matrix d_h1 = bp.through(LayerId::kTrunk2, d_h2);
    bp.through(LayerId::kTrunk1, d_h1);
  }
  return terms;
}

}  // namespace dailoc::model

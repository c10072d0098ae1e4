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

#include "dailoc/model/losses.hpp"

#include <cmath>

#include "dailoc/common/errors.hpp"

namespace dailoc::model {

double kl_loss(std::span<const double> mu, std::span<const double> sigma) {
  if (mu.size() != sigma.size()) throw ShapeError("kl_loss: mu and sigma lengths differ");
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(sigma[i] > 0.0)) {
      throw DomainError("kl_loss: sigma must be positive, got " + std::to_string(sigma[i]));
    }
    const double var = sigma[i] * sigma[i];
    total += mu[i] * mu[i] + var - std::log(var) - 1.0;
  }
  return 0.5 * total;
}

double kl_loss(const nn::Matrix& mu, const nn::Matrix& sigma) {
  if (mu.rows() != sigma.rows() || mu.cols() != sigma.cols()) {
    throw ShapeError("kl_loss: mu " + mu.shape_string() + " vs sigma " + sigma.shape_string());
  }
  if (mu.rows() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < mu.rows(); ++r) total += kl_loss(mu.row(r), sigma.row(r));
  return total / static_cast<double>(mu.rows());
}

double rec_loss(std::span<const double> x, std::span<const double> x_hat) {
  if (x.size() != x_hat.size()) {
    throw ShapeError("rec_loss: lengths " + std::to_string(x.size()) + " and " +
                     std::to_string(x_hat.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x_hat[i];
    total += d * d;
  }
  return total;
}

double rec_loss(const nn::Matrix& x, const nn::Matrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
    throw ShapeError("rec_loss: x " + x.shape_string() + " vs x_hat " + x_hat.shape_string());
  }
  if (x.rows() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) total += rec_loss(x.row(r), x_hat.row(r));
  return total / static_cast<double>(x.rows());
}

double class_loss(std::span<const double> probs, std::size_t label) {
  if (label >= probs.size()) {
    throw InputError("class_loss: label " + std::to_string(label) + " outside " +
                     std::to_string(probs.size()) + " classes");
  }
  return -std::log(probs[label]);
}

double class_loss(const nn::Matrix& probs, std::span<const std::size_t> labels) {
  if (probs.rows() != labels.size()) {
    throw ShapeError("class_loss: " + std::to_string(labels.size()) + " labels for " +
                     probs.shape_string() + " probabilities");
  }
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < probs.rows(); ++r) total += class_loss(probs.row(r), labels[r]);
  return total / static_cast<double>(labels.size());
}

}  // namespace dailoc::model

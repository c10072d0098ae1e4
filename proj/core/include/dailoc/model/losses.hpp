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
#include <span>

#include "dailoc/nn/matrix.hpp"

namespace dailoc::model {

// KL(N(mu, sigma^2) || N(0, I)) = 0.5 * sum(mu^2 + sigma^2 - ln sigma^2 - 1).
// Throws DomainError for sigma <= 0.
double kl_loss(std::span<const double> mu, std::span<const double> sigma);
// Batch mean of the per-row KL.
double kl_loss(const nn::Matrix& mu, const nn::Matrix& sigma);

// Squared Euclidean reconstruction error.
double rec_loss(std::span<const double> x, std::span<const double> x_hat);
// Batch mean of the per-row squared error.
double rec_loss(const nn::Matrix& x, const nn::Matrix& x_hat);

// -ln(probs[label]).
double class_loss(std::span<const double> probs, std::size_t label);
// Batch mean cross-entropy.
double class_loss(const nn::Matrix& probs, std::span<const std::size_t> labels);

}  // namespace dailoc::model

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
#include <string_view>
#include <vector>

#include "dailoc/common/rng.hpp"
#include "dailoc/nn/matrix.hpp"

namespace dailoc::nn {

enum class Activation { kReLU, kSigmoid, kSoftplus, kIdentity };

std::string_view to_string(Activation act);
Activation activation_from_string(std::string_view name);

double apply_activation(Activation act, double pre);
// Derivative with respect to the pre-activation.
double activation_derivative(Activation act, double pre, double out);

// Numerically stable scalar helpers.
double sigmoid(double x);
double softplus(double x);

struct DenseLayer {
  Matrix weights;            // out x in
  std::vector<double> bias;  // out
  Activation activation = Activation::kIdentity;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act);

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }
  std::size_t parameter_count() const { return weights.size() + bias.size(); }

  bool operator==(const DenseLayer&) const = default;
};

// Uniform He initialization: weights ~ U(-a, a) with a = sqrt(6 / fan_in), which
// gives standard deviation sqrt(2 / fan_in). Biases start at zero.
void he_uniform_init(DenseLayer& layer, Rng& rng);

struct DenseCache {
  Matrix input;
  Matrix pre;
  Matrix output;
};

struct DenseGrads {
  Matrix input_grad;
  Matrix weight_grad;
  std::vector<double> bias_grad;
};

Matrix dense_forward(const DenseLayer& layer, const Matrix& input);
Matrix dense_forward(const DenseLayer& layer, const Matrix& input, DenseCache& cache);

DenseGrads dense_backward(const DenseLayer& layer, const DenseCache& cache,
                          const Matrix& upstream);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

}  // namespace dailoc::nn

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

#include "dailoc/nn/dense.hpp"

#include <algorithm>
#include <cmath>

#include "dailoc/common/errors.hpp"

namespace dailoc::nn {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::kReLU:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kSoftplus:
      return "softplus";
    case Activation::kIdentity:
      return "identity";
  }
  return "identity";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::kReLU;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "softplus") return Activation::kSoftplus;
  if (name == "identity") return Activation::kIdentity;
  throw ParseError("unknown activation '" + std::string(name) + "'");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double apply_activation(Activation act, double pre) {
  switch (act) {
    case Activation::kReLU:
      return pre > 0.0 ? pre : 0.0;
    case Activation::kSigmoid:
      return sigmoid(pre);
    case Activation::kSoftplus:
      return softplus(pre);
    case Activation::kIdentity:
      return pre;
  }
  return pre;
}

double activation_derivative(Activation act, double pre, double out) {
  switch (act) {
    case Activation::kReLU:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid:
      return out * (1.0 - out);
    case Activation::kSoftplus:
      return sigmoid(pre);
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act)
    : weights(out, in), bias(out, 0.0), activation(act) {}

void he_uniform_init(DenseLayer& layer, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(std::max<std::size_t>(1, layer.in_dim())));
  for (double& w : layer.weights.values()) w = rng.uniform(-bound, bound);
  std::ranges::fill(layer.bias, 0.0);
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
  DenseCache cache;
  return dense_forward(layer, input, cache);
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input, DenseCache& cache) {
  if (input.cols() != layer.in_dim()) {
    throw ShapeError("dense_forward: input " + input.shape_string() +
                     " does not match layer weights " + layer.weights.shape_string());
  }
  Matrix pre = matmul_nt(input, layer.weights);
  Matrix out(pre.rows(), pre.cols());
  for (std::size_t r = 0; r < pre.rows(); ++r) {
    auto p = pre.row(r);
    auto o = out.row(r);
    for (std::size_t c = 0; c < p.size(); ++c) {
      p[c] += layer.bias[c];
      o[c] = apply_activation(layer.activation, p[c]);
    }
  }
  cache.input = input;
  cache.pre = std::move(pre);
  cache.output = out;
  return out;
}

DenseGrads dense_backward(const DenseLayer& layer, const DenseCache& cache,
                          const Matrix& upstream) {
  if (upstream.rows() != cache.output.rows() || upstream.cols() != cache.output.cols()) {
    throw ShapeError("dense_backward: upstream " + upstream.shape_string() +
                     " does not match forward output " + cache.output.shape_string());
  }
  Matrix delta(upstream.rows(), upstream.cols());
  for (std::size_t r = 0; r < delta.rows(); ++r) {
    for (std::size_t c = 0; c < delta.cols(); ++c) {
      delta(r, c) = upstream(r, c) *
                    activation_derivative(layer.activation, cache.pre(r, c), cache.output(r, c));
    }
  }
  DenseGrads grads;
  grads.weight_grad = matmul_tn(delta, cache.input);
  grads.input_grad = matmul(delta, layer.weights);
  grads.bias_grad.assign(delta.cols(), 0.0);
  for (std::size_t r = 0; r < delta.rows(); ++r) {
    for (std::size_t c = 0; c < delta.cols(); ++c) grads.bias_grad[c] += delta(r, c);
  }
  return grads;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto in = logits.row(r);
    auto out = probs.row(r);
    const double peak = *std::ranges::max_element(in);
    double total = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - peak);
      total += out[c];
    }
    for (double& v : out) v /= total;
  }
  return probs;
}

}  // namespace dailoc::nn

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

#include "dailoc/cesa/mmd.hpp"

#include <algorithm>
#include <cmath>

#include "dailoc/common/errors.hpp"

namespace dailoc::cesa {
namespace {

using nn::Matrix;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

// Pairwise squared distances between the rows of a and b.
Matrix squared_distances(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = squared_distance(a.row(i), b.row(j));
  }
  return out;
}

double mean_kernel(const Matrix& sq, double bandwidth) {
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  double total = 0.0;
  for (double d : sq.values()) total += std::exp(-d * inv);
  return total / static_cast<double>(sq.size());
}

// Sum in ascending order so that the result does not depend on whether the
// cross-kernel matrix was built as K(a, b) or K(b, a).
double mean_kernel_order_free(const Matrix& sq, double bandwidth) {
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  std::vector<double> values(sq.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::exp(-sq.values()[i] * inv);
  std::ranges::sort(values);
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

void check_inputs(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("mmd_loss: sample dimensions differ, " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

}  // namespace

KernelConfig KernelConfig::fixed(std::vector<double> bandwidths) {
  KernelConfig cfg;
  cfg.median_heuristic = false;
  cfg.bandwidths = std::move(bandwidths);
  return cfg;
}

void KernelConfig::validate() const {
  const auto& values = median_heuristic ? multipliers : bandwidths;
  if (values.empty()) throw DomainError("kernel config: at least one bandwidth is required");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("kernel config: bandwidths must be positive, got " + std::to_string(v));
    }
  }
}

double median_pairwise_distance(const Matrix& a, const Matrix& b) {
  std::vector<std::span<const double>> pooled;
  for (std::size_t i = 0; i < a.rows(); ++i) pooled.push_back(a.row(i));
  for (std::size_t i = 0; i < b.rows(); ++i) pooled.push_back(b.row(i));
  std::vector<double> dists;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = i + 1; j < pooled.size(); ++j) {
      dists.push_back(std::sqrt(squared_distance(pooled[i], pooled[j])));
    }
  }
  if (dists.empty()) return 0.0;
  std::ranges::sort(dists);
  const std::size_t n = dists.size();
  return n % 2 == 1 ? dists[n / 2] : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
}

std::vector<double> resolve_bandwidths(const KernelConfig& cfg, const Matrix& a,
                                       const Matrix& b) {
  cfg.validate();
  if (!cfg.median_heuristic) return cfg.bandwidths;
  double base = median_pairwise_distance(a, b);
  if (!(base > 0.0) || !std::isfinite(base)) base = 1.0;
  std::vector<double> out;
  out.reserve(cfg.multipliers.size());
  for (double m : cfg.multipliers) out.push_back(m * base);
  return out;
}

std::optional<double> mmd_loss(const Matrix& current, const Matrix& prototypes,
                               const KernelConfig& cfg) {
  if (current.rows() == 0 || prototypes.rows() == 0) return std::nullopt;
  check_inputs(current, prototypes);
  const auto bandwidths = resolve_bandwidths(cfg, current, prototypes);
  const Matrix sq_cc = squared_distances(current, current);
  const Matrix sq_rr = squared_distances(prototypes, prototypes);
  const Matrix sq_cr = squared_distances(current, prototypes);
  double total = 0.0;
  for (double g : bandwidths) {
    total += mean_kernel(sq_cc, g) + mean_kernel(sq_rr, g) - 2.0 * mean_kernel_order_free(sq_cr, g);
  }
  return total;
}

std::optional<MmdWithGrad> mmd_loss_with_grad(const Matrix& current, const Matrix& prototypes,
                                              const KernelConfig& cfg) {
  auto value = mmd_loss(current, prototypes, cfg);
  if (!value) return std::nullopt;
  const auto bandwidths = resolve_bandwidths(cfg, current, prototypes);
  const std::size_t n = current.rows();
  const std::size_t m = prototypes.rows();
  const std::size_t dim = current.cols();
  const double nn_inv = 1.0 / static_cast<double>(n * n);
  const double nm_inv = 1.0 / static_cast<double>(n * m);

  MmdWithGrad out;
  out.value = *value;
  out.grad_current = Matrix(n, dim);
  for (double g : bandwidths) {
    const double g2 = g * g;
    const double inv = 1.0 / (2.0 * g2);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = current.row(i);
      auto grad = out.grad_current.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto xj = current.row(j);
        const double k = std::exp(-squared_distance(xi, xj) * inv);
        const double coef = -2.0 * nn_inv * k / g2;
        for (std::size_t d = 0; d < dim; ++d) grad[d] += coef * (xi[d] - xj[d]);
      }
      for (std::size_t j = 0; j < m; ++j) {
        const auto yj = prototypes.row(j);
        const double k = std::exp(-squared_distance(xi, yj) * inv);
        const double coef = 2.0 * nm_inv * k / g2;
        for (std::size_t d = 0; d < dim; ++d) grad[d] += coef * (xi[d] - yj[d]);
      }
    }
  }
  return out;
}

}  // namespace dailoc::cesa

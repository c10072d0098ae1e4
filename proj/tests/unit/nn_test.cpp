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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dailoc/common/errors.hpp"
#include "dailoc/common/rng.hpp"
#include "dailoc/nn/adam.hpp"
#include "dailoc/nn/dense.hpp"
#include "dailoc/nn/gradcheck.hpp"
#include "dailoc/nn/matrix.hpp"

namespace dailoc::nn {
namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (auto& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return m;
}

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  }
  return t;
}

TEST(Matrix, MatmulMatchesNaiveTripleLoop) {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_matrix(3 + trial, 5, rng);
    const auto b = random_matrix(5, 2 + trial, rng);
    EXPECT_LT(max_abs_diff(matmul(a, b).values(), naive_matmul(a, b).values()), 1e-12);
    EXPECT_LT(max_abs_diff(matmul_nt(a, transpose(b)).values(), naive_matmul(a, b).values()),
              1e-12);
    EXPECT_LT(max_abs_diff(matmul_tn(transpose(a), b).values(), naive_matmul(a, b).values()),
              1e-12);
  }
}

TEST(Matrix, ShapeMismatchNamesBothShapes) {
  const Matrix a(2, 3);
  const Matrix b(2, 3);
  try {
    matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2 x 3]"), std::string::npos) << msg;
  }
  EXPECT_THROW(Matrix(2, 2, std::vector<double>(3)), ShapeError);
}

TEST(Matrix, RowHelpers) {
  const Matrix m{{1, 2}, {3, 4}, {5, 6}};
  EXPECT_EQ(slice_rows(m, 1, 3), (Matrix{{3, 4}, {5, 6}}));
  const std::vector<std::size_t> idx{2, 0};
  EXPECT_EQ(gather_rows(m, idx), (Matrix{{5, 6}, {1, 2}}));
  EXPECT_EQ(hconcat(m, slice_cols(m, 0, 1)), (Matrix{{1, 2, 1}, {3, 4, 3}, {5, 6, 5}}));
  EXPECT_FALSE(all_finite(std::vector<double>{1.0, std::nan("")}));
}

TEST(Activation, StableScalars) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(softplus(0.0), std::log(2.0));
  EXPECT_DOUBLE_EQ(softplus(800.0), 800.0);
  EXPECT_TRUE(std::isfinite(sigmoid(-800.0)));
  EXPECT_GE(sigmoid(-800.0), 0.0);
  EXPECT_GT(softplus(-50.0), 0.0);
}

TEST(Activation, DerivativeMatchesFiniteDifference) {
  for (auto act : {Activation::kReLU, Activation::kSigmoid, Activation::kSoftplus,
                   Activation::kIdentity}) {
    for (double x : {-2.3, -0.4, 0.7, 3.1}) {
      const double h = 1e-6;
      const double fd = (apply_activation(act, x + h) - apply_activation(act, x - h)) / (2 * h);
      EXPECT_NEAR(activation_derivative(act, x, apply_activation(act, x)), fd, 1e-8)
          << to_string(act) << " at " << x;
    }
  }
  EXPECT_EQ(activation_from_string("softplus"), Activation::kSoftplus);
}

TEST(Dense, IdentityLayerReturnsInput) {
  DenseLayer layer(3, 3, Activation::kIdentity);
  layer.weights = Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const Matrix x{{0.25, -1.5, 3.0}, {7.0, 0.0, -2.0}};
  EXPECT_EQ(dense_forward(layer, x), x);
}

TEST(Dense, ReluClampsNegativePreActivation) {
  DenseLayer layer(1, 1, Activation::kReLU);
  layer.weights = Matrix{{1.0}};
  layer.bias = {-2.0};
  EXPECT_EQ(dense_forward(layer, Matrix{{1.0}}), (Matrix{{0.0}}));
}

TEST(Dense, SigmoidOfZeroIsHalf) {
  DenseLayer layer(1, 1, Activation::kSigmoid);
  layer.weights = Matrix{{0.0}};
  layer.bias = {0.0};
  EXPECT_EQ(dense_forward(layer, Matrix{{5.0}}), (Matrix{{0.5}}));
}

TEST(Dense, InputWidthMismatchThrows) {
  DenseLayer layer(3, 2, Activation::kIdentity);
  EXPECT_THROW(dense_forward(layer, Matrix(1, 4)), ShapeError);
  DenseCache cache;
  dense_forward(layer, Matrix(1, 3), cache);
  EXPECT_THROW(dense_backward(layer, cache, Matrix(1, 3)), ShapeError);
}

TEST(Dense, LinearDerivative) {
  DenseLayer layer(1, 1, Activation::kIdentity);
  layer.weights = Matrix{{0.7}};
  layer.bias = {0.0};
  DenseCache cache;
  dense_forward(layer, Matrix{{3.0}}, cache);
  const auto g = dense_backward(layer, cache, Matrix{{1.0}});
  EXPECT_DOUBLE_EQ(g.weight_grad(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(g.input_grad(0, 0), 0.7);
  EXPECT_DOUBLE_EQ(g.bias_grad[0], 1.0);
}

TEST(Dense, DeadReluPassesNoGradient) {
  DenseLayer layer(2, 1, Activation::kReLU);
  layer.weights = Matrix{{1.0, 1.0}};
  layer.bias = {-5.0};
  DenseCache cache;
  dense_forward(layer, Matrix{{1.0, 2.0}}, cache);
  const auto g = dense_backward(layer, cache, Matrix{{1.0}});
  EXPECT_EQ(g.weight_grad, (Matrix{{0.0, 0.0}}));
  EXPECT_EQ(g.input_grad, (Matrix{{0.0, 0.0}}));
  EXPECT_EQ(g.bias_grad, std::vector<double>{0.0});
}

TEST(Dense, ForwardIsBitDeterministic) {
  Rng rng(3);
  DenseLayer layer(6, 4, Activation::kSoftplus);
  he_uniform_init(layer, rng);
  const auto x = random_matrix(5, 6, rng);
  EXPECT_EQ(dense_forward(layer, x), dense_forward(layer, x));
}

TEST(Dense, HeUniformBoundsAndZeroBias) {
  Rng rng(11);
  DenseLayer layer(50, 40, Activation::kReLU);
  he_uniform_init(layer, rng);
  const double bound = std::sqrt(6.0 / 50.0);
  double sum_sq = 0.0;
  for (double w : layer.weights.values()) {
    EXPECT_LE(std::abs(w), bound);
    sum_sq += w * w;
  }
  EXPECT_NEAR(std::sqrt(sum_sq / layer.weights.size()), std::sqrt(2.0 / 50.0), 0.01);
  for (double b : layer.bias) EXPECT_EQ(b, 0.0);
}

TEST(Dense, SoftmaxRowsAreDistributions) {
  const Matrix logits{{1000.0, 1001.0, 999.0}, {-3.0, 0.0, 2.0}};
  const auto p = softmax_rows(logits);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    double s = 0.0;
    for (double v : p.row(r)) {
      EXPECT_TRUE(std::isfinite(v));
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  const auto shifted = softmax_rows(Matrix{{0.0, 1.0, -1.0}});
  EXPECT_LT(max_abs_diff(p.row(0), shifted.row(0)), 1e-12);
}

// Three stacked layers, loss = sum(out .* R) for a fixed random R.
struct ThreeLayerNet {
  std::vector<DenseLayer> layers;
  Matrix x;
  Matrix r;

  double loss() const {
    Matrix h = x;
    for (const auto& l : layers) h = dense_forward(l, h);
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h.values()[i] * r.values()[i];
    return s;
  }

  std::vector<DenseGrads> grads() const {
    std::vector<DenseCache> caches(layers.size());
    Matrix h = x;
    for (std::size_t i = 0; i < layers.size(); ++i) h = dense_forward(layers[i], h, caches[i]);
    std::vector<DenseGrads> out(layers.size());
    Matrix up = r;
    for (std::size_t i = layers.size(); i-- > 0;) {
      out[i] = dense_backward(layers[i], caches[i], up);
      up = out[i].input_grad;
    }
    return out;
  }
};

TEST(GradCheck, ThreeLayerNetMatchesFiniteDifferences) {
  Rng rng(2024);
  ThreeLayerNet net;
  const std::vector<std::pair<std::size_t, Activation>> shape{
      {5, Activation::kSoftplus}, {4, Activation::kSigmoid}, {3, Activation::kIdentity}};
  std::size_t in = 6;
  for (auto [out, act] : shape) {
    DenseLayer l(in, out, act);
    for (auto& w : l.weights.values()) w = rng.uniform(-1.0, 1.0);
    for (auto& b : l.bias) b = rng.uniform(-1.0, 1.0);
    net.layers.push_back(l);
    in = out;
  }
  net.x = random_matrix(4, 6, rng);
  net.r = random_matrix(4, 3, rng);

  const auto g = net.grads();
  std::vector<ParamBlock> params;
  std::vector<GradBlock> analytic;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    params.push_back({"W" + std::to_string(i), net.layers[i].weights.values()});
    analytic.push_back({"W" + std::to_string(i), g[i].weight_grad.values()});
    params.push_back({"b" + std::to_string(i), net.layers[i].bias});
    analytic.push_back({"b" + std::to_string(i), g[i].bias_grad});
  }
  GradCheckOptions opt;
  opt.step = 1e-5;
  opt.tolerance = 1e-6;
  const auto report = gradient_check([&] { return net.loss(); }, params, analytic, opt);
  EXPECT_TRUE(report.passed) << report.max_rel_error << " at " << report.worst_param;
  EXPECT_LT(report.max_rel_error, 1e-6);
}

TEST(GradCheck, ReluLayerMatchesFiniteDifferences) {
  Rng rng(5);
  ThreeLayerNet net;
  DenseLayer l(4, 3, Activation::kReLU);
  for (auto& w : l.weights.values()) w = rng.uniform(-1.0, 1.0);
  for (auto& b : l.bias) b = rng.uniform(-1.0, 1.0);
  net.layers.push_back(l);
  net.x = random_matrix(6, 4, rng);
  net.r = random_matrix(6, 3, rng);
  const auto g = net.grads();
  const std::vector<ParamBlock> params{{"W", net.layers[0].weights.values()},
                                       {"b", net.layers[0].bias}};
  const std::vector<GradBlock> analytic{{"W", g[0].weight_grad.values()}, {"b", g[0].bias_grad}};
  GradCheckOptions opt;
  opt.tolerance = 1e-6;
  EXPECT_TRUE(gradient_check([&] { return net.loss(); }, params, analytic, opt).passed);
}

TEST(GradCheck, QuadraticIsExact) {
  std::vector<double> p{0.3, -1.7, 2.5, 0.0};
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = 2 * p[i];
  const std::vector<ParamBlock> params{{"p", p}};
  const std::vector<GradBlock> analytic{{"p", g}};
  const auto loss = [&] {
    double s = 0.0;
    for (double v : p) s += v * v;
    return s;
  };
  GradCheckOptions opt;
  opt.tolerance = 1e-8;
  const auto report = gradient_check(loss, params, analytic, opt);
  EXPECT_TRUE(report.passed) << report.max_rel_error;
  EXPECT_EQ(report.coords_checked, 4u);
}

TEST(GradCheck, CorruptedBiasGradientIsNamed) {
  Rng rng(9);
  ThreeLayerNet net;
  DenseLayer l(3, 2, Activation::kSigmoid);
  he_uniform_init(l, rng);
  net.layers.push_back(l);
  net.x = random_matrix(3, 3, rng);
  net.r = random_matrix(3, 2, rng);
  auto g = net.grads();
  g[0].bias_grad[1] += 0.1;
  const std::vector<ParamBlock> params{{"dense.weight", net.layers[0].weights.values()},
                                       {"dense.bias", net.layers[0].bias}};
  const std::vector<GradBlock> analytic{{"dense.weight", g[0].weight_grad.values()},
                                        {"dense.bias", g[0].bias_grad}};
  const auto report = gradient_check([&] { return net.loss(); }, params, analytic, {});
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.worst_block, "dense.bias");
  EXPECT_EQ(report.worst_param, "dense.bias[1]");
}

TEST(GradCheck, NonDeterministicLossIsRejected) {
  std::vector<double> p{1.0};
  std::vector<double> g{2.0};
  const std::vector<ParamBlock> params{{"p", p}};
  const std::vector<GradBlock> analytic{{"p", g}};
  int calls = 0;
  const auto loss = [&] { return p[0] * p[0] + 1e-3 * ++calls; };
  EXPECT_THROW(gradient_check(loss, params, analytic, {}), CheckInvalidError);
}

TEST(GradCheck, RestoresParametersBitExactly) {
  std::vector<double> p{0.1, 0.2, 0.3};
  const auto before = p;
  std::vector<double> g{0.2, 0.4, 0.6};
  const std::vector<ParamBlock> params{{"p", p}};
  const std::vector<GradBlock> analytic{{"p", g}};
  gradient_check(
      [&] {
        double s = 0.0;
        for (double v : p) s += v * v;
        return s;
      },
      params, analytic, {});
  EXPECT_EQ(p, before);
}

TEST(Adam, ZeroGradientLeavesParamsAndCountsStep) {
  std::vector<double> p{0.5, -0.25};
  const auto before = p;
  std::vector<double> g{0.0, 0.0};
  const std::vector<ParamBlock> params{{"p", p}};
  const std::vector<GradBlock> grads{{"p", g}};
  auto state = make_adam_state(params);
  for (int i = 1; i <= 3; ++i) {
    adam_step(params, grads, state);
    EXPECT_EQ(p, before);
    EXPECT_EQ(state.step, static_cast<std::uint64_t>(i));
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // Step 1: m_hat = g and v_hat = g^2, so the update is lr * g / (|g| + eps).
  for (double g0 : {1e-3, 0.5, -3.0, 250.0}) {
    std::vector<double> p{1.0};
    std::vector<double> g{g0};
    const std::vector<ParamBlock> params{{"p", p}};
    const std::vector<GradBlock> grads{{"p", g}};
    auto state = make_adam_state(params);
    adam_step(params, grads, state);
    const double expected = 1.0 - 1e-3 * g0 / (std::abs(g0) + 1e-8);
    EXPECT_NEAR(p[0], expected, 1e-15) << g0;
    EXPECT_NEAR(std::abs(p[0] - 1.0), 1e-3, 1e-8);
  }
}

TEST(Adam, SuccessiveStepsAreNotIdempotent) {
  std::vector<double> p{1.0};
  std::vector<double> g{0.3};
  const std::vector<ParamBlock> params{{"p", p}};
  const std::vector<GradBlock> grads{{"p", g}};
  auto state = make_adam_state(params);
  adam_step(params, grads, state);
  const double after_one = p[0];
  const auto m1 = state.first_moment[0][0];
  adam_step(params, grads, state);
  EXPECT_NE(p[0], after_one);
  EXPECT_NE(state.first_moment[0][0], m1);
}

TEST(Adam, NonFiniteGradientNamesBlockAndKeepsParams) {
  std::vector<double> a{1.0};
  std::vector<double> b{2.0};
  std::vector<double> ga{0.1};
  std::vector<double> gb{std::numeric_limits<double>::infinity()};
  const std::vector<ParamBlock> params{{"enc.w", a}, {"dec.b", b}};
  const std::vector<GradBlock> grads{{"enc.w", ga}, {"dec.b", gb}};
  auto state = make_adam_state(params);
  try {
    adam_step(params, grads, state);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("dec.b"), std::string::npos) << e.what();
  }
  EXPECT_EQ(a[0], 1.0);
  EXPECT_EQ(b[0], 2.0);
}

TEST(Adam, MinimizesQuadratic) {
  std::vector<double> p{3.0, -2.0};
  std::vector<double> g(2);
  const std::vector<ParamBlock> params{{"p", p}};
  const std::vector<GradBlock> grads{{"p", g}};
  auto state = make_adam_state(params, AdamConfig{.learning_rate = 0.05});
  for (int i = 0; i < 2000; ++i) {
    for (std::size_t k = 0; k < p.size(); ++k) g[k] = 2 * p[k];
    adam_step(params, grads, state);
  }
  EXPECT_NEAR(p[0], 0.0, 1e-3);
  EXPECT_NEAR(p[1], 0.0, 1e-3);
}

TEST(Rng, SerializationResumesStream) {
  Rng a(42);
  a.normal();
  Rng b = Rng::deserialize(a.serialize());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(mix_seed(1, 2), mix_seed(1, 3));
  EXPECT_EQ(hash_string("abc"), hash_string("abc"));
}

}  // namespace
}  // namespace dailoc::nn

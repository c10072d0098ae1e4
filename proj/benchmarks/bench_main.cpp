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

#include <benchmark/benchmark.h>

#include "dailoc/cesa/mmd.hpp"
#include "dailoc/common/rng.hpp"
#include "dailoc/model/mlvae.hpp"
#include "dailoc/model/objective.hpp"
#include "dailoc/nn/matrix.hpp"
#include "dailoc/sim/scenario.hpp"

namespace {

using namespace dailoc;

nn::Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  nn::Matrix m(r, c);
  for (auto& v : m.values()) v = rng.uniform(0.0, 1.0);
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 1);
  const auto b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(nn::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

// Reference building: 193 APs, 60 RPs.
model::ArchConfig reference_arch() {
  model::ArchConfig arch;
  arch.input_dim = 193;
  arch.n_rps = 60;
  return arch;
}

void BM_Forward(benchmark::State& state) {
  const auto m = model::make_model(reference_arch(), 3);
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 193, 4);
  for (auto _ : state) benchmark::DoNotOptimize(model::classify(m, model::encode(m, x).z_c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(32)->Arg(256);

void BM_ForwardBackward(benchmark::State& state) {
  const auto m = model::make_model(reference_arch(), 3);
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto x = random_matrix(batch, 193, 4);
  const auto eps = random_matrix(batch, m.arch.latent_dim, 5);
  const auto protos = random_matrix(60, m.arch.latent_dim, 6);
  std::vector<std::size_t> labels(batch);
  for (std::size_t i = 0; i < batch; ++i) labels[i] = i % 60;
  model::ObjectiveInput in;
  in.x = &x;
  in.eps = &eps;
  in.labels = labels;
  in.prototypes = &protos;
  auto grads = model::ModelGrads::zeros_like(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model::evaluate_objective(m, in, &grads));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(128);

void BM_Mmd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, 16, 7);
  const auto b = random_matrix(60, 16, 8);
  const cesa::KernelConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(cesa::mmd_loss(a, b, cfg));
}
BENCHMARK(BM_Mmd)->Arg(32)->Arg(128)->Arg(512);

void BM_GenerateScenario(benchmark::State& state) {
  sim::ScenarioSpec spec;
  spec.building = sim::building_preset(state.range(0) == 0 ? "toy" : "building1");
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::generate_scenario(spec));
    ++spec.seed;
  }
}
BENCHMARK(BM_GenerateScenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

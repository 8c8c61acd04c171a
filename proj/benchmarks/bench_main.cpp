// Copyright 2026 The IIKE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "iike/evaluator.hpp"
#include "iike/model.hpp"
#include "iike/trainer.hpp"
#include "support/synthetic.hpp"

namespace {

iike::EmbeddingSpace random_space(std::size_t entities, std::size_t relations, std::size_t dim,
                                  iike::Norm norm) {
  iike::ScoringParams params;
  params.norm = norm;
  iike::EmbeddingSpace space(entities, relations, dim, params);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (double& v : space.entity_data()) v = g(rng);
  for (double& v : space.relation_data()) v = g(rng);
  return space;
}

void BM_GradientStep(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  auto space = random_space(1000, 50, 50, iike::Norm::kL2);
  iike::Rng rng(3);
  iike::NegativeBundle negatives;
  iike::SparseGradient grad(space.dim());
  iike::Belief belief{iike::EntityId(1u), iike::RelationId(2u), iike::EntityId(3u), 0.9};
  for (auto _ : state) {
    iike::sample_negatives(space.entity_count(), space.relation_count(), belief.triple(), k, rng,
                           negatives);
    iike::gradient_step_terms(space, belief, negatives, grad);
    benchmark::DoNotOptimize(grad.loss);
  }
}
BENCHMARK(BM_GradientStep)->Arg(0)->Arg(5)->Arg(20);

void BM_RankOne(benchmark::State& state) {
  const auto entities = static_cast<std::size_t>(state.range(0));
  auto space = random_space(entities, 20, 50, iike::Norm::kL1);
  iike::TripleIndex filter;
  filter.finalize();
  iike::Triple truth{iike::EntityId(0u), iike::RelationId(0u), iike::EntityId(1u)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(iike::rank_both(space, filter, truth, iike::Side::kTail));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(entities));
}
BENCHMARK(BM_RankOne)->Arg(1000)->Arg(15000);

void BM_TrainEpochSynthetic(benchmark::State& state) {
  auto synth = iike::testing::make_translation_kb({});
  iike::TrainConfig config;
  config.dim = 20;
  config.learning_rate = 0.01;
  config.max_epochs = 1;
  for (auto _ : state) {
    auto result = iike::train(synth.kb, config);
    benchmark::DoNotOptimize(result.report.epochs.back().total_loss);
  }
}
BENCHMARK(BM_TrainEpochSynthetic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

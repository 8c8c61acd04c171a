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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "iike/data.hpp"
#include "iike/model.hpp"

namespace iike {

enum class LossMode { kSampled, kExact };

const char* to_string(LossMode mode);
LossMode parse_loss_mode(const std::string& text);

struct TrainConfig {
  std::size_t dim = 50;
  std::size_t negatives = 5;  // k, per position
  double learning_rate = 0.002;
  double convergence_threshold = 1e-4;
  std::size_t max_epochs = 1000;
  double bias = 7.0;
  Norm norm = Norm::kL2;
  double epsilon = 1e-7;
  double norm_floor = 1e-12;
  std::uint64_t seed = 1;
  bool shuffle_each_epoch = true;
  LossMode loss_mode = LossMode::kSampled;
  // Reject negatives that are known true triples (bounded retries).
  bool filter_negatives = false;
  // Rescale every vector to unit L2 length after each epoch.
  bool renormalize_each_epoch = false;

  ScoringParams scoring() const { return {bias, norm, epsilon, norm_floor}; }
  // Throws ConfigError when an invariant is violated.
  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double total_loss = 0.0;
  // NaN on the first epoch.
  double rel_change = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::size_t epochs_run = 0;
  std::vector<EpochStats> epochs;
  double final_rel_change = 0.0;
  double wall_seconds = 0.0;
  // Exact objective before the first update, filled in exact mode.
  std::optional<double> initial_exact_loss;
};

using Rng = std::mt19937_64;

EmbeddingSpace initialize(const KnowledgeBase& kb, const TrainConfig& config, Rng& rng);
EmbeddingSpace initialize(const KnowledgeBase& kb, const TrainConfig& config);

// Draws k head, k relation and k tail replacements uniformly from the full
// vocabularies, never equal to the element being replaced. With
// `known_triples` set, corrupted triples found there are redrawn (up to a
// bounded number of tries).
void sample_negatives(std::size_t entity_count, std::size_t relation_count, const Triple& positive,
                      std::size_t k, Rng& rng, NegativeBundle& out,
                      const TripleIndex* known_triples = nullptr);

using EpochCallback = std::function<void(const EpochStats&, const EmbeddingSpace&)>;

struct TrainResult {
  EmbeddingSpace space;
  TrainReport report;
};

// Initializes with config.seed and runs per-belief SGD until the relative
// change of the epoch loss drops to the threshold or max_epochs is reached.
TrainResult train(const KnowledgeBase& kb, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Continues training an existing space; `rng` supplies shuffling and sampling.
TrainReport train(const KnowledgeBase& kb, const TrainConfig& config, EmbeddingSpace& space,
                  Rng& rng, const EpochCallback& on_epoch = {});

}  // namespace iike

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

#include "iike/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace iike {

const char* to_string(LossMode mode) { return mode == LossMode::kExact ? "exact" : "sampled"; }

LossMode parse_loss_mode(const std::string& text) {
  if (text == "sampled") return LossMode::kSampled;
  if (text == "exact") return LossMode::kExact;
  throw ConfigError("unknown loss mode '" + text + "' (expected sampled or exact)");
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be at least 1");
  // Zero is accepted so a run can evaluate the initial embedding unchanged.
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be non-negative");
  }
  if (!(convergence_threshold >= 0.0)) throw ConfigError("convergence threshold must be >= 0");
  if (max_epochs < 1) throw ConfigError("max epochs must be at least 1");
  if (!std::isfinite(bias)) throw ConfigError("bias must be finite");
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in [0, 0.5)");
  if (!(norm_floor > 0.0)) throw ConfigError("norm floor must be positive");
}

namespace {

void normalize_rows(std::span<double> data, std::size_t dim) {
  for (std::size_t off = 0; off < data.size(); off += dim) {
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) sq += data[off + k] * data[off + k];
    const double n = std::sqrt(sq);
    if (n > 0.0) {
      for (std::size_t k = 0; k < dim; ++k) data[off + k] /= n;
    }
  }
}

void fill_uniform(std::span<double> data, std::size_t dim, Rng& rng) {
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  for (std::size_t off = 0; off < data.size(); off += dim) {
    double sq = 0.0;
    // A zero vector cannot be normalized; redraw it.
    while (sq == 0.0) {
      sq = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        data[off + k] = uniform(rng);
        sq += data[off + k] * data[off + k];
      }
    }
  }
  normalize_rows(data, dim);
}

// Uniform over [0, n) without `skip`.
std::size_t draw_other(std::size_t n, std::size_t skip, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 2);
  std::size_t v = pick(rng);
  return v >= skip ? v + 1 : v;
}

constexpr std::size_t kFilterTries = 100;

}  // namespace

EmbeddingSpace initialize(const KnowledgeBase& kb, const TrainConfig& config, Rng& rng) {
  config.validate();
  EmbeddingSpace space(kb.entity_count(), kb.relation_count(), config.dim, config.scoring());
  // Relations first, then entities.
  fill_uniform(space.relation_data(), config.dim, rng);
  fill_uniform(space.entity_data(), config.dim, rng);
  return space;
}

EmbeddingSpace initialize(const KnowledgeBase& kb, const TrainConfig& config) {
  Rng rng(config.seed);
  return initialize(kb, config, rng);
}

void sample_negatives(std::size_t entity_count, std::size_t relation_count, const Triple& pos,
                      std::size_t k, Rng& rng, NegativeBundle& out,
                      const TripleIndex* known_triples) {
  out.clear();
  if (k == 0) return;
  if (entity_count < 2) {
    throw DataError("cannot draw entity negatives from a vocabulary of " +
                    std::to_string(entity_count) + " entities");
  }
  if (relation_count < 2) {
    throw DataError("cannot draw relation negatives from a vocabulary of " +
                    std::to_string(relation_count) + " relations");
  }

  auto draw_entity = [&](EntityId original, auto make_triple) {
    EntityId e(draw_other(entity_count, original.index(), rng));
    if (known_triples) {
      for (std::size_t i = 1; i < kFilterTries && known_triples->contains(make_triple(e)); ++i) {
        e = EntityId(draw_other(entity_count, original.index(), rng));
      }
    }
    return e;
  };

  for (std::size_t j = 0; j < k; ++j) {
    out.heads.push_back(draw_entity(pos.head, [&](EntityId e) {
      return Triple{e, pos.relation, pos.tail};
    }));
  }
  for (std::size_t j = 0; j < k; ++j) {
    RelationId r(draw_other(relation_count, pos.relation.index(), rng));
    if (known_triples) {
      for (std::size_t i = 1;
           i < kFilterTries && known_triples->contains({pos.head, r, pos.tail}); ++i) {
        r = RelationId(draw_other(relation_count, pos.relation.index(), rng));
      }
    }
    out.relations.push_back(r);
  }
  for (std::size_t j = 0; j < k; ++j) {
    out.tails.push_back(draw_entity(pos.tail, [&](EntityId e) {
      return Triple{pos.head, pos.relation, e};
    }));
  }
}

TrainReport train(const KnowledgeBase& kb, const TrainConfig& config, EmbeddingSpace& space,
                  Rng& rng, const EpochCallback& on_epoch) {
  config.validate();
  if (kb.train.empty()) throw DataError("training split is empty");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  TrainReport report;
  if (config.loss_mode == LossMode::kExact) {
    report.initial_exact_loss = exact_total_loss(space, kb.train);
  }

  std::vector<std::size_t> order(kb.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  NegativeBundle negatives;
  SparseGradient grad(space.dim());
  const TripleIndex* filter = config.filter_negatives ? &kb.all_triples : nullptr;

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    if (config.shuffle_each_epoch) std::shuffle(order.begin(), order.end(), rng);

    double sampled_total = 0.0;
    for (std::size_t idx : order) {
      const Belief& b = kb.train[idx];
      sample_negatives(space.entity_count(), space.relation_count(), b.triple(),
                       config.negatives, rng, negatives, filter);
      gradient_step_terms(space, b, negatives, grad);
      if (!std::isfinite(grad.loss)) {
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) +
                              ", training belief #" + std::to_string(idx) +
                              "; the learning rate is probably too large");
      }
      grad.apply(space, config.learning_rate);
      sampled_total += grad.loss;
    }
    if (config.renormalize_each_epoch) {
      normalize_rows(space.entity_data(), space.dim());
      normalize_rows(space.relation_data(), space.dim());
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.total_loss = config.loss_mode == LossMode::kExact ? exact_total_loss(space, kb.train)
                                                            : sampled_total;
    if (!std::isfinite(stats.total_loss)) {
      throw DivergenceError("non-finite total loss after epoch " + std::to_string(epoch));
    }
    stats.rel_change = std::isnan(previous)
                           ? std::numeric_limits<double>::quiet_NaN()
                           : std::abs(previous - stats.total_loss) /
                                 std::max(previous, config.norm_floor);
    stats.seconds = std::chrono::duration<double>(Clock::now() - epoch_start).count();
    report.epochs.push_back(stats);
    report.epochs_run = epoch;
    report.final_rel_change = stats.rel_change;
    if (on_epoch) on_epoch(stats, space);

    previous = stats.total_loss;
    if (!std::isnan(stats.rel_change) && stats.rel_change <= config.convergence_threshold) break;
  }
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

TrainResult train(const KnowledgeBase& kb, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  Rng rng(config.seed);
  TrainResult result{initialize(kb, config, rng), {}};
  result.report = train(kb, config, result.space, rng, on_epoch);
  return result;
}

}  // namespace iike

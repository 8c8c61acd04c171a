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

#include <cstddef>
#include <span>
#include <vector>

#include "iike/types.hpp"

namespace iike {

struct ScoringParams {
  double bias = 7.0;
  Norm norm = Norm::kL2;
  // Offset added to the logistic so neither log argument reaches zero.
  double epsilon = 1e-7;
  // Lower clamp on the L2 residual norm when forming its gradient.
  double norm_floor = 1e-12;

  friend bool operator==(const ScoringParams&, const ScoringParams&) = default;
};

/// Dense entity and relation vectors (row-major) plus scoring parameters.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  EmbeddingSpace(std::size_t entity_count, std::size_t relation_count, std::size_t dim,
                 ScoringParams params = {});

  std::size_t dim() const { return dim_; }
  std::size_t entity_count() const { return entity_count_; }
  std::size_t relation_count() const { return relation_count_; }
  const ScoringParams& params() const { return params_; }
  ScoringParams& params() { return params_; }

  std::span<double> entity(EntityId id) {
    return {entity_data_.data() + id.index() * dim_, dim_};
  }
  std::span<const double> entity(EntityId id) const {
    return {entity_data_.data() + id.index() * dim_, dim_};
  }
  std::span<double> relation(RelationId id) {
    return {relation_data_.data() + id.index() * dim_, dim_};
  }
  std::span<const double> relation(RelationId id) const {
    return {relation_data_.data() + id.index() * dim_, dim_};
  }

  std::span<double> entity_data() { return entity_data_; }
  std::span<const double> entity_data() const { return entity_data_; }
  std::span<double> relation_data() { return relation_data_; }
  std::span<const double> relation_data() const { return relation_data_; }

  bool all_finite() const;

  friend bool operator==(const EmbeddingSpace&, const EmbeddingSpace&) = default;

 private:
  std::size_t entity_count_ = 0;
  std::size_t relation_count_ = 0;
  std::size_t dim_ = 0;
  ScoringParams params_;
  std::vector<double> entity_data_;
  std::vector<double> relation_data_;
};

// ||h + r - t|| under the configured norm; the ranking and classification
// score.
double distance(const EmbeddingSpace& space, const Triple& triple);

// D = -||h + r - t|| + b.
double dissimilarity(const EmbeddingSpace& space, const Triple& triple);

// Plain logistic 1 / (1 + exp(-x)), evaluated without overflow.
double logistic(double x);

// Pr(1 | h, r, t) = logistic(D) + epsilon.
inline double prob_true_of(double d, double epsilon) { return logistic(d) + epsilon; }
// Pr(0 | h, r, t) = 1 - Pr(1 | h, r, t) + 2 epsilon = logistic(-D) + epsilon.
inline double prob_false_of(double d, double epsilon) { return logistic(-d) + epsilon; }

double prob_true(const EmbeddingSpace& space, const Triple& triple);
double prob_false(const EmbeddingSpace& space, const Triple& triple);

struct LogConditionals {
  double head = 0.0;      // log Pr(h | r, t)
  double relation = 0.0;  // log Pr(r | h, t)
  double tail = 0.0;      // log Pr(t | h, r)
};

// Log-softmax of D over every entity (head and tail) or relation. Cost is
// O((2|E| + |R|) d), meant for small vocabularies and tests.
LogConditionals exact_log_conditionals(const EmbeddingSpace& space, const Triple& triple);

// log Pr(h, r, t): the mean of the three log conditionals.
double exact_joint_log_prob(const EmbeddingSpace& space, const Triple& triple);

// Sum of belief_loss over beliefs using the exact joint probability.
double exact_total_loss(const EmbeddingSpace& space, std::span<const Belief> beliefs);

/// Corrupted replacements for one positive belief, k per position.
struct NegativeBundle {
  std::vector<EntityId> heads;
  std::vector<RelationId> relations;
  std::vector<EntityId> tails;

  void clear() {
    heads.clear();
    relations.clear();
    tails.clear();
  }
  std::size_t size() const { return heads.size() + relations.size() + tails.size(); }
};

struct SampledLogProb {
  double value = 0.0;
  // Dissimilarities of the positive and of each negative, in bundle order.
  double positive_d = 0.0;
  std::vector<double> head_d;
  std::vector<double> relation_d;
  std::vector<double> tail_d;
};

// (1/3) sum over positions of [log Pr(1|positive) + sum_j log Pr(0|negative_j)].
SampledLogProb sampled_log_prob(const EmbeddingSpace& space, const Triple& positive,
                                const NegativeBundle& negatives);
void sampled_log_prob(const EmbeddingSpace& space, const Triple& positive,
                      const NegativeBundle& negatives, SampledLogProb& out);

// 0.5 * (value - log confidence)^2.
double belief_loss(double log_prob, double confidence);

// Loss gradients for the vectors touched by one positive and its negatives.
// Contributions that land on the same id are summed.
class SparseGradient {
 public:
  explicit SparseGradient(std::size_t dim = 0) : dim_(dim) {}

  void reset(std::size_t dim);

  std::span<double> entity_row(EntityId id);
  std::span<double> relation_row(RelationId id);

  std::span<const EntityId> entity_ids() const { return entity_ids_; }
  std::span<const RelationId> relation_ids() const { return relation_ids_; }
  std::span<const double> entity_grad(std::size_t slot) const {
    return {entity_grads_.data() + slot * dim_, dim_};
  }
  std::span<const double> relation_grad(std::size_t slot) const {
    return {relation_grads_.data() + slot * dim_, dim_};
  }

  // v <- v - learning_rate * grad for every touched vector.
  void apply(EmbeddingSpace& space, double learning_rate) const;

  double log_prob = 0.0;
  double loss = 0.0;

 private:
  std::size_t dim_ = 0;
  std::vector<EntityId> entity_ids_;
  std::vector<RelationId> relation_ids_;
  std::vector<double> entity_grads_;
  std::vector<double> relation_grads_;
};

// Fills `grad` with d loss / d vector for every vector the bundle touches,
// and records the sampled log-probability and loss.
void gradient_step_terms(const EmbeddingSpace& space, const Belief& belief,
                         const NegativeBundle& negatives, SparseGradient& grad);

}  // namespace iike

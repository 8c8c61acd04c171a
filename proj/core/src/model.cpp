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

#include "iike/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iike {

EmbeddingSpace::EmbeddingSpace(std::size_t entity_count, std::size_t relation_count,
                               std::size_t dim, ScoringParams params)
    : entity_count_(entity_count),
      relation_count_(relation_count),
      dim_(dim),
      params_(params),
      entity_data_(entity_count * dim, 0.0),
      relation_data_(relation_count * dim, 0.0) {
  if (dim == 0) throw ConfigError("embedding dimension must be at least 1");
  if (!(params.norm_floor > 0.0)) throw ConfigError("norm floor must be positive");
  if (!(params.epsilon >= 0.0 && params.epsilon < 0.5)) {
    throw ConfigError("epsilon must lie in [0, 0.5)");
  }
}

bool EmbeddingSpace::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(entity_data_.begin(), entity_data_.end(), finite) &&
         std::all_of(relation_data_.begin(), relation_data_.end(), finite);
}

namespace {

double residual_norm(std::span<const double> h, std::span<const double> r,
                     std::span<const double> t, Norm norm) {
  double acc = 0.0;
  if (norm == Norm::kL1) {
    for (std::size_t k = 0; k < h.size(); ++k) acc += std::abs(h[k] + r[k] - t[k]);
    return acc;
  }
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double x = h[k] + r[k] - t[k];
    acc += x * x;
  }
  return std::sqrt(acc);
}

double dissimilarity_of(const EmbeddingSpace& space, EntityId h, RelationId r, EntityId t) {
  return -residual_norm(space.entity(h), space.relation(r), space.entity(t),
                        space.params().norm) +
         space.params().bias;
}

// log(sum(exp(values))) with max subtraction.
double log_sum_exp(std::span<const double> values) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace

double distance(const EmbeddingSpace& space, const Triple& tr) {
  return residual_norm(space.entity(tr.head), space.relation(tr.relation),
                       space.entity(tr.tail), space.params().norm);
}

double dissimilarity(const EmbeddingSpace& space, const Triple& tr) {
  return dissimilarity_of(space, tr.head, tr.relation, tr.tail);
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double prob_true(const EmbeddingSpace& space, const Triple& tr) {
  return prob_true_of(dissimilarity(space, tr), space.params().epsilon);
}

double prob_false(const EmbeddingSpace& space, const Triple& tr) {
  return prob_false_of(dissimilarity(space, tr), space.params().epsilon);
}

LogConditionals exact_log_conditionals(const EmbeddingSpace& space, const Triple& tr) {
  const double d = dissimilarity(space, tr);
  std::vector<double> scores(std::max(space.entity_count(), space.relation_count()));

  LogConditionals out;
  scores.resize(space.entity_count());
  for (std::size_t e = 0; e < space.entity_count(); ++e) {
    scores[e] = dissimilarity_of(space, EntityId(e), tr.relation, tr.tail);
  }
  out.head = d - log_sum_exp(scores);

  for (std::size_t e = 0; e < space.entity_count(); ++e) {
    scores[e] = dissimilarity_of(space, tr.head, tr.relation, EntityId(e));
  }
  out.tail = d - log_sum_exp(scores);

  scores.resize(space.relation_count());
  for (std::size_t r = 0; r < space.relation_count(); ++r) {
    scores[r] = dissimilarity_of(space, tr.head, RelationId(r), tr.tail);
  }
  out.relation = d - log_sum_exp(scores);
  return out;
}

double exact_joint_log_prob(const EmbeddingSpace& space, const Triple& tr) {
  const auto c = exact_log_conditionals(space, tr);
  return (c.head + c.relation + c.tail) / 3.0;
}

double exact_total_loss(const EmbeddingSpace& space, std::span<const Belief> beliefs) {
  double total = 0.0;
  for (const auto& b : beliefs) {
    total += belief_loss(exact_joint_log_prob(space, b.triple()), b.confidence);
  }
  return total;
}

void sampled_log_prob(const EmbeddingSpace& space, const Triple& pos,
                      const NegativeBundle& neg, SampledLogProb& out) {
  const double eps = space.params().epsilon;
  out.positive_d = dissimilarity(space, pos);
  out.head_d.resize(neg.heads.size());
  out.relation_d.resize(neg.relations.size());
  out.tail_d.resize(neg.tails.size());

  double negative_sum = 0.0;
  for (std::size_t j = 0; j < neg.heads.size(); ++j) {
    out.head_d[j] = dissimilarity_of(space, neg.heads[j], pos.relation, pos.tail);
    negative_sum += std::log(prob_false_of(out.head_d[j], eps));
  }
  for (std::size_t j = 0; j < neg.relations.size(); ++j) {
    out.relation_d[j] = dissimilarity_of(space, pos.head, neg.relations[j], pos.tail);
    negative_sum += std::log(prob_false_of(out.relation_d[j], eps));
  }
  for (std::size_t j = 0; j < neg.tails.size(); ++j) {
    out.tail_d[j] = dissimilarity_of(space, pos.head, pos.relation, neg.tails[j]);
    negative_sum += std::log(prob_false_of(out.tail_d[j], eps));
  }
  // The positive term appears once per position, so its three (1/3)-weighted
  // copies add up to one.
  out.value = std::log(prob_true_of(out.positive_d, eps)) + negative_sum / 3.0;
}

SampledLogProb sampled_log_prob(const EmbeddingSpace& space, const Triple& pos,
                                const NegativeBundle& neg) {
  SampledLogProb out;
  sampled_log_prob(space, pos, neg, out);
  return out;
}

double belief_loss(double log_prob, double confidence) {
  const double diff = log_prob - std::log(confidence);
  return 0.5 * diff * diff;
}

void SparseGradient::reset(std::size_t dim) {
  dim_ = dim;
  entity_ids_.clear();
  relation_ids_.clear();
  entity_grads_.clear();
  relation_grads_.clear();
  log_prob = 0.0;
  loss = 0.0;
}

std::span<double> SparseGradient::entity_row(EntityId id) {
  auto it = std::find(entity_ids_.begin(), entity_ids_.end(), id);
  std::size_t slot = static_cast<std::size_t>(it - entity_ids_.begin());
  if (it == entity_ids_.end()) {
    entity_ids_.push_back(id);
    entity_grads_.resize(entity_grads_.size() + dim_, 0.0);
  }
  return {entity_grads_.data() + slot * dim_, dim_};
}

std::span<double> SparseGradient::relation_row(RelationId id) {
  auto it = std::find(relation_ids_.begin(), relation_ids_.end(), id);
  std::size_t slot = static_cast<std::size_t>(it - relation_ids_.begin());
  if (it == relation_ids_.end()) {
    relation_ids_.push_back(id);
    relation_grads_.resize(relation_grads_.size() + dim_, 0.0);
  }
  return {relation_grads_.data() + slot * dim_, dim_};
}

void SparseGradient::apply(EmbeddingSpace& space, double learning_rate) const {
  for (std::size_t s = 0; s < entity_ids_.size(); ++s) {
    auto v = space.entity(entity_ids_[s]);
    auto g = entity_grad(s);
    for (std::size_t k = 0; k < dim_; ++k) v[k] -= learning_rate * g[k];
  }
  for (std::size_t s = 0; s < relation_ids_.size(); ++s) {
    auto v = space.relation(relation_ids_[s]);
    auto g = relation_grad(s);
    for (std::size_t k = 0; k < dim_; ++k) v[k] -= learning_rate * g[k];
  }
}

namespace {

// Adds weight * dD/d(vector) for one scored triple, where D = -||h + r - t|| + b.
void accumulate_term(const EmbeddingSpace& space, EntityId h, RelationId r, EntityId t,
                     double weight, std::vector<double>& residual, SparseGradient& grad) {
  if (weight == 0.0) return;
  const std::size_t dim = space.dim();
  auto hv = space.entity(h);
  auto rv = space.relation(r);
  auto tv = space.entity(t);
  residual.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) residual[k] = hv[k] + rv[k] - tv[k];

  // residual becomes d||x|| / dx.
  if (space.params().norm == Norm::kL2) {
    double sq = 0.0;
    for (double x : residual) sq += x * x;
    const double scale = 1.0 / std::max(std::sqrt(sq), space.params().norm_floor);
    for (double& x : residual) x *= scale;
  } else {
    for (double& x : residual) x = static_cast<double>((x > 0.0) - (x < 0.0));
  }

  // dD/dh = -u, dD/dr = -u, dD/dt = +u.
  auto gh = grad.entity_row(h);
  for (std::size_t k = 0; k < dim; ++k) gh[k] -= weight * residual[k];
  auto gr = grad.relation_row(r);
  for (std::size_t k = 0; k < dim; ++k) gr[k] -= weight * residual[k];
  auto gt = grad.entity_row(t);
  for (std::size_t k = 0; k < dim; ++k) gt[k] += weight * residual[k];
}

}  // namespace

void gradient_step_terms(const EmbeddingSpace& space, const Belief& belief,
                         const NegativeBundle& neg, SparseGradient& grad) {
  thread_local SampledLogProb cache;
  thread_local std::vector<double> residual;

  grad.reset(space.dim());
  const Triple pos = belief.triple();
  sampled_log_prob(space, pos, neg, cache);
  grad.log_prob = cache.value;
  grad.loss = belief_loss(cache.value, belief.confidence);

  const double eps = space.params().epsilon;
  const double g = cache.value - std::log(belief.confidence);

  // d/dD log(s(D) + eps) = s(D) s(-D) / (s(D) + eps)
  auto positive_slope = [eps](double d) {
    const double s = logistic(d);
    return s * logistic(-d) / (s + eps);
  };
  // d/dD log(s(-D) + eps) = -s(D) s(-D) / (s(-D) + eps)
  auto negative_slope = [eps](double d) {
    const double sn = logistic(-d);
    return -logistic(d) * sn / (sn + eps);
  };

  accumulate_term(space, pos.head, pos.relation, pos.tail, g * positive_slope(cache.positive_d),
                  residual, grad);
  const double third = 1.0 / 3.0;
  for (std::size_t j = 0; j < neg.heads.size(); ++j) {
    accumulate_term(space, neg.heads[j], pos.relation, pos.tail,
                    g * third * negative_slope(cache.head_d[j]), residual, grad);
  }
  for (std::size_t j = 0; j < neg.relations.size(); ++j) {
    accumulate_term(space, pos.head, neg.relations[j], pos.tail,
                    g * third * negative_slope(cache.relation_d[j]), residual, grad);
  }
  for (std::size_t j = 0; j < neg.tails.size(); ++j) {
    accumulate_term(space, pos.head, pos.relation, neg.tails[j],
                    g * third * negative_slope(cache.tail_d[j]), residual, grad);
  }
}

}  // namespace iike

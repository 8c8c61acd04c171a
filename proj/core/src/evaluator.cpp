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

#include "iike/evaluator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

namespace iike {

namespace {

// Residual norms for every entity substituted at `side`. The expression
// order matches distance() so equal candidates compare equal.
void candidate_distances(const EmbeddingSpace& space, const Triple& truth, Side side,
                         std::vector<double>& out) {
  const std::size_t dim = space.dim();
  const std::size_t n = space.entity_count();
  const bool l1 = space.params().norm == Norm::kL1;
  auto r = space.relation(truth.relation);
  out.resize(n);
  if (side == Side::kTail) {
    auto h = space.entity(truth.head);
    for (std::size_t e = 0; e < n; ++e) {
      auto t = space.entity(EntityId(e));
      double acc = 0.0;
      if (l1) {
        for (std::size_t k = 0; k < dim; ++k) acc += std::abs(h[k] + r[k] - t[k]);
      } else {
        for (std::size_t k = 0; k < dim; ++k) {
          const double x = h[k] + r[k] - t[k];
          acc += x * x;
        }
        acc = std::sqrt(acc);
      }
      out[e] = acc;
    }
  } else {
    auto t = space.entity(truth.tail);
    for (std::size_t e = 0; e < n; ++e) {
      auto h = space.entity(EntityId(e));
      double acc = 0.0;
      if (l1) {
        for (std::size_t k = 0; k < dim; ++k) acc += std::abs(h[k] + r[k] - t[k]);
      } else {
        for (std::size_t k = 0; k < dim; ++k) {
          const double x = h[k] + r[k] - t[k];
          acc += x * x;
        }
        acc = std::sqrt(acc);
      }
      out[e] = acc;
    }
  }
}

RankResult rank_from(std::span<const double> dists, const TripleIndex& filter,
                     const Triple& truth, Side side) {
  const EntityId original = side == Side::kHead ? truth.head : truth.tail;
  const double target = dists[original.index()];
  std::size_t better = 0;
  for (std::size_t e = 0; e < dists.size(); ++e) {
    if (e != original.index() && dists[e] <= target) ++better;
  }
  auto known = side == Side::kHead ? filter.heads_given(truth.relation, truth.tail)
                                   : filter.tails_given(truth.head, truth.relation);
  std::size_t removed = 0;
  for (EntityId e : known) {
    if (e != original && e.index() < dists.size() && dists[e.index()] <= target) ++removed;
  }
  return {better + 1, better - removed + 1};
}

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
  return std::string(buf, ptr);
}

}  // namespace

RankResult rank_both(const EmbeddingSpace& space, const TripleIndex& filter, const Triple& truth,
                     Side side) {
  std::vector<double> dists;
  candidate_distances(space, truth, side, dists);
  return rank_from(dists, filter, truth, side);
}

std::size_t rank_one(const EmbeddingSpace& space, const TripleIndex& filter, const Triple& truth,
                     Side side, bool filtered) {
  auto r = rank_both(space, filter, truth, side);
  return filtered ? r.filtered : r.raw;
}

RankReport link_prediction(const EmbeddingSpace& space, const TripleIndex& filter,
                           std::span<const Belief> test, const LinkPredictionOptions& opts) {
  RankReport report;
  report.entity_count = space.entity_count();
  report.hit_ks = opts.hit_ks;
  report.ranks.resize(2 * test.size());

  std::size_t threads = opts.threads ? opts.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(test.size(), 1));

  auto work = [&](std::size_t worker) {
    std::vector<double> dists;
    for (std::size_t i = worker; i < test.size(); i += threads) {
      const Triple truth = test[i].triple();
      for (Side side : {Side::kHead, Side::kTail}) {
        candidate_distances(space, truth, side, dists);
        auto r = rank_from(dists, filter, truth, side);
        report.ranks[2 * i + (side == Side::kTail)] = {i, side, r.raw, r.filtered};
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  if (report.ranks.empty()) {
    report.hits_raw.assign(report.hit_ks.size(), 0.0);
    report.hits_filtered.assign(report.hit_ks.size(), 0.0);
    return report;
  }
  double sum_raw = 0.0, sum_filtered = 0.0;
  std::size_t h10_raw = 0, h10_filtered = 0;
  std::vector<std::size_t> hits_raw(report.hit_ks.size()), hits_filtered(report.hit_ks.size());
  for (const auto& r : report.ranks) {
    sum_raw += static_cast<double>(r.raw);
    sum_filtered += static_cast<double>(r.filtered);
    h10_raw += r.raw <= 10;
    h10_filtered += r.filtered <= 10;
    for (std::size_t j = 0; j < report.hit_ks.size(); ++j) {
      hits_raw[j] += r.raw <= report.hit_ks[j];
      hits_filtered[j] += r.filtered <= report.hit_ks[j];
    }
  }
  const double n = static_cast<double>(report.ranks.size());
  report.mean_rank_raw = sum_raw / n;
  report.mean_rank_filtered = sum_filtered / n;
  report.hit10_raw = static_cast<double>(h10_raw) / n;
  report.hit10_filtered = static_cast<double>(h10_filtered) / n;
  for (std::size_t j = 0; j < report.hit_ks.size(); ++j) {
    report.hits_raw.push_back(static_cast<double>(hits_raw[j]) / n);
    report.hits_filtered.push_back(static_cast<double>(hits_filtered[j]) / n);
  }
  return report;
}

void print_rank_report(std::ostream& out, const RankReport& r) {
  out << "entities\t" << r.entity_count << '\n'
      << "ranked\t" << r.ranks.size() << '\n'
      << "mean_rank_raw\t" << fmt(r.mean_rank_raw) << '\n'
      << "mean_rank_filtered\t" << fmt(r.mean_rank_filtered) << '\n';
  for (std::size_t j = 0; j < r.hit_ks.size(); ++j) {
    out << "hit@" << r.hit_ks[j] << "_raw\t" << fmt(r.hits_raw[j]) << '\n'
        << "hit@" << r.hit_ks[j] << "_filtered\t" << fmt(r.hits_filtered[j]) << '\n';
  }
}

void write_rank_csv(std::ostream& out, const RankReport& r) {
  out << "mode,mean_rank";
  for (auto k : r.hit_ks) out << ",hit@" << k;
  out << '\n' << "raw," << fmt(r.mean_rank_raw);
  for (double h : r.hits_raw) out << ',' << fmt(h);
  out << '\n' << "filtered," << fmt(r.mean_rank_filtered);
  for (double h : r.hits_filtered) out << ',' << fmt(h);
  out << '\n';
}

void write_rank_dump(std::ostream& out, const RankReport& report, std::span<const Belief> test,
                     const KnowledgeBase& kb) {
  out << "head\trelation\ttail\tside\traw_rank\tfiltered_rank\n";
  for (const auto& r : report.ranks) {
    const Belief& b = test[r.belief_index];
    out << kb.entities.name(b.head) << '\t' << kb.relations.name(b.relation) << '\t'
        << kb.entities.name(b.tail) << '\t' << (r.side == Side::kHead ? "head" : "tail") << '\t'
        << r.raw << '\t' << r.filtered << '\n';
  }
}

std::vector<ScoredExample> score_examples(const EmbeddingSpace& space,
                                          std::span<const LabeledExample> examples) {
  std::vector<ScoredExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back({ex.belief.relation, distance(space, ex.belief.triple()), ex.label});
  }
  return out;
}

ThresholdFit fit_threshold(std::span<const ScoredExample> examples) {
  if (examples.empty()) return {};
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(examples.size());
  std::size_t positives = 0;
  for (const auto& ex : examples) {
    sorted.emplace_back(ex.distance, ex.label);
    positives += ex.label;
  }
  std::sort(sorted.begin(), sorted.end());
  const std::size_t negatives = sorted.size() - positives;
  const double n = static_cast<double>(sorted.size());

  // Everything predicted negative.
  ThresholdFit best{sorted.front().first - 1.0, static_cast<double>(negatives) / n};
  std::size_t pos_below = 0, neg_below = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double value = sorted[i].first;
    for (; i < sorted.size() && sorted[i].first == value; ++i) {
      (sorted[i].second ? pos_below : neg_below) += 1;
    }
    const double threshold =
        i < sorted.size() ? value + (sorted[i].first - value) / 2.0 : value + 1.0;
    const double acc = static_cast<double>(pos_below + (negatives - neg_below)) / n;
    if (acc > best.accuracy) best = {threshold, acc};
  }
  return best;
}

Thresholds fit_thresholds(std::span<const ScoredExample> validation) {
  Thresholds out;
  out.global = fit_threshold(validation).threshold;
  std::map<RelationId, std::vector<ScoredExample>> by_relation;
  for (const auto& ex : validation) by_relation[ex.relation].push_back(ex);
  for (const auto& [r, list] : by_relation) out.per_relation[r] = fit_threshold(list).threshold;
  return out;
}

Thresholds fit_thresholds(const EmbeddingSpace& space,
                          std::span<const LabeledExample> validation) {
  auto scored = score_examples(space, validation);
  return fit_thresholds(scored);
}

std::vector<PrPoint> pr_curve(std::span<const ScoredExample> examples) {
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(examples.size());
  std::size_t positives = 0;
  for (const auto& ex : examples) {
    sorted.emplace_back(ex.distance, ex.label);
    positives += ex.label;
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<PrPoint> curve;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double value = sorted[i].first;
    for (; i < sorted.size() && sorted[i].first == value; ++i) {
      tp += sorted[i].second;
      ++seen;
    }
    const double recall =
        positives ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
    curve.push_back({recall, static_cast<double>(tp) / static_cast<double>(seen)});
  }
  return curve;
}

double pr_auc(std::span<const PrPoint> curve) {
  if (curve.empty()) return 0.0;
  PrPoint prev{0.0, curve.front().precision};
  double area = 0.0;
  for (const auto& p : curve) {
    area += (p.recall - prev.recall) * (p.precision + prev.precision) / 2.0;
    prev = p;
  }
  return area;
}

ClassifyReport classify(const Thresholds& thresholds, std::span<const ScoredExample> examples) {
  ClassifyReport report;
  report.thresholds = thresholds;
  report.examples = examples.size();
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const bool predicted = ex.distance < thresholds.for_relation(ex.relation);
    correct += predicted == ex.label;
  }
  report.accuracy =
      examples.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(examples.size());
  report.pr_curve = pr_curve(examples);
  report.auc = pr_auc(report.pr_curve);
  return report;
}

ClassifyReport classify(const EmbeddingSpace& space, const Thresholds& thresholds,
                        std::span<const LabeledExample> examples) {
  auto scored = score_examples(space, examples);
  return classify(thresholds, scored);
}

void print_classify_report(std::ostream& out, const ClassifyReport& r) {
  out << "examples\t" << r.examples << '\n'
      << "accuracy\t" << fmt(r.accuracy) << '\n'
      << "auc\t" << fmt(r.auc) << '\n'
      << "global_threshold\t" << fmt(r.thresholds.global) << '\n'
      << "relation_thresholds\t" << r.thresholds.per_relation.size() << '\n';
}

void write_pr_csv(std::ostream& out, std::span<const PrPoint> curve) {
  out << "recall,precision\n";
  for (const auto& p : curve) out << fmt(p.recall) << ',' << fmt(p.precision) << '\n';
}

void write_classify_csv(std::ostream& out, const ClassifyReport& r) {
  out << "examples,accuracy,auc,global_threshold\n"
      << r.examples << ',' << fmt(r.accuracy) << ',' << fmt(r.auc) << ','
      << fmt(r.thresholds.global) << '\n';
}

void write_thresholds_tsv(std::ostream& out, const Thresholds& thresholds,
                          const RelationVocab& relations) {
  out << "relation\tthreshold\n";
  for (const auto& [r, t] : thresholds.per_relation) {
    out << relations.name(r) << '\t' << fmt(t) << '\n';
  }
  out << "*\t" << fmt(thresholds.global) << '\n';
}

}  // namespace iike

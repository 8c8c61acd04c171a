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
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "iike/data.hpp"
#include "iike/model.hpp"

namespace iike {

// ---- Link prediction -------------------------------------------------------

/// Ranks of one test belief on one side. A rank of 1 is best.
struct TripleRank {
  std::size_t belief_index = 0;
  Side side = Side::kHead;
  std::size_t raw = 0;
  std::size_t filtered = 0;
};

struct RankReport {
  double mean_rank_raw = 0.0;
  double mean_rank_filtered = 0.0;
  double hit10_raw = 0.0;
  double hit10_filtered = 0.0;
  // Hit@K for every requested K, parallel to hit_ks.
  std::vector<std::size_t> hit_ks;
  std::vector<double> hits_raw;
  std::vector<double> hits_filtered;
  std::vector<TripleRank> ranks;  // head then tail for each belief, in input order
  std::size_t entity_count = 0;
};

struct RankResult {
  std::size_t raw = 0;
  std::size_t filtered = 0;
};

// Replaces the chosen side with every entity and scores ||h + r - t||.
// Ties count against the ground truth. Filtered mode drops candidates other
// than the ground truth that appear in `filter`.
RankResult rank_both(const EmbeddingSpace& space, const TripleIndex& filter, const Triple& truth,
                     Side side);
std::size_t rank_one(const EmbeddingSpace& space, const TripleIndex& filter, const Triple& truth,
                     Side side, bool filtered);

struct LinkPredictionOptions {
  std::vector<std::size_t> hit_ks{10};
  // 0 means std::thread::hardware_concurrency().
  std::size_t threads = 0;
};

// Filter is typically kb.all_triples; pass an index over train only to
// reproduce train-only filtering.
RankReport link_prediction(const EmbeddingSpace& space, const TripleIndex& filter,
                           std::span<const Belief> test, const LinkPredictionOptions& opts = {});

void print_rank_report(std::ostream& out, const RankReport& report);
// Header row then one row: metric columns for raw and filtered.
void write_rank_csv(std::ostream& out, const RankReport& report);
// head relation tail side raw_rank filtered_rank
void write_rank_dump(std::ostream& out, const RankReport& report, std::span<const Belief> test,
                     const KnowledgeBase& kb);

// ---- Triplet classification ------------------------------------------------

struct ScoredExample {
  RelationId relation;
  double distance = 0.0;
  bool label = false;
};

std::vector<ScoredExample> score_examples(const EmbeddingSpace& space,
                                          std::span<const LabeledExample> examples);

struct ThresholdFit {
  double threshold = 0.0;
  double accuracy = 0.0;
};

// Best cutoff for "positive iff distance < threshold" among midpoints of
// consecutive distinct scores plus one point below and above the range. Ties
// go to the smallest threshold.
ThresholdFit fit_threshold(std::span<const ScoredExample> examples);

struct Thresholds {
  std::map<RelationId, double> per_relation;
  double global = 0.0;

  double for_relation(RelationId r) const {
    auto it = per_relation.find(r);
    return it == per_relation.end() ? global : it->second;
  }
};

Thresholds fit_thresholds(std::span<const ScoredExample> validation);
Thresholds fit_thresholds(const EmbeddingSpace& space,
                          std::span<const LabeledExample> validation);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct ClassifyReport {
  Thresholds thresholds;
  double accuracy = 0.0;
  std::size_t examples = 0;
  std::vector<PrPoint> pr_curve;
  double auc = 0.0;
};

// Precision/recall of a single global cutoff swept over ascending distance.
// One point per group of tied distances.
std::vector<PrPoint> pr_curve(std::span<const ScoredExample> examples);
// Trapezoids over recall, anchored at (0, first precision).
double pr_auc(std::span<const PrPoint> curve);

ClassifyReport classify(const Thresholds& thresholds, std::span<const ScoredExample> examples);
ClassifyReport classify(const EmbeddingSpace& space, const Thresholds& thresholds,
                        std::span<const LabeledExample> examples);

void print_classify_report(std::ostream& out, const ClassifyReport& report);
void write_pr_csv(std::ostream& out, std::span<const PrPoint> curve);
void write_classify_csv(std::ostream& out, const ClassifyReport& report);
void write_thresholds_tsv(std::ostream& out, const Thresholds& thresholds,
                          const RelationVocab& relations);

}  // namespace iike

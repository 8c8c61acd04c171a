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

#include "support/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace iike::testing {

SyntheticKb make_translation_kb(const TranslationKbOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, o.noise);
  const std::size_t rank = o.lattice_rank;
  using Coord = std::vector<int>;

  // Relation steps: distinct nonzero vectors in {-1, 0, 1}^rank.
  std::vector<Coord> steps;
  for (std::size_t code = 0; code < static_cast<std::size_t>(std::pow(3, rank)); ++code) {
    Coord c(rank);
    std::size_t rest = code;
    bool zero = true;
    for (auto& x : c) {
      x = static_cast<int>(rest % 3) - 1;
      rest /= 3;
      zero = zero && x == 0;
    }
    if (!zero) steps.push_back(c);
  }
  if (steps.size() < o.relations) throw ConfigError("lattice rank too small for the relation count");
  std::shuffle(steps.begin(), steps.end(), rng);
  steps.resize(o.relations);

  // Sites: the lattice points closest to the origin.
  const std::size_t sites = (o.entities + o.entities_per_site - 1) / o.entities_per_site;
  int radius = 1;
  while (static_cast<std::size_t>(std::pow(2 * radius + 1, rank)) < sites) ++radius;
  std::vector<std::pair<int, Coord>> box;
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  for (std::size_t code = 0; code < static_cast<std::size_t>(std::pow(side, rank)); ++code) {
    Coord c(rank);
    std::size_t rest = code;
    int sq = 0;
    for (auto& x : c) {
      x = static_cast<int>(rest % side) - radius;
      rest /= side;
      sq += x * x;
    }
    box.emplace_back(sq, c);
  }
  std::sort(box.begin(), box.end());
  std::map<Coord, std::size_t> site_index;
  for (std::size_t i = 0; i < sites; ++i) site_index.emplace(box[i].second, i);

  std::vector<double> basis(rank * o.true_dim);
  for (double& v : basis) v = unit(rng);
  auto embed = [&](const Coord& c, double* out) {
    for (std::size_t k = 0; k < o.true_dim; ++k) {
      out[k] = 0.0;
      for (std::size_t j = 0; j < rank; ++j) out[k] += c[j] * basis[j * o.true_dim + k];
    }
  };

  SyntheticKb out;
  out.relation_truth.resize(o.relations * o.true_dim);
  for (std::size_t r = 0; r < o.relations; ++r) embed(steps[r], &out.relation_truth[r * o.true_dim]);

  std::vector<std::size_t> entity_site(o.entities);
  std::vector<std::vector<std::size_t>> members(sites);
  std::vector<std::size_t> ids(o.entities);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < o.entities; ++i) {
    entity_site[ids[i]] = i % sites;
    members[i % sites].push_back(ids[i]);
  }
  out.entity_truth.resize(o.entities * o.true_dim);
  for (std::size_t e = 0; e < o.entities; ++e) {
    double* v = &out.entity_truth[e * o.true_dim];
    embed(box[entity_site[e]].second, v);
    for (std::size_t k = 0; k < o.true_dim; ++k) v[k] += noise(rng);
  }

  // Every (h, r, t) whose sites differ by the relation step is true.
  std::vector<RawRecord> records;
  for (std::size_t h = 0; h < o.entities; ++h) {
    for (std::size_t r = 0; r < o.relations; ++r) {
      Coord target = box[entity_site[h]].second;
      for (std::size_t j = 0; j < rank; ++j) target[j] += steps[r][j];
      auto it = site_index.find(target);
      if (it == site_index.end()) continue;
      for (std::size_t t : members[it->second]) {
        records.push_back({"e" + std::to_string(h), "r" + std::to_string(r),
                           "e" + std::to_string(t), 1.0});
      }
    }
  }
  if (records.size() < o.triples) {
    throw ConfigError("lattice yields only " + std::to_string(records.size()) + " triples, " +
                      std::to_string(o.triples) + " requested");
  }
  std::shuffle(records.begin(), records.end(), rng);
  records.resize(o.triples);

  const auto n_train = static_cast<std::size_t>(o.train_fraction * static_cast<double>(records.size()));
  const auto n_valid = static_cast<std::size_t>(o.valid_fraction * static_cast<double>(records.size()));
  std::span<const RawRecord> all(records);
  out.kb = build_kb(all.subspan(0, n_train), all.subspan(n_train, n_valid),
                    all.subspan(n_train + n_valid));
  return out;
}

std::vector<RawRecord> random_records(std::size_t entities, std::size_t relations,
                                      std::size_t triples, std::uint64_t seed, double conf_low,
                                      double conf_high) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_e(0, entities - 1);
  std::uniform_int_distribution<std::size_t> pick_r(0, relations - 1);
  std::uniform_real_distribution<double> conf(conf_low, conf_high);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  std::vector<RawRecord> out;
  while (out.size() < triples) {
    const std::size_t h = pick_e(rng), r = pick_r(rng), t = pick_e(rng);
    if (!seen.emplace(h, r, t).second) continue;
    double c = conf_low == conf_high ? conf_high : conf(rng);
    if (c <= conf_low) c = conf_high;  // keep the interval open at the bottom
    out.push_back({"e" + std::to_string(h), "r" + std::to_string(r), "e" + std::to_string(t), c});
  }
  return out;
}

EmbeddingSpace random_space(std::size_t entities, std::size_t relations, std::size_t dim,
                            std::uint64_t seed, ScoringParams params, double scale) {
  EmbeddingSpace space(entities, relations, dim, params);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  for (double& v : space.entity_data()) v = g(rng);
  for (double& v : space.relation_data()) v = g(rng);
  return space;
}

}  // namespace iike::testing

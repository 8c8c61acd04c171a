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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "iike/types.hpp"

namespace iike {

/// A triple as read from disk, before interning.
struct RawRecord {
  std::string head;
  std::string relation;
  std::string tail;
  double confidence = 1.0;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Bidirectional name <-> id map. Ids are assigned in first-intern order.
template <typename IdType>
class Vocabulary {
 public:
  IdType intern(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    IdType id(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  std::optional<IdType> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(IdType id) const { return names_.at(id.index()); }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, IdType> index_;
};

using EntityVocab = Vocabulary<EntityId>;
using RelationVocab = Vocabulary<RelationId>;

// Existence set over (h, r, t) plus adjacency lists used to enumerate the
// known heads of (r, t) and known tails of (h, r).
class TripleIndex {
 public:
  TripleIndex() = default;

  void insert(const Triple& t);
  // Sorts and deduplicates adjacency lists; call once after the last insert.
  void finalize();

  bool contains(const Triple& t) const { return triples_.contains(t); }
  std::size_t size() const { return triples_.size(); }

  std::span<const EntityId> heads_given(RelationId r, EntityId t) const;
  std::span<const EntityId> tails_given(EntityId h, RelationId r) const;

  static TripleIndex from(std::span<const std::span<const Belief>> splits);

 private:
  static std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  std::unordered_set<Triple> triples_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> heads_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> tails_;
};

struct KnowledgeBase {
  EntityVocab entities;
  RelationVocab relations;
  std::vector<Belief> train;
  std::vector<Belief> valid;
  std::vector<Belief> test;

  // Distinct (h, r, t) over train, valid and test.
  TripleIndex all_triples;
  // Sorted, unique entity ids observed as head (tail) of each relation in
  // any split. Indexed by relation id.
  std::vector<std::vector<EntityId>> heads_of;
  std::vector<std::vector<EntityId>> tails_of;

  std::size_t entity_count() const { return entities.size(); }
  std::size_t relation_count() const { return relations.size(); }
};

enum class Split { kTrain, kValid, kTest };

const std::vector<Belief>& split_of(const KnowledgeBase& kb, Split split);
Split parse_split(const std::string& text);

// Raises DataError with the source name and 1-based line number on a
// malformed line. Accepts LF and CRLF line endings; blank lines are skipped.
std::vector<RawRecord> parse_triples(std::istream& in, double default_confidence,
                                     bool has_confidence_column,
                                     const std::string& source_name = "<stream>");
std::vector<RawRecord> parse_triples(const std::filesystem::path& path,
                                     double default_confidence,
                                     bool has_confidence_column);

// Vocabularies used to pre-seed interning, e.g. to align a dataset with the
// row order of a stored embedding file.
struct SeedVocabularies {
  EntityVocab entities;
  RelationVocab relations;
};

// Interns names scanning train, valid, then test. Duplicates stay in the
// split lists and appear once in all_triples.
KnowledgeBase build_kb(std::span<const RawRecord> train, std::span<const RawRecord> valid,
                       std::span<const RawRecord> test, SeedVocabularies seed = {});

struct NellSplitSizes {
  std::size_t valid = 7296;
  std::size_t test = 7296;
};

// Keeps records with confidence in (0.5, 1.0], draws valid/test from the
// confidence-1.0 subset after a seeded shuffle, and leaves the rest (in file
// order) for training.
KnowledgeBase build_nell_splits(std::span<const RawRecord> records, std::uint64_t seed,
                                NellSplitSizes sizes = {});

struct NellPartition {
  std::vector<RawRecord> train;
  std::vector<RawRecord> valid;
  std::vector<RawRecord> test;
};
NellPartition partition_nell(std::span<const RawRecord> records, std::uint64_t seed,
                             NellSplitSizes sizes = {});

struct LabeledExample {
  Belief belief;
  bool label = true;
};

// Emits each positive of the split followed by one corrupted copy whose
// replacement entity was seen at the same position for the same relation.
std::vector<LabeledExample> make_classification_set(const KnowledgeBase& kb, Split split,
                                                    std::uint64_t seed,
                                                    std::size_t max_attempts = 100);
std::vector<LabeledExample> make_classification_set(const KnowledgeBase& kb,
                                                    std::span<const Belief> positives,
                                                    std::uint64_t seed,
                                                    std::size_t max_attempts = 100);

// TSV with columns head, relation, tail, confidence, label (1/0).
void write_labeled_tsv(std::ostream& out, const KnowledgeBase& kb,
                       std::span<const LabeledExample> examples);
void write_raw_tsv(std::ostream& out, std::span<const RawRecord> records);
// Names must already be in the KB vocabularies; unknown names raise a
// DataError listing them.
std::vector<LabeledExample> read_labeled_tsv(std::istream& in, const KnowledgeBase& kb,
                                             const std::string& source_name = "<stream>");

// Maps raw records onto existing vocabulary ids. Unknown names raise a
// DataError listing every offender.
std::vector<Belief> resolve(const KnowledgeBase& kb, std::span<const RawRecord> records,
                            const std::string& source_name);

struct KbStats {
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};

KbStats stats_of(const KnowledgeBase& kb);
void print_stats(std::ostream& out, const KbStats& stats);

}  // namespace iike

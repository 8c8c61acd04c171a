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

#include "iike/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace iike {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::optional<double> parse_real(std::string_view text) {
  while (!text.empty() && (text.front() == ' ')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

void add_position(std::vector<std::vector<EntityId>>& table, RelationId r, EntityId e) {
  if (table.size() <= r.index()) table.resize(r.index() + 1);
  table[r.index()].push_back(e);
}

void sort_unique(std::vector<EntityId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

void TripleIndex::insert(const Triple& t) {
  if (!triples_.insert(t).second) return;
  heads_[pair_key(t.relation.value, t.tail.value)].push_back(t.head);
  tails_[pair_key(t.head.value, t.relation.value)].push_back(t.tail);
}

void TripleIndex::finalize() {
  for (auto& [key, list] : heads_) sort_unique(list);
  for (auto& [key, list] : tails_) sort_unique(list);
}

std::span<const EntityId> TripleIndex::heads_given(RelationId r, EntityId t) const {
  auto it = heads_.find(pair_key(r.value, t.value));
  if (it == heads_.end()) return {};
  return it->second;
}

std::span<const EntityId> TripleIndex::tails_given(EntityId h, RelationId r) const {
  auto it = tails_.find(pair_key(h.value, r.value));
  if (it == tails_.end()) return {};
  return it->second;
}

TripleIndex TripleIndex::from(std::span<const std::span<const Belief>> splits) {
  TripleIndex index;
  for (auto split : splits) {
    for (const auto& b : split) index.insert(b.triple());
  }
  index.finalize();
  return index;
}

const std::vector<Belief>& split_of(const KnowledgeBase& kb, Split split) {
  switch (split) {
    case Split::kTrain:
      return kb.train;
    case Split::kValid:
      return kb.valid;
    case Split::kTest:
      return kb.test;
  }
  return kb.test;
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::kTrain;
  if (text == "valid") return Split::kValid;
  if (text == "test") return Split::kTest;
  throw ConfigError("unknown split '" + text + "' (expected train, valid or test)");
}

std::vector<RawRecord> parse_triples(std::istream& in, double default_confidence,
                                     bool has_confidence_column,
                                     const std::string& source_name) {
  std::vector<RawRecord> records;
  const std::size_t expected = has_confidence_column ? 4 : 3;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != expected) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(expected) + " tab-separated fields, got " +
                      std::to_string(fields.size()) + ": '" + line + "'");
    }
    RawRecord rec{std::string(fields[0]), std::string(fields[1]), std::string(fields[2]),
                  default_confidence};
    if (has_confidence_column) {
      auto c = parse_real(fields[3]);
      if (!c) {
        throw DataError(source_name + ":" + std::to_string(line_no) +
                        ": unparseable confidence '" + std::string(fields[3]) + "' in '" + line +
                        "'");
      }
      rec.confidence = *c;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<RawRecord> parse_triples(const std::filesystem::path& path, double default_confidence,
                                     bool has_confidence_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_triples(in, default_confidence, has_confidence_column, path.string());
}

KnowledgeBase build_kb(std::span<const RawRecord> train, std::span<const RawRecord> valid,
                       std::span<const RawRecord> test, SeedVocabularies seed) {
  KnowledgeBase kb;
  kb.entities = std::move(seed.entities);
  kb.relations = std::move(seed.relations);

  auto intern_split = [&kb](std::span<const RawRecord> records, std::vector<Belief>& out) {
    out.reserve(records.size());
    for (const auto& rec : records) {
      if (!(rec.confidence > 0.0 && rec.confidence <= 1.0)) {
        throw DataError("confidence " + std::to_string(rec.confidence) + " of (" + rec.head +
                        ", " + rec.relation + ", " + rec.tail + ") is outside (0, 1]");
      }
      Belief b;
      b.head = kb.entities.intern(rec.head);
      b.relation = kb.relations.intern(rec.relation);
      b.tail = kb.entities.intern(rec.tail);
      b.confidence = rec.confidence;
      out.push_back(b);
    }
  };
  intern_split(train, kb.train);
  intern_split(valid, kb.valid);
  intern_split(test, kb.test);

  kb.heads_of.assign(kb.relations.size(), {});
  kb.tails_of.assign(kb.relations.size(), {});
  for (const auto* split : {&kb.train, &kb.valid, &kb.test}) {
    for (const auto& b : *split) {
      kb.all_triples.insert(b.triple());
      add_position(kb.heads_of, b.relation, b.head);
      add_position(kb.tails_of, b.relation, b.tail);
    }
  }
  kb.all_triples.finalize();
  for (auto& v : kb.heads_of) sort_unique(v);
  for (auto& v : kb.tails_of) sort_unique(v);
  return kb;
}

NellPartition partition_nell(std::span<const RawRecord> records, std::uint64_t seed,
                             NellSplitSizes sizes) {
  std::vector<std::size_t> reserved;
  std::vector<std::size_t> ground_truth;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double c = records[i].confidence;
    if (c > 0.5 && c <= 1.0) {
      reserved.push_back(i);
      if (c == 1.0) ground_truth.push_back(i);
    }
  }
  if (reserved.empty()) {
    throw DataError("no beliefs with confidence in (0.5, 1.0] among " +
                    std::to_string(records.size()) + " records");
  }
  if (ground_truth.size() < sizes.valid + sizes.test) {
    throw DataError("need " + std::to_string(sizes.valid) + " valid + " +
                    std::to_string(sizes.test) + " test ground-truth beliefs, only " +
                    std::to_string(ground_truth.size()) + " have confidence 1.0");
  }

  std::mt19937_64 rng(seed);
  std::shuffle(ground_truth.begin(), ground_truth.end(), rng);

  std::vector<char> held_out(records.size(), 0);
  NellPartition out;
  for (std::size_t i = 0; i < sizes.valid; ++i) {
    out.valid.push_back(records[ground_truth[i]]);
    held_out[ground_truth[i]] = 1;
  }
  for (std::size_t i = sizes.valid; i < sizes.valid + sizes.test; ++i) {
    out.test.push_back(records[ground_truth[i]]);
    held_out[ground_truth[i]] = 1;
  }
  for (std::size_t i : reserved) {
    if (!held_out[i]) out.train.push_back(records[i]);
  }
  return out;
}

KnowledgeBase build_nell_splits(std::span<const RawRecord> records, std::uint64_t seed,
                                NellSplitSizes sizes) {
  auto parts = partition_nell(records, seed, sizes);
  return build_kb(parts.train, parts.valid, parts.test);
}

std::vector<LabeledExample> make_classification_set(const KnowledgeBase& kb, Split split,
                                                    std::uint64_t seed,
                                                    std::size_t max_attempts) {
  return make_classification_set(kb, split_of(kb, split), seed, max_attempts);
}

std::vector<LabeledExample> make_classification_set(const KnowledgeBase& kb,
                                                    std::span<const Belief> positives,
                                                    std::uint64_t seed,
                                                    std::size_t max_attempts) {
  std::vector<LabeledExample> out;
  out.reserve(2 * positives.size());
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  const std::size_t n_entities = kb.entity_count();

  for (std::size_t i = 0; i < positives.size(); ++i) {
    const Belief& pos = positives[i];
    const bool corrupt_head = coin(rng);
    const EntityId original = corrupt_head ? pos.head : pos.tail;
    const auto& pool = corrupt_head ? kb.heads_of.at(pos.relation.index())
                                    : kb.tails_of.at(pos.relation.index());

    auto corrupted = [&](EntityId e) {
      Belief neg = pos;
      (corrupt_head ? neg.head : neg.tail) = e;
      return neg;
    };

    std::optional<Belief> negative;
    // Positional pool without the original entity.
    const auto orig_it = std::lower_bound(pool.begin(), pool.end(), original);
    const bool orig_in_pool = orig_it != pool.end() && *orig_it == original;
    const std::size_t orig_pos = static_cast<std::size_t>(orig_it - pool.begin());
    const std::size_t pool_size = pool.size() - (orig_in_pool ? 1 : 0);
    if (pool_size > 0) {
      std::uniform_int_distribution<std::size_t> pick(0, pool_size - 1);
      for (std::size_t a = 0; a < max_attempts && !negative; ++a) {
        std::size_t idx = pick(rng);
        if (orig_in_pool && idx >= orig_pos) ++idx;
        Belief cand = corrupted(pool[idx]);
        if (!kb.all_triples.contains(cand.triple())) negative = cand;
      }
    }
    if (!negative && n_entities > 0) {
      std::uniform_int_distribution<std::size_t> pick(0, n_entities - 1);
      for (std::size_t a = 0; a < max_attempts && !negative; ++a) {
        Belief cand = corrupted(EntityId(pick(rng)));
        if (!kb.all_triples.contains(cand.triple())) negative = cand;
      }
    }
    if (!negative) {
      throw DataError("could not corrupt belief #" + std::to_string(i) + " (" +
                      kb.entities.name(pos.head) + ", " + kb.relations.name(pos.relation) +
                      ", " + kb.entities.name(pos.tail) + ") after " +
                      std::to_string(max_attempts) + " positional and " +
                      std::to_string(max_attempts) + " fallback attempts");
    }
    out.push_back({pos, true});
    out.push_back({*negative, false});
  }
  return out;
}

namespace {

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void write_labeled_tsv(std::ostream& out, const KnowledgeBase& kb,
                       std::span<const LabeledExample> examples) {
  for (const auto& ex : examples) {
    out << kb.entities.name(ex.belief.head) << '\t' << kb.relations.name(ex.belief.relation)
        << '\t' << kb.entities.name(ex.belief.tail) << '\t' << format_real(ex.belief.confidence)
        << '\t' << (ex.label ? '1' : '0') << '\n';
  }
}

void write_raw_tsv(std::ostream& out, std::span<const RawRecord> records) {
  for (const auto& r : records) {
    out << r.head << '\t' << r.relation << '\t' << r.tail << '\t' << format_real(r.confidence)
        << '\n';
  }
}

std::vector<LabeledExample> read_labeled_tsv(std::istream& in, const KnowledgeBase& kb,
                                             const std::string& source_name) {
  std::vector<LabeledExample> out;
  std::vector<std::string> unknown;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    auto where = source_name + ":" + std::to_string(line_no);
    if (fields.size() != 5) {
      throw DataError(where + ": expected 5 tab-separated fields, got " +
                      std::to_string(fields.size()) + ": '" + line + "'");
    }
    auto conf = parse_real(fields[3]);
    if (!conf) throw DataError(where + ": unparseable confidence in '" + line + "'");
    if (fields[4] != "1" && fields[4] != "0") {
      throw DataError(where + ": label must be 1 or 0 in '" + line + "'");
    }
    auto h = kb.entities.find(fields[0]);
    auto r = kb.relations.find(fields[1]);
    auto t = kb.entities.find(fields[2]);
    if (!h) unknown.push_back("entity '" + std::string(fields[0]) + "' (" + where + ")");
    if (!r) unknown.push_back("relation '" + std::string(fields[1]) + "' (" + where + ")");
    if (!t) unknown.push_back("entity '" + std::string(fields[2]) + "' (" + where + ")");
    if (h && r && t) out.push_back({{*h, *r, *t, *conf}, fields[4] == "1"});
  }
  if (!unknown.empty()) {
    std::string msg = "unknown names in " + source_name + ":";
    for (const auto& u : unknown) msg += "\n  " + u;
    throw DataError(msg);
  }
  return out;
}

std::vector<Belief> resolve(const KnowledgeBase& kb, std::span<const RawRecord> records,
                            const std::string& source_name) {
  std::vector<Belief> out;
  out.reserve(records.size());
  std::vector<std::string> unknown;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    auto h = kb.entities.find(rec.head);
    auto r = kb.relations.find(rec.relation);
    auto t = kb.entities.find(rec.tail);
    if (!h) unknown.push_back("entity '" + rec.head + "' (record " + std::to_string(i + 1) + ")");
    if (!r) {
      unknown.push_back("relation '" + rec.relation + "' (record " + std::to_string(i + 1) + ")");
    }
    if (!t) unknown.push_back("entity '" + rec.tail + "' (record " + std::to_string(i + 1) + ")");
    if (h && r && t) out.push_back({*h, *r, *t, rec.confidence});
  }
  if (!unknown.empty()) {
    std::string msg = "unknown names in " + source_name + ":";
    for (const auto& u : unknown) msg += "\n  " + u;
    throw DataError(msg);
  }
  return out;
}

KbStats stats_of(const KnowledgeBase& kb) {
  return {kb.entity_count(), kb.relation_count(), kb.train.size(), kb.valid.size(),
          kb.test.size()};
}

void print_stats(std::ostream& out, const KbStats& s) {
  out << "entities\t" << s.entities << '\n'
      << "relations\t" << s.relations << '\n'
      << "train\t" << s.train << '\n'
      << "valid\t" << s.valid << '\n'
      << "test\t" << s.test << '\n';
}

}  // namespace iike

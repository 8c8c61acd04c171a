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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "iike/data.hpp"
#include "iike/model.hpp"

namespace iike {

// A stored embedding together with the names of its rows.
struct EmbeddingFile {
  EntityVocab entities;
  RelationVocab relations;
  EmbeddingSpace space;
};

// Text format:
//   <|E|> <|R|> <d> <b> <norm>
//   <entity name>\t<v_1> ... <v_d>      (|E| lines)
//   <relation name>\t<v_1> ... <v_d>    (|R| lines)
// Values use the shortest representation that parses back to the same double.
void write_embeddings(std::ostream& out, const EntityVocab& entities,
                      const RelationVocab& relations, const EmbeddingSpace& space);
void write_embeddings(const std::filesystem::path& path, const EntityVocab& entities,
                      const RelationVocab& relations, const EmbeddingSpace& space);

// epsilon and norm_floor are not stored; they come from `defaults`.
EmbeddingFile read_embeddings(std::istream& in, const std::string& source_name = "<stream>",
                              ScoringParams defaults = {});
EmbeddingFile read_embeddings(const std::filesystem::path& path, ScoringParams defaults = {});

// Per-kind vector tables: one "<name>\t<v_1>\t...\t<v_d>" line per row.
void write_vector_table(std::ostream& out, const std::vector<std::string>& names,
                        std::span<const double> data, std::size_t dim);

struct VectorTable {
  std::vector<std::string> names;
  std::vector<double> data;
  std::size_t dim = 0;
};
VectorTable read_vector_table(std::istream& in, const std::string& source_name = "<stream>");

}  // namespace iike

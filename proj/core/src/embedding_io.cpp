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

#include "iike/embedding_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace iike {

namespace {

void append_real(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

double read_real(std::string_view text, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw DataError(where + ": bad value '" + std::string(text) + "'");
  }
  return v;
}

std::size_t read_count(const std::string& text, const std::string& where) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(where + ": bad count '" + text + "'");
  }
  return v;
}

// Splits "<name>\t<values>" and parses exactly `dim` values separated by
// `sep` into `out`.
std::string read_row(const std::string& line, std::size_t dim, char sep, double* out,
                     const std::string& where) {
  auto tab = line.find('\t');
  if (tab == std::string::npos) throw DataError(where + ": missing tab after name");
  std::string name = line.substr(0, tab);
  std::string_view rest(line);
  rest.remove_prefix(tab + 1);
  std::size_t count = 0;
  while (!rest.empty()) {
    auto pos = rest.find(sep);
    auto field = rest.substr(0, pos);
    if (!field.empty()) {
      if (count == dim) throw DataError(where + ": more than " + std::to_string(dim) + " values");
      out[count++] = read_real(field, where);
    }
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  if (count != dim) {
    throw DataError(where + ": expected " + std::to_string(dim) + " values, got " +
                    std::to_string(count));
  }
  return name;
}

bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

}  // namespace

void write_embeddings(std::ostream& out, const EntityVocab& entities,
                      const RelationVocab& relations, const EmbeddingSpace& space) {
  if (entities.size() != space.entity_count() || relations.size() != space.relation_count()) {
    throw DataError("vocabulary sizes do not match the embedding space");
  }
  std::string buf;
  buf += std::to_string(space.entity_count()) + ' ' + std::to_string(space.relation_count()) +
         ' ' + std::to_string(space.dim()) + ' ';
  append_real(buf, space.params().bias);
  buf += ' ';
  buf += to_string(space.params().norm);
  buf += '\n';
  out << buf;

  auto emit = [&](const std::string& name, std::span<const double> v) {
    buf.clear();
    buf += name;
    buf += '\t';
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) buf += ' ';
      append_real(buf, v[k]);
    }
    buf += '\n';
    out << buf;
  };
  for (std::size_t e = 0; e < space.entity_count(); ++e) {
    emit(entities.name(EntityId(e)), space.entity(EntityId(e)));
  }
  for (std::size_t r = 0; r < space.relation_count(); ++r) {
    emit(relations.name(RelationId(r)), space.relation(RelationId(r)));
  }
}

void write_embeddings(const std::filesystem::path& path, const EntityVocab& entities,
                      const RelationVocab& relations, const EmbeddingSpace& space) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_embeddings(out, entities, relations, space);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

EmbeddingFile read_embeddings(std::istream& in, const std::string& source_name,
                              ScoringParams defaults) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw DataError(source_name + ": empty embedding file");

  std::istringstream header(line);
  std::string ne, nr, nd, nb, nn, extra;
  header >> ne >> nr >> nd >> nb >> nn;
  if (nn.empty() || (header >> extra)) {
    throw DataError(source_name + ":1: header must be '<|E|> <|R|> <d> <b> <norm>'");
  }
  const std::string where = source_name + ":1";
  const std::size_t n_entities = read_count(ne, where);
  const std::size_t n_relations = read_count(nr, where);
  const std::size_t dim = read_count(nd, where);
  ScoringParams params = defaults;
  params.bias = read_real(nb, where);
  try {
    params.norm = parse_norm(nn);
  } catch (const ConfigError& e) {
    throw DataError(where + ": " + e.what());
  }

  EmbeddingFile file{{}, {}, EmbeddingSpace(n_entities, n_relations, dim, params)};
  for (std::size_t e = 0; e < n_entities; ++e) {
    if (!next_line(in, line, line_no)) {
      throw DataError(source_name + ": expected " + std::to_string(n_entities) +
                      " entity rows, found " + std::to_string(e));
    }
    const std::string at = source_name + ":" + std::to_string(line_no);
    auto name = read_row(line, dim, ' ', file.space.entity(EntityId(e)).data(), at);
    if (file.entities.intern(name).index() != e) throw DataError(at + ": duplicate entity '" + name + "'");
  }
  for (std::size_t r = 0; r < n_relations; ++r) {
    if (!next_line(in, line, line_no)) {
      throw DataError(source_name + ": expected " + std::to_string(n_relations) +
                      " relation rows, found " + std::to_string(r));
    }
    const std::string at = source_name + ":" + std::to_string(line_no);
    auto name = read_row(line, dim, ' ', file.space.relation(RelationId(r)).data(), at);
    if (file.relations.intern(name).index() != r) {
      throw DataError(at + ": duplicate relation '" + name + "'");
    }
  }
  if (next_line(in, line, line_no)) {
    throw DataError(source_name + ":" + std::to_string(line_no) + ": trailing data");
  }
  return file;
}

EmbeddingFile read_embeddings(const std::filesystem::path& path, ScoringParams defaults) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_embeddings(in, path.string(), defaults);
}

void write_vector_table(std::ostream& out, const std::vector<std::string>& names,
                        std::span<const double> data, std::size_t dim) {
  std::string buf;
  for (std::size_t i = 0; i < names.size(); ++i) {
    buf.clear();
    buf += names[i];
    for (std::size_t k = 0; k < dim; ++k) {
      buf += '\t';
      append_real(buf, data[i * dim + k]);
    }
    buf += '\n';
    out << buf;
  }
}

VectorTable read_vector_table(std::istream& in, const std::string& source_name) {
  VectorTable table;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line, line_no)) {
    const std::string at = source_name + ":" + std::to_string(line_no);
    if (table.names.empty()) {
      std::size_t tabs = 0;
      for (char c : line) tabs += (c == '\t');
      if (tabs == 0) throw DataError(at + ": expected '<name>\\t<values>'");
      table.dim = tabs;
    }
    const std::size_t offset = table.data.size();
    table.data.resize(offset + table.dim);
    table.names.push_back(read_row(line, table.dim, '\t', table.data.data() + offset, at));
  }
  return table;
}

}  // namespace iike

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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace iike {

// Dense index into a vocabulary. The tag keeps entity and relation ids from
// being mixed up at call sites.
template <typename Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}
  constexpr explicit Id(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr std::size_t index() const { return value; }

  friend constexpr auto operator<=>(Id, Id) = default;
};

struct EntityTag {};
struct RelationTag {};

using EntityId = Id<EntityTag>;
using RelationId = Id<RelationTag>;

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend constexpr auto operator<=>(const Triple&, const Triple&) = default;
};

/// One (head, relation, tail, confidence) record; confidence lies in (0, 1].
struct Belief {
  EntityId head;
  RelationId relation;
  EntityId tail;
  double confidence = 1.0;

  constexpr Triple triple() const { return {head, relation, tail}; }
};

enum class Side { kHead, kTail };

enum class Norm { kL1, kL2 };

const char* to_string(Norm norm);
Norm parse_norm(const std::string& text);

// Error hierarchy. The CLI maps each kind onto its own exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameters or options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace iike

template <typename Tag>
struct std::hash<iike::Id<Tag>> {
  std::size_t operator()(iike::Id<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

template <>
struct std::hash<iike::Triple> {
  std::size_t operator()(const iike::Triple& t) const noexcept {
    std::uint64_t key = (static_cast<std::uint64_t>(t.head.value) << 32) ^
                        (static_cast<std::uint64_t>(t.relation.value) << 20) ^
                        t.tail.value;
    key ^= key >> 33;
    key *= 0xff51afd7ed558ccdULL;
    key ^= key >> 33;
    return static_cast<std::size_t>(key);
  }
};

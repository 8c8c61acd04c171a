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

#include "iike/types.hpp"

namespace iike {

const char* to_string(Norm norm) { return norm == Norm::kL1 ? "L1" : "L2"; }

Norm parse_norm(const std::string& text) {
  if (text == "L1" || text == "l1") return Norm::kL1;
  if (text == "L2" || text == "l2") return Norm::kL2;
  throw ConfigError("unknown norm '" + text + "' (expected L1 or L2)");
}

}  // namespace iike

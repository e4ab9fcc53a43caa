// Copyright 2026 The qchan Authors
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

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qchan/measures.hpp"
#include "qchan/protocol.hpp"
#include "qchan/reductions.hpp"
#include "qchan/suites.hpp"

namespace qchan {

// Insertion-ordered so that output depends only on construction order.
using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.1.0";

// FNV-1a 64 of raw bytes, 16 hex digits.
std::string content_digest(std::string_view bytes);

// Canonical text: sorted by construction order, two-space indent, floats
// with 17 significant digits, non-finite floats as strings.
std::string dump_json(const Json& j);

// {"rows", "cols", "re": [...], "im": [...]}, row-major.
Json matrix_json(const Matrix& m);
Json to_json(const ReductionReport& r);
// Value, witness and optimizer bookkeeping; iteration traces are summarized
// by their lengths and final values.
Json to_json(const MeasureResult& r);
Json to_json(const ProtocolRun& run);
Json to_json(const SuiteResult& r);

struct JsonReport {
  std::string command;
  Json inputs = Json::object();
  Json parameters = Json::object();
  std::uint64_t seed = 0;
  Json results = Json::object();
  Json timings_ms = Json::object();

  Json to_json() const;
};

}  // namespace qchan

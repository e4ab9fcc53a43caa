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
#include <vector>

namespace qchan {

// One checked property: pass iff value relation bound.
struct PropertyCheck {
  std::string property;
  double value = 0.0;
  std::string relation;  // "<=" or ">="
  double bound = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<PropertyCheck> checks;

  bool passed() const;
};

const std::vector<std::string>& suite_names();
// Throws std::invalid_argument for an unknown suite.
SuiteResult run_suite(std::string_view name, std::uint64_t seed);

}  // namespace qchan

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

#include "qchan/linalg.hpp"

namespace qchan {

// splitmix64. Normal deviates come from Box-Muller on our own uniforms so
// streams do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();  // in [0, 1)
  double normal();
  cplx complex_normal();
  // Independent stream for restart k.
  Rng fork(std::uint64_t k) const;

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k);

Vector random_unit_vector(std::size_t d, Rng& rng);
Matrix random_density(std::size_t d, Rng& rng, std::size_t rank = 0);  // rank 0: full
Matrix random_unitary(std::size_t d, Rng& rng);
Matrix random_hermitian(std::size_t d, Rng& rng);
Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace qchan

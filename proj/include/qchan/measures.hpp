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
#include <limits>
#include <vector>

#include "qchan/channel.hpp"

namespace qchan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct OptimizerConfig {
  std::uint64_t seed = 0;
  std::size_t restarts = 20;
  std::size_t max_iters = 200;
  double conv_tol = 1e-9;  // relative objective change
  // Reference dimension for diamond estimates; 0 means the input dimension.
  std::size_t ref_dim = 0;

  void validate() const;
};

struct MeasureResult {
  double value = 0.0;
  // Maximizer: a pure input as a column vector, or the (rho, sigma) pair.
  std::vector<Matrix> witness;
  // Objective per iteration, one list per restart; each is nondecreasing.
  std::vector<std::vector<double>> iterations;
  std::uint64_t seed = 0;
  std::size_t best_restart = 0;
};

double trace_norm(const Matrix& m);
double trace_norm(const ComplexMatrix& m);
double schatten_norm(const Matrix& m, double p);  // p == kInfinity: operator norm
double schatten_norm(const ComplexMatrix& m, double p);

double fidelity(const Matrix& rho, const Matrix& sigma);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct HelstromResult {
  double success;
  Matrix accept_first;   // projector onto the positive part of rho - sigma
  Matrix accept_second;  // its complement
};
HelstromResult helstrom(const DensityMatrix& rho, const DensityMatrix& sigma);
HelstromResult helstrom(const Matrix& rho, const Matrix& sigma);

// Bits.
double von_neumann_entropy(const Matrix& rho);
double von_neumann_entropy(const DensityMatrix& rho);
double renyi_entropy(const Matrix& rho, double p);
double renyi_entropy(const DensityMatrix& rho, double p);

// The trace holds -S per iteration so that it is nondecreasing; value is S.
MeasureResult min_output_entropy(const LinearMap& phi, const OptimizerConfig& cfg);
MeasureResult max_output_p_norm(const LinearMap& phi, double p, const OptimizerConfig& cfg);
MeasureResult max_output_fidelity(const LinearMap& phi1, const LinearMap& phi2, const OptimizerConfig& cfg);
MeasureResult diamond_distance(const LinearMap& phi1, const LinearMap& phi2, const OptimizerConfig& cfg);

double diamond_unitary_oracle(const Matrix& u, const Matrix& v);

// F_max as the stabilized norm of X -> sum_kl tr(A_k X B_l^*) |k><l|.
MeasureResult fmax_via_dnorm_crosscheck(const Channel& phi1, const Channel& phi2, const OptimizerConfig& cfg);

}  // namespace qchan

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
#include <optional>
#include <string>
#include <string_view>

#include "qchan/circuit.hpp"
#include "qchan/measures.hpp"

namespace qchan {

// Channel-distinguishing game: the prover sends a state on input (x) reference,
// the verifier applies Q_i to the input for a uniform secret i, and the prover
// must name i from the joint output.
enum class ProverStrategy { kHonest, kGrid, kFixed };

std::string to_string(ProverStrategy s);
ProverStrategy parse_strategy(std::string_view name);  // throws std::invalid_argument

struct ProverSpec {
  ProverStrategy kind = ProverStrategy::kHonest;
  // Grid points per parameter; grid provers only.
  std::size_t resolution = 16;
  // Fixed provers only: pure state on input (x) reference and the projector
  // announcing "i = 1". The complement announces "i = 2".
  Vector state;
  Matrix accept_first;
};

struct ProtocolRun {
  ProverStrategy strategy = ProverStrategy::kHonest;
  std::size_t resolution = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  // Exact success probability 1/2 tr(P1 out1) + 1/2 tr(P2 out2).
  double acceptance = 0.0;
  // |out1 - out2|_1 at the state used; for honest provers the seesaw value.
  double distance = 0.0;
  Vector state;
  Matrix accept_first;
  // Monte Carlo estimate over trials, when trials > 0.
  std::optional<double> sampled_acceptance;
};

ProtocolRun run_qcd_protocol(const LinearMap& q1, const LinearMap& q2, const ProverSpec& prover,
                             const OptimizerConfig& cfg, std::size_t trials = 0);
ProtocolRun run_qcd_protocol(const Circuit& q1, const Circuit& q2, const ProverSpec& prover,
                             const OptimizerConfig& cfg, std::size_t trials = 0);

// Best acceptance of the close-images verifier: Fmax(Q1, Q2)^2.
double ci_acceptance(const LinearMap& q1, const LinearMap& q2, const OptimizerConfig& cfg);
double ci_acceptance(const Circuit& q1, const Circuit& q2, const OptimizerConfig& cfg);

}  // namespace qchan

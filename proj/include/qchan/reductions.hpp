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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qchan/channel.hpp"
#include "qchan/circuit.hpp"

namespace qchan {

// A relation the construction guarantees. Numeric bounds are filled in when
// they follow from the parameters alone.
struct Prediction {
  std::string quantity;
  std::string relation;
  std::optional<double> lower;
  std::optional<double> upper;
};

struct Measurement {
  std::string quantity;
  double value = 0.0;
  std::uint64_t seed = 0;
};

struct ReductionReport {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> inputs;  // role, digest
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<Prediction> predicted;
  std::vector<Measurement> measured;
  std::vector<std::string> artifacts;
  std::vector<std::string> notes;

  // Throws std::out_of_range for an unknown name.
  double parameter(std::string_view name) const;
};

// FNV-1a of the canonical text, 16 hex digits.
std::string digest(const Circuit& c);

struct CircuitPair {
  Circuit first;
  Circuit second;
  ReductionReport report;
};

struct CircuitResult {
  Circuit circuit;
  ReductionReport report;
};

// r parallel copies of each circuit.
CircuitPair direct_product(const Circuit& q1, const Circuit& q2, std::size_t r);
// Strict lower and plain upper bound on the product distance.
std::pair<double, double> direct_product_bracket(double delta, std::size_t r);

// r slots each running q1 or q2 on its own input, chosen by classical random
// bits with an odd (first) or even (second) number of q1 slots.
CircuitPair xor_mix(const Circuit& q1, const Circuit& q2, std::size_t r);
double xor_mix_distance(double delta, std::size_t r);

struct PolarizeParameters {
  std::size_t r = 0;  // first xor_mix
  std::size_t s = 0;  // direct_product
  std::size_t t = 0;  // second xor_mix
};
// Requires 0 < b < a < 2 and 2b < a^2.
PolarizeParameters polarize_parameters(std::size_t n, double a, double b);
CircuitPair polarize(const Circuit& q1, const Circuit& q2, std::size_t n, double a, double b);

// Wires of a unitary verifier. verifier[0] is the accept flag.
struct VerifierSpaces {
  std::vector<Wire> verifier;
  std::vector<Wire> message;
};
// first(rho) = tr_M V1 (|0><0| (x) rho) V1^*, second(sigma) = tr_M V2^*
// (|1><1| (x) sigma) V2. The first circuit's input is padded with traced
// qubits up to the second's.
CircuitPair qip_to_close_images(const Circuit& v1, const Circuit& v2, const VerifierSpaces& spaces);

// Per-piece slicing shared by both constructed circuits. Input wires of the
// constructed circuits: the original input on 0..inputs-1, then for each
// boundary i = 1..boundaries() the block input (width wires) followed by the
// intermediate copy used by the two swap tests.
struct LogDepthPlan {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::size_t width = 0;
  // pieces[c][k] acts on wires 0..width-1 of block k.
  std::array<std::vector<std::vector<Instruction>>, 2> pieces;

  std::size_t boundaries() const { return pieces[0].size() - 1; }
  std::size_t tests() const { return 2 * boundaries(); }
  std::size_t input_qubits() const { return inputs + 2 * boundaries() * width; }
  // First wire of block k's input (k >= 1) and of its intermediate copy.
  Wire block_input(std::size_t k) const { return inputs + 2 * (k - 1) * width; }
  Wire block_copy(std::size_t k) const { return block_input(k) + width; }
};

// Fixed depth constants: depth <= kLogDepthAlpha * log2(size) + kLogDepthBeta.
inline constexpr double kLogDepthAlpha = 4.0;
inline constexpr double kLogDepthBeta = 18.0;

LogDepthPlan plan_logdepth(const Circuit& q1, const Circuit& q2, std::size_t gates_per_piece = 1);
// Outputs: the 2*tests flag wires (swap-test results interleaved with dummy
// zeros; tests on even positions in the first circuit, odd in the second)
// followed by the original output.
CircuitPair ci_to_logdepth(const Circuit& q1, const Circuit& q2, std::size_t gates_per_piece = 1);
// psi (x) (U_1 psi)^{(x)2} (x) ... for circuit which = 0 or 1.
Vector logdepth_honest_input(const LogDepthPlan& plan, std::size_t which, const Vector& psi);

// Control on wire 0 selects q1 (|0>) or q2 (|1>); the original outputs are
// traced and the environments kept. The second circuit adds Z on the control.
CircuitPair ci_to_qcd(const Circuit& q1, const Circuit& q2);

struct Embedding {
  Circuit circuit;
  // Degrading or antidegrading map as a circuit and its compiled channel.
  Circuit map_circuit;
  Channel map;
  ReductionReport report;
};
// C(rho) = 1/2 |0><0| (x) rho + 1/2 |1><1| (x) Q(rho).
Embedding degradable_embed(const Circuit& q);
// C(rho) = 1/2 |0><0| (x) |0><0| + 1/2 |1><1| (x) Q(rho).
Embedding antidegradable_embed(const Circuit& q);

struct ChannelApprox {
  Channel channel;
  ReductionReport report;
};
// Input A (x) H with A the dilation ancilla padded by extra qubits, output
// K (x) B. Carries its mixed-unitary rep in four stages.
ChannelApprox mixed_unitary_approx(const Channel& phi, std::size_t anc_extra_qubits);

// Circuit analogue using only unitary gates, MIXU and CDEPOL. Inputs are the
// m ancilla wires then the original inputs; outputs the original outputs then
// the former environment.
CircuitResult mixed_unitary_circuit(const Circuit& q, std::size_t anc_extra);

}  // namespace qchan

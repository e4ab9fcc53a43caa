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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qchan/channel.hpp"

namespace qchan {

class CircuitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parse failures carry a 1-based source position.
class ParseError : public CircuitError {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t col);
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

using Wire = std::size_t;

enum class Op {
  kX, kZ, kH, kT, kCnot, kCz, kSwap, kCu,
  kAncilla, kTraceout, kMeasure, kDepol, kCdepol, kMixu,
};

bool is_unitary_op(Op op);
std::string_view op_name(Op op);

struct Instruction {
  Op op;
  // Targets; for kCu the control is wires[0]; kCdepol is (control, target).
  std::vector<Wire> wires;
  // Unitary sub-sequence of kCu and kMixu.
  std::vector<Instruction> body;

  bool operator==(const Instruction&) const = default;
};

// Ordered instruction list over integer wires. Inputs are wires 0..n-1,
// ancillas introduce fresh ids, and a traced wire is never touched again.
// Outputs are the live wires in ascending id order.
class Circuit {
 public:
  explicit Circuit(std::size_t num_inputs = 0);

  std::size_t num_inputs() const { return num_inputs_; }
  const std::vector<Instruction>& instructions() const { return instrs_; }
  std::vector<Wire> output_wires() const;
  std::size_t num_outputs() const { return live_.size(); }
  std::vector<Wire> live_wires() const { return live_; }
  bool is_live(Wire w) const;
  // Smallest id never used by this circuit.
  Wire next_wire() const { return next_id_; }

  // Validates against the current wire state before appending.
  Circuit& add(Instruction ins);
  // Runs other with its inputs on the given live wires; its ancillas get
  // fresh ids. Returns where other's outputs landed, in other's output order.
  std::vector<Wire> append(const Circuit& other, const std::vector<Wire>& inputs);

  Circuit& x(Wire w) { return add({Op::kX, {w}, {}}); }
  Circuit& z(Wire w) { return add({Op::kZ, {w}, {}}); }
  Circuit& h(Wire w) { return add({Op::kH, {w}, {}}); }
  Circuit& t(Wire w) { return add({Op::kT, {w}, {}}); }
  Circuit& cnot(Wire c, Wire w) { return add({Op::kCnot, {c, w}, {}}); }
  Circuit& cz(Wire c, Wire w) { return add({Op::kCz, {c, w}, {}}); }
  Circuit& swap(Wire a, Wire b) { return add({Op::kSwap, {a, b}, {}}); }
  Circuit& cu(Wire c, std::vector<Instruction> body) { return add({Op::kCu, {c}, std::move(body)}); }
  Circuit& mixu(std::vector<Instruction> body) { return add({Op::kMixu, {}, std::move(body)}); }
  Circuit& measure(Wire w) { return add({Op::kMeasure, {w}, {}}); }
  Circuit& depolarize(Wire w) { return add({Op::kDepol, {w}, {}}); }
  Circuit& cdepol(Wire c, Wire w) { return add({Op::kCdepol, {c, w}, {}}); }
  Circuit& traceout(Wire w) { return add({Op::kTraceout, {w}, {}}); }
  Wire ancilla();  // fresh id
  Circuit& ancilla(Wire w) { return add({Op::kAncilla, {w}, {}}); }

  bool is_unitary() const;
  bool operator==(const Circuit&) const = default;

 private:
  std::size_t num_inputs_;
  std::vector<Instruction> instrs_;
  std::vector<Wire> live_;  // ascending
  std::vector<Wire> dead_;
  Wire next_id_;
};

// Instruction helpers for building bodies.
Instruction gate(Op op, std::vector<Wire> wires);
Instruction controlled_gate(Wire control, std::vector<Instruction> body);

Circuit parse(std::string_view text);
std::string serialize(const Circuit& c);

std::size_t depth(const Circuit& c);
std::size_t size(const Circuit& c);
// Peak number of simultaneously live wires.
std::size_t peak_width(const Circuit& c);

// Dense matrix of a unitary-only instruction sequence on the listed wires,
// first wire most significant.
Matrix unitary_matrix(std::span<const Instruction> body, const std::vector<Wire>& wires);
// Pure-state action of the same; works past the dense-matrix cap.
Vector apply_unitary(std::span<const Instruction> body, const std::vector<Wire>& wires, const Vector& psi);

// Mixed-state simulation with a trailing untouched reference of any size.
class CircuitMap : public LinearMap {
 public:
  explicit CircuitMap(Circuit c);

  const Circuit& circuit() const { return c_; }
  std::size_t in_dim() const override;
  std::size_t out_dim() const override;
  Matrix apply(const Matrix& x, std::size_t ref_dim) const override;
  Matrix apply_adjoint(const Matrix& y, std::size_t ref_dim) const override;

 private:
  Circuit c_;
};

// Choi matrix by one simulation against a reference as large as the input.
// Throws ResourceCapError past 12 qubits of peak width plus inputs.
Channel to_channel(const Circuit& c);
// Channel carrying a Stinespring rep taken from the normal form.
Channel to_stinespring_channel(const Circuit& c);

// Ancillas first, one unitary block, traces last; non-unitary gates are
// realized on fresh ancillas.
Circuit to_stinespring_form(const Circuit& c);
bool in_stinespring_form(const Circuit& c);

// Parts of a circuit in normal form.
struct NormalForm {
  std::vector<Wire> inputs;     // 0..n-1
  std::vector<Wire> ancillas;   // in order of introduction
  std::vector<Instruction> unitary;
  std::vector<Wire> outputs;    // ascending
  std::vector<Wire> env;        // ascending
};
NormalForm normal_form_parts(const Circuit& c);

// Wire 0 is the control; the body's wires shift up by one.
Circuit controlled(const Circuit& c);
// Same action with the control fanned out to n copies so gates of one layer
// are controlled in parallel; the copies are uncomputed and traced.
Circuit controlled_logdepth(const Circuit& c, std::size_t n);

// Control wire 0, halves on wires 1..n and n+1..2n.
Circuit swap_test_circuit(std::size_t n);
double antisym_probability(const DensityMatrix& rho);

// SWAP layers realizing target[k] <- source[k]: the value on wire from[k]
// ends up on wire to[k]. Both lists are permutations of the same set.
std::vector<Instruction> route_wires(const std::vector<Wire>& from, const std::vector<Wire>& to);

}  // namespace qchan

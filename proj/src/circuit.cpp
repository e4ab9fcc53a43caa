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

#include "qchan/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace qchan {

namespace {

using Idx = Eigen::Index;

constexpr std::size_t kMaxQubits = 12;

struct OpInfo {
  Op op;
  std::string_view name;
  std::size_t arity;
};

constexpr OpInfo kOps[] = {
    {Op::kX, "X", 1},          {Op::kZ, "Z", 1},           {Op::kH, "H", 1},
    {Op::kT, "T", 1},          {Op::kCnot, "CNOT", 2},     {Op::kCz, "CZ", 2},
    {Op::kSwap, "SWAP", 2},    {Op::kCu, "cu", 1},         {Op::kAncilla, "ancilla", 1},
    {Op::kTraceout, "traceout", 1}, {Op::kMeasure, "measure", 1}, {Op::kDepol, "depolarize", 1},
    {Op::kCdepol, "cdepol", 2}, {Op::kMixu, "mixu", 0},
};

const OpInfo& info(Op op) {
  for (const auto& i : kOps) {
    if (i.op == op) return i;
  }
  throw CircuitError("unknown op");
}

bool contains(const std::vector<Wire>& v, Wire w) { return std::find(v.begin(), v.end(), w) != v.end(); }

void collect_wires(const Instruction& ins, std::vector<Wire>& out) {
  for (Wire w : ins.wires) {
    if (!contains(out, w)) out.push_back(w);
  }
  for (const auto& b : ins.body) collect_wires(b, out);
}

std::vector<Wire> touched(const Instruction& ins) {
  std::vector<Wire> out;
  collect_wires(ins, out);
  return out;
}

Instruction relabel(const Instruction& ins, const std::map<Wire, Wire>& m) {
  Instruction r{ins.op, {}, {}};
  for (Wire w : ins.wires) r.wires.push_back(m.at(w));
  for (const auto& b : ins.body) r.body.push_back(relabel(b, m));
  return r;
}

Matrix gate_matrix(Op op) {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix m = Matrix::Zero(2, 2);
  switch (op) {
    case Op::kX: case Op::kCnot:
      m(0, 1) = m(1, 0) = 1.0;
      return m;
    case Op::kZ: case Op::kCz:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      return m;
    case Op::kH:
      m << s, s, s, -s;
      return m;
    case Op::kT:
      m(0, 0) = 1.0;
      m(1, 1) = std::polar(1.0, std::numbers::pi / 4.0);
      return m;
    case Op::kSwap: {
      Matrix w = Matrix::Zero(4, 4);
      w(0, 0) = w(3, 3) = w(1, 2) = w(2, 1) = 1.0;
      return w;
    }
    default:
      throw CircuitError("not a fixed gate");
  }
}

// Density-like operator over live qubit wires followed by a reference block
// of size ref. Row index = q * ref + r with q the qubit index, first wire in
// layout most significant.
struct SimState {
  Matrix m;
  std::vector<Wire> layout;
  std::size_t ref = 1;

  std::size_t n() const { return layout.size(); }
  std::size_t pos(Wire w) const {
    auto it = std::find(layout.begin(), layout.end(), w);
    if (it == layout.end()) throw CircuitError("simulation touched a dead wire");
    return static_cast<std::size_t>(it - layout.begin());
  }
  std::size_t qbit(Wire w) const { return std::size_t{1} << (n() - 1 - pos(w)); }
};

// m <- (U on targets, controlled on all controls being |1>) * m.
void apply_left(Matrix& m, std::size_t nq, std::size_t ref, const Matrix& u,
                const std::vector<std::size_t>& tbits, std::size_t cmask) {
  const std::size_t k = tbits.size();
  const std::size_t kdim = std::size_t{1} << k;
  std::size_t tmask = 0;
  std::vector<std::size_t> off(kdim, 0);
  for (std::size_t t = 0; t < k; ++t) tmask |= tbits[t];
  for (std::size_t l = 0; l < kdim; ++l) {
    for (std::size_t t = 0; t < k; ++t) {
      if ((l >> (k - 1 - t)) & 1U) off[l] |= tbits[t];
    }
  }
  const Idx r = static_cast<Idx>(ref);
  std::vector<Matrix> tmp(kdim);
  const std::size_t dq = std::size_t{1} << nq;
  for (std::size_t q = 0; q < dq; ++q) {
    if ((q & tmask) != 0 || (q & cmask) != cmask) continue;
    for (std::size_t l = 0; l < kdim; ++l) tmp[l] = m.middleRows(static_cast<Idx>(q + off[l]) * r, r);
    for (std::size_t l = 0; l < kdim; ++l) {
      auto rows = m.middleRows(static_cast<Idx>(q + off[l]) * r, r);
      rows.setZero();
      for (std::size_t lp = 0; lp < kdim; ++lp) {
        const cplx c = u(static_cast<Idx>(l), static_cast<Idx>(lp));
        if (c != cplx(0.0)) rows += c * tmp[lp];
      }
    }
  }
}

// Left-multiplies by a unitary instruction sequence (or its inverse).
void left_seq(Matrix& m, const SimState& s, std::span<const Instruction> body, std::size_t cmask,
              bool dagger) {
  const std::size_t nb = body.size();
  for (std::size_t idx = 0; idx < nb; ++idx) {
    const Instruction& g = body[dagger ? nb - 1 - idx : idx];
    switch (g.op) {
      case Op::kX: case Op::kZ: case Op::kH: case Op::kT: {
        Matrix u = gate_matrix(g.op);
        if (dagger) u.adjointInPlace();
        apply_left(m, s.n(), s.ref, u, {s.qbit(g.wires[0])}, cmask);
        break;
      }
      case Op::kCnot: case Op::kCz:
        apply_left(m, s.n(), s.ref, gate_matrix(g.op), {s.qbit(g.wires[1])}, cmask | s.qbit(g.wires[0]));
        break;
      case Op::kSwap:
        apply_left(m, s.n(), s.ref, gate_matrix(g.op), {s.qbit(g.wires[0]), s.qbit(g.wires[1])}, cmask);
        break;
      case Op::kCu:
        left_seq(m, s, g.body, cmask | s.qbit(g.wires[0]), dagger);
        break;
      default:
        throw CircuitError("non-unitary gate inside a unitary block");
    }
  }
}

// m <- U m U^* for U the body (or its inverse).
void conjugate(SimState& s, std::span<const Instruction> body, bool dagger) {
  left_seq(s.m, s, body, 0, dagger);
  Matrix a = s.m.adjoint();
  left_seq(a, s, body, 0, dagger);
  s.m = a.adjoint();
}

std::size_t insert_bit(std::size_t q, std::size_t nq_new, std::size_t p, std::size_t b) {
  // q indexes nq_new - 1 qubits; insert bit b at position p of nq_new
  const std::size_t lowbits = nq_new - 1 - p;
  const std::size_t low = q & ((std::size_t{1} << lowbits) - 1);
  const std::size_t high = q >> lowbits;
  return (high << (lowbits + 1)) | (b << lowbits) | low;
}

void trace_wire(SimState& s, Wire w) {
  const std::size_t p = s.pos(w), n = s.n();
  const Idx r = static_cast<Idx>(s.ref);
  const std::size_t dq = std::size_t{1} << (n - 1);
  Matrix out = Matrix::Zero(static_cast<Idx>(dq) * r, static_cast<Idx>(dq) * r);
  for (std::size_t a = 0; a < dq; ++a) {
    for (std::size_t b = 0; b < dq; ++b) {
      for (std::size_t bit = 0; bit < 2; ++bit) {
        out.block(static_cast<Idx>(a) * r, static_cast<Idx>(b) * r, r, r) +=
            s.m.block(static_cast<Idx>(insert_bit(a, n, p, bit)) * r, static_cast<Idx>(insert_bit(b, n, p, bit)) * r, r, r);
      }
    }
  }
  s.m = std::move(out);
  s.layout.erase(s.layout.begin() + static_cast<std::ptrdiff_t>(p));
}

// Adjoint of tracing: m (x) I at position p.
void untrace_wire(SimState& s, Wire w, std::size_t p) {
  const std::size_t n = s.n() + 1;
  const Idx r = static_cast<Idx>(s.ref);
  const std::size_t dq = std::size_t{1} << (n - 1);
  Matrix out = Matrix::Zero(static_cast<Idx>(2 * dq) * r, static_cast<Idx>(2 * dq) * r);
  for (std::size_t a = 0; a < dq; ++a) {
    for (std::size_t b = 0; b < dq; ++b) {
      for (std::size_t bit = 0; bit < 2; ++bit) {
        out.block(static_cast<Idx>(insert_bit(a, n, p, bit)) * r, static_cast<Idx>(insert_bit(b, n, p, bit)) * r, r, r) =
            s.m.block(static_cast<Idx>(a) * r, static_cast<Idx>(b) * r, r, r);
      }
    }
  }
  s.m = std::move(out);
  s.layout.insert(s.layout.begin() + static_cast<std::ptrdiff_t>(p), w);
}

void add_ancilla(SimState& s, Wire w) {
  const std::size_t dq = std::size_t{1} << s.n();
  const Idx r = static_cast<Idx>(s.ref);
  Matrix out = Matrix::Zero(static_cast<Idx>(2 * dq) * r, static_cast<Idx>(2 * dq) * r);
  for (std::size_t a = 0; a < dq; ++a) {
    for (std::size_t b = 0; b < dq; ++b) {
      out.block(static_cast<Idx>(2 * a) * r, static_cast<Idx>(2 * b) * r, r, r) =
          s.m.block(static_cast<Idx>(a) * r, static_cast<Idx>(b) * r, r, r);
    }
  }
  s.m = std::move(out);
  s.layout.push_back(w);
}

// Adjoint of appending |0>: compress the last wire onto <0|.
void drop_ancilla(SimState& s) {
  const std::size_t dq = std::size_t{1} << (s.n() - 1);
  const Idx r = static_cast<Idx>(s.ref);
  Matrix out(static_cast<Idx>(dq) * r, static_cast<Idx>(dq) * r);
  for (std::size_t a = 0; a < dq; ++a) {
    for (std::size_t b = 0; b < dq; ++b) {
      out.block(static_cast<Idx>(a) * r, static_cast<Idx>(b) * r, r, r) =
          s.m.block(static_cast<Idx>(2 * a) * r, static_cast<Idx>(2 * b) * r, r, r);
    }
  }
  s.m = std::move(out);
  s.layout.pop_back();
}

void dephase_wire(SimState& s, Wire w) {
  const std::size_t bit = s.qbit(w);
  const std::size_t dq = std::size_t{1} << s.n();
  const Idx r = static_cast<Idx>(s.ref);
  for (std::size_t a = 0; a < dq; ++a) {
    for (std::size_t b = 0; b < dq; ++b) {
      if ((a & bit) != (b & bit)) s.m.block(static_cast<Idx>(a) * r, static_cast<Idx>(b) * r, r, r).setZero();
    }
  }
}

// tr_w(m) (x) I/2 in place; self-adjoint.
void depolarize_wire(SimState& s, Wire w) {
  const std::size_t bit = s.qbit(w);
  const std::size_t dq = std::size_t{1} << s.n();
  const Idx r = static_cast<Idx>(s.ref);
  Matrix out = Matrix::Zero(s.m.rows(), s.m.cols());
  for (std::size_t a = 0; a < dq; ++a) {
    if (a & bit) continue;
    for (std::size_t b = 0; b < dq; ++b) {
      if (b & bit) continue;
      const Matrix avg = 0.5 * (s.m.block(static_cast<Idx>(a) * r, static_cast<Idx>(b) * r, r, r) +
                                s.m.block(static_cast<Idx>(a | bit) * r, static_cast<Idx>(b | bit) * r, r, r));
      out.block(static_cast<Idx>(a) * r, static_cast<Idx>(b) * r, r, r) = avg;
      out.block(static_cast<Idx>(a | bit) * r, static_cast<Idx>(b | bit) * r, r, r) = avg;
    }
  }
  s.m = std::move(out);
}

void mix_half(SimState& s, std::span<const Instruction> body, bool dagger) {
  SimState other = s;
  conjugate(other, body, dagger);
  s.m = 0.5 * (s.m + other.m);
}

void cdepol_step(SimState& s, const Instruction& ins, bool adjoint) {
  const Instruction cx = gate(Op::kCnot, ins.wires);
  const Instruction czg = gate(Op::kCz, ins.wires);
  if (!adjoint) {
    mix_half(s, std::span(&cx, 1), false);
    mix_half(s, std::span(&czg, 1), false);
  } else {
    mix_half(s, std::span(&czg, 1), true);
    mix_half(s, std::span(&cx, 1), true);
  }
}

void forward_step(SimState& s, const Instruction& ins) {
  switch (ins.op) {
    case Op::kAncilla: add_ancilla(s, ins.wires[0]); break;
    case Op::kTraceout: trace_wire(s, ins.wires[0]); break;
    case Op::kMeasure: dephase_wire(s, ins.wires[0]); break;
    case Op::kDepol: depolarize_wire(s, ins.wires[0]); break;
    case Op::kCdepol: cdepol_step(s, ins, false); break;
    case Op::kMixu: mix_half(s, ins.body, false); break;
    default: conjugate(s, std::span(&ins, 1), false); break;
  }
}

Matrix to_layout(const Matrix& m, const std::vector<Wire>& from, const std::vector<Wire>& to, std::size_t ref) {
  if (from == to) return m;
  Dims dims(from.size(), 2);
  dims.push_back(ref);
  std::vector<std::size_t> perm;
  for (Wire w : to) perm.push_back(static_cast<std::size_t>(std::find(from.begin(), from.end(), w) - from.begin()));
  perm.push_back(from.size());
  return permute_systems(m, dims, perm);
}

void check_cap(std::size_t qubits, std::size_t ref) {
  const std::size_t dim = (std::size_t{1} << std::min<std::size_t>(qubits, 62)) * ref;
  if (qubits > kMaxQubits || dim > kMaxDim) {
    throw ResourceCapError("simulation needs dimension " + std::to_string(dim) + " beyond cap " +
                           std::to_string(kMaxDim));
  }
}

std::vector<Wire> iota_wires(std::size_t n) {
  std::vector<Wire> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t col)
    : CircuitError(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}

bool is_unitary_op(Op op) {
  switch (op) {
    case Op::kX: case Op::kZ: case Op::kH: case Op::kT:
    case Op::kCnot: case Op::kCz: case Op::kSwap: case Op::kCu:
      return true;
    default:
      return false;
  }
}

std::string_view op_name(Op op) { return info(op).name; }

Instruction gate(Op op, std::vector<Wire> wires) { return Instruction{op, std::move(wires), {}}; }

Instruction controlled_gate(Wire control, std::vector<Instruction> body) {
  return Instruction{Op::kCu, {control}, std::move(body)};
}

Circuit::Circuit(std::size_t num_inputs)
    : num_inputs_(num_inputs), live_(iota_wires(num_inputs)), next_id_(num_inputs) {}

bool Circuit::is_live(Wire w) const { return std::binary_search(live_.begin(), live_.end(), w); }

std::vector<Wire> Circuit::output_wires() const { return live_; }

namespace {

void validate_unitary(const Instruction& ins, const Circuit& c, std::vector<Wire>& controls) {
  if (!is_unitary_op(ins.op)) {
    throw CircuitError(std::string("non-unitary instruction '") + std::string(op_name(ins.op)) +
                       "' inside a unitary block");
  }
  if (ins.wires.size() != info(ins.op).arity) {
    throw CircuitError(std::string("arity error for ") + std::string(op_name(ins.op)));
  }
  for (std::size_t i = 0; i < ins.wires.size(); ++i) {
    const Wire w = ins.wires[i];
    if (!c.is_live(w)) throw CircuitError("wire " + std::to_string(w) + " is not live");
    if (contains(controls, w)) throw CircuitError("wire " + std::to_string(w) + " is already a control");
    for (std::size_t j = 0; j < i; ++j) {
      if (ins.wires[j] == w) throw CircuitError("repeated wire " + std::to_string(w));
    }
  }
  if (ins.op == Op::kCu) {
    controls.push_back(ins.wires[0]);
    for (const auto& b : ins.body) validate_unitary(b, c, controls);
    controls.pop_back();
  } else if (!ins.body.empty()) {
    throw CircuitError("plain gate carries a body");
  }
}

}  // namespace

Circuit& Circuit::add(Instruction ins) {
  const OpInfo& oi = info(ins.op);
  if (is_unitary_op(ins.op)) {
    std::vector<Wire> controls;
    validate_unitary(ins, *this, controls);
    instrs_.push_back(std::move(ins));
    return *this;
  }
  if (ins.wires.size() != oi.arity) throw CircuitError(std::string("arity error for ") + std::string(oi.name));
  if (ins.op == Op::kMixu) {
    std::vector<Wire> controls;
    for (const auto& b : ins.body) validate_unitary(b, *this, controls);
    instrs_.push_back(std::move(ins));
    return *this;
  }
  if (!ins.body.empty()) throw CircuitError(std::string(oi.name) + " takes no body");
  if (ins.op == Op::kAncilla) {
    const Wire w = ins.wires[0];
    if (is_live(w) || contains(dead_, w)) throw CircuitError("ancilla wire " + std::to_string(w) + " is not fresh");
    live_.insert(std::upper_bound(live_.begin(), live_.end(), w), w);
    next_id_ = std::max(next_id_, w + 1);
    instrs_.push_back(std::move(ins));
    return *this;
  }
  for (std::size_t i = 0; i < ins.wires.size(); ++i) {
    if (!is_live(ins.wires[i])) throw CircuitError("wire " + std::to_string(ins.wires[i]) + " is not live");
    if (i > 0 && ins.wires[i] == ins.wires[0]) throw CircuitError("repeated wire " + std::to_string(ins.wires[i]));
  }
  if (ins.op == Op::kTraceout) {
    const Wire w = ins.wires[0];
    live_.erase(std::lower_bound(live_.begin(), live_.end(), w));
    dead_.push_back(w);
  }
  instrs_.push_back(std::move(ins));
  return *this;
}

Wire Circuit::ancilla() {
  const Wire w = next_id_;
  ancilla(w);
  return w;
}

std::vector<Wire> Circuit::append(const Circuit& other, const std::vector<Wire>& inputs) {
  if (inputs.size() != other.num_inputs()) throw CircuitError("append: input count mismatch");
  std::map<Wire, Wire> m;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!is_live(inputs[i])) throw CircuitError("append: wire " + std::to_string(inputs[i]) + " is not live");
    m[i] = inputs[i];
  }
  for (const auto& ins : other.instructions()) {
    if (ins.op == Op::kAncilla) {
      m[ins.wires[0]] = ancilla();
      continue;
    }
    add(relabel(ins, m));
  }
  std::vector<Wire> outs;
  for (Wire w : other.output_wires()) outs.push_back(m.at(w));
  return outs;
}

bool Circuit::is_unitary() const {
  return std::all_of(instrs_.begin(), instrs_.end(), [](const Instruction& i) { return is_unitary_op(i.op); });
}

// ---------------------------------------------------------------- text form

namespace {

struct Token {
  std::string text;  // "\n" for a line break
  std::size_t line;
  std::size_t col;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (ch == '\n') {
      out.push_back({"\n", line, col});
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      ++col;
      continue;
    }
    if (ch == '{' || ch == '}') {
      out.push_back({std::string(1, ch), line, col});
      ++i;
      ++col;
      continue;
    }
    const std::size_t start = i, scol = col;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '{' &&
           text[i] != '}' && text[i] != '#') {
      ++i;
      ++col;
    }
    out.push_back({std::string(text.substr(start, i - start)), line, scol});
  }
  out.push_back({"\n", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Circuit run() {
    skip_newlines();
    const Token& head = peek();
    if (head.text != "qubits") fail("expected 'qubits <n>' first", head);
    next();
    const std::size_t n = number("qubit count");
    end_of_line();
    Circuit c(n);
    while (true) {
      skip_newlines();
      if (at_end()) break;
      const Token start = peek();
      Instruction ins = statement(false);
      try {
        c.add(std::move(ins));
      } catch (const CircuitError& e) {
        throw ParseError(e.what(), start.line, start.col);
      }
    }
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, const Token& t) const { throw ParseError(msg, t.line, t.col); }
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_end() const { return pos_ + 1 >= toks_.size(); }
  void skip_newlines() {
    while (!at_end() && peek().text == "\n") ++pos_;
  }
  void end_of_line() {
    if (peek().text == "\n") {
      next();
      return;
    }
    if (peek().text == "}") return;
    fail("unexpected token '" + peek().text + "'", peek());
  }
  std::size_t number(const char* what) {
    const Token& t = peek();
    std::size_t v = 0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (t.text.empty() || ec != std::errc() || p != e) fail(std::string("expected ") + what, t);
    next();
    return v;
  }
  std::vector<Instruction> block(bool in_body) {
    (void)in_body;
    if (peek().text != "{") fail("expected '{'", peek());
    next();
    std::vector<Instruction> body;
    while (true) {
      skip_newlines();
      if (peek().text == "}") {
        next();
        break;
      }
      if (at_end()) fail("unterminated block", peek());
      body.push_back(statement(true));
    }
    end_of_line();
    return body;
  }
  Instruction statement(bool in_body) {
    const Token kw = next();
    if (kw.text == "gate") {
      const Token name = next();
      for (const auto& oi : kOps) {
        if (is_unitary_op(oi.op) && oi.op != Op::kCu && oi.name == name.text) {
          Instruction ins{oi.op, {}, {}};
          for (std::size_t k = 0; k < oi.arity; ++k) ins.wires.push_back(number("wire index"));
          end_of_line();
          return ins;
        }
      }
      fail("unknown gate '" + name.text + "'", name);
    }
    if (kw.text == "cu") {
      Instruction ins{Op::kCu, {number("control wire")}, {}};
      ins.body = block(true);
      return ins;
    }
    if (in_body) fail("only unitary gates are allowed here, got '" + kw.text + "'", kw);
    if (kw.text == "mixu") {
      Instruction ins{Op::kMixu, {}, {}};
      ins.body = block(true);
      return ins;
    }
    for (const auto& oi : kOps) {
      if (!is_unitary_op(oi.op) && oi.op != Op::kMixu && oi.name == kw.text) {
        Instruction ins{oi.op, {}, {}};
        for (std::size_t k = 0; k < oi.arity; ++k) ins.wires.push_back(number("wire index"));
        end_of_line();
        return ins;
      }
    }
    fail("unknown token '" + kw.text + "'", kw);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void write_instr(std::ostringstream& os, const Instruction& ins, std::size_t indent) {
  const std::string pad(indent * 2, ' ');
  os << pad;
  if (ins.op == Op::kCu || ins.op == Op::kMixu) {
    os << op_name(ins.op);
    if (ins.op == Op::kCu) os << ' ' << ins.wires[0];
    os << " {\n";
    for (const auto& b : ins.body) write_instr(os, b, indent + 1);
    os << pad << "}\n";
    return;
  }
  if (is_unitary_op(ins.op)) os << "gate ";
  os << op_name(ins.op);
  for (Wire w : ins.wires) os << ' ' << w;
  os << '\n';
}

}  // namespace

Circuit parse(std::string_view text) { return Parser(tokenize(text)).run(); }

std::string serialize(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.num_inputs() << '\n';
  for (const auto& ins : c.instructions()) write_instr(os, ins, 0);
  return os.str();
}

// ------------------------------------------------------------------ metrics

std::size_t depth(const Circuit& c) {
  std::map<Wire, std::size_t> level;
  std::size_t best = 0;
  for (const auto& ins : c.instructions()) {
    const auto ws = touched(ins);
    std::size_t l = 0;
    for (Wire w : ws) l = std::max(l, level[w]);
    ++l;
    for (Wire w : ws) level[w] = l;
    best = std::max(best, l);
  }
  return best;
}

std::size_t size(const Circuit& c) {
  std::size_t wires = c.num_inputs();
  for (const auto& ins : c.instructions()) wires += ins.op == Op::kAncilla ? 1 : 0;
  return std::max(c.instructions().size(), wires);
}

std::size_t peak_width(const Circuit& c) {
  std::size_t live = c.num_inputs(), peak = live;
  for (const auto& ins : c.instructions()) {
    if (ins.op == Op::kAncilla) peak = std::max(peak, ++live);
    if (ins.op == Op::kTraceout) --live;
  }
  return peak;
}

// --------------------------------------------------------------- simulation

Matrix unitary_matrix(std::span<const Instruction> body, const std::vector<Wire>& wires) {
  check_cap(wires.size(), 1);
  SimState s;
  const Idx d = Idx{1} << wires.size();
  s.m = Matrix::Identity(d, d);
  s.layout = wires;
  left_seq(s.m, s, body, 0, false);
  return s.m;
}

Vector apply_unitary(std::span<const Instruction> body, const std::vector<Wire>& wires, const Vector& psi) {
  if (wires.size() > 24 || psi.size() != (Idx{1} << wires.size())) {
    throw CircuitError("apply_unitary: state size does not match wires");
  }
  SimState s;
  s.m = psi;
  s.layout = wires;
  left_seq(s.m, s, body, 0, false);
  return s.m.col(0);
}

CircuitMap::CircuitMap(Circuit c) : c_(std::move(c)) {}

std::size_t CircuitMap::in_dim() const { return std::size_t{1} << c_.num_inputs(); }
std::size_t CircuitMap::out_dim() const { return std::size_t{1} << c_.num_outputs(); }

Matrix CircuitMap::apply(const Matrix& x, std::size_t ref_dim) const {
  check_cap(peak_width(c_), ref_dim);
  if (x.rows() != static_cast<Idx>(in_dim() * ref_dim) || x.cols() != x.rows()) {
    throw CircuitError("apply: operand dimension mismatch");
  }
  SimState s{x, iota_wires(c_.num_inputs()), ref_dim};
  for (const auto& ins : c_.instructions()) forward_step(s, ins);
  return to_layout(s.m, s.layout, c_.output_wires(), ref_dim);
}

Matrix CircuitMap::apply_adjoint(const Matrix& y, std::size_t ref_dim) const {
  check_cap(peak_width(c_), ref_dim);
  if (y.rows() != static_cast<Idx>(out_dim() * ref_dim) || y.cols() != y.rows()) {
    throw CircuitError("apply_adjoint: operand dimension mismatch");
  }
  const auto& ins = c_.instructions();
  std::vector<std::vector<Wire>> layouts{iota_wires(c_.num_inputs())};
  for (const auto& i : ins) {
    std::vector<Wire> l = layouts.back();
    if (i.op == Op::kAncilla) l.push_back(i.wires[0]);
    if (i.op == Op::kTraceout) l.erase(std::find(l.begin(), l.end(), i.wires[0]));
    layouts.push_back(std::move(l));
  }
  SimState s{to_layout(y, c_.output_wires(), layouts.back(), ref_dim), layouts.back(), ref_dim};
  for (std::size_t k = ins.size(); k-- > 0;) {
    const Instruction& i = ins[k];
    switch (i.op) {
      case Op::kAncilla: drop_ancilla(s); break;
      case Op::kTraceout: {
        const auto& before = layouts[k];
        const auto p = static_cast<std::size_t>(std::find(before.begin(), before.end(), i.wires[0]) - before.begin());
        untrace_wire(s, i.wires[0], p);
        break;
      }
      case Op::kMeasure: dephase_wire(s, i.wires[0]); break;
      case Op::kDepol: depolarize_wire(s, i.wires[0]); break;
      case Op::kCdepol: cdepol_step(s, i, true); break;
      case Op::kMixu: mix_half(s, i.body, true); break;
      default: conjugate(s, std::span(&i, 1), true); break;
    }
  }
  return s.m;
}

Channel to_channel(const Circuit& c) {
  const std::size_t nin = c.num_inputs();
  if (peak_width(c) + nin > kMaxQubits) {
    throw ResourceCapError("circuit too wide to compile: " + std::to_string(peak_width(c)) + " live + " +
                           std::to_string(nin) + " reference qubits exceed " + std::to_string(kMaxQubits));
  }
  const std::size_t din = std::size_t{1} << nin;
  Vector omega = Vector::Zero(static_cast<Idx>(din * din));
  for (std::size_t i = 0; i < din; ++i) omega(static_cast<Idx>(i * din + i)) = 1.0;
  const Matrix choi = CircuitMap(c).apply(omega * omega.adjoint(), din);
  return Channel::from_choi(choi, Dims(nin, 2), Dims(c.num_outputs(), 2));
}

// ------------------------------------------------------------ normal form

bool in_stinespring_form(const Circuit& c) {
  int phase = 0;  // 0 ancillas, 1 unitary, 2 traces
  for (const auto& i : c.instructions()) {
    const int p = i.op == Op::kAncilla ? 0 : (i.op == Op::kTraceout ? 2 : (is_unitary_op(i.op) ? 1 : -1));
    if (p < 0 || p < phase) return false;
    phase = p;
  }
  return true;
}

Circuit to_stinespring_form(const Circuit& c) {
  std::vector<Wire> ancillas, traces;
  std::vector<Instruction> body;
  Wire fresh = c.next_wire();
  auto plus = [&]() {
    const Wire a = fresh++;
    ancillas.push_back(a);
    traces.push_back(a);
    body.push_back(gate(Op::kH, {a}));
    return a;
  };
  for (const auto& i : c.instructions()) {
    switch (i.op) {
      case Op::kAncilla: ancillas.push_back(i.wires[0]); break;
      case Op::kTraceout: traces.push_back(i.wires[0]); break;
      case Op::kMeasure: {
        const Wire a = fresh++;
        ancillas.push_back(a);
        traces.push_back(a);
        body.push_back(gate(Op::kCnot, {i.wires[0], a}));
        break;
      }
      case Op::kDepol: {
        const Wire a = plus(), b = plus();
        body.push_back(controlled_gate(a, {gate(Op::kX, {i.wires[0]})}));
        body.push_back(controlled_gate(b, {gate(Op::kZ, {i.wires[0]})}));
        break;
      }
      case Op::kCdepol: {
        const Wire a = plus(), b = plus();
        body.push_back(controlled_gate(a, {gate(Op::kCnot, i.wires)}));
        body.push_back(controlled_gate(b, {gate(Op::kCz, i.wires)}));
        break;
      }
      case Op::kMixu: {
        const Wire a = plus();
        body.push_back(controlled_gate(a, i.body));
        break;
      }
      default: body.push_back(i); break;
    }
  }
  Circuit out(c.num_inputs());
  for (Wire a : ancillas) out.ancilla(a);
  for (auto& g : body) out.add(std::move(g));
  std::sort(traces.begin(), traces.end());
  for (Wire t : traces) out.traceout(t);
  return out;
}

NormalForm normal_form_parts(const Circuit& c) {
  if (!in_stinespring_form(c)) throw CircuitError("circuit is not in Stinespring normal form");
  NormalForm nf;
  nf.inputs = iota_wires(c.num_inputs());
  for (const auto& i : c.instructions()) {
    if (i.op == Op::kAncilla) nf.ancillas.push_back(i.wires[0]);
    else if (i.op == Op::kTraceout) nf.env.push_back(i.wires[0]);
    else nf.unitary.push_back(i);
  }
  std::sort(nf.env.begin(), nf.env.end());
  nf.outputs = c.output_wires();
  return nf;
}

Channel to_stinespring_channel(const Circuit& c) {
  const NormalForm nf = normal_form_parts(in_stinespring_form(c) ? c : to_stinespring_form(c));
  std::vector<Wire> wires = nf.inputs;
  wires.insert(wires.end(), nf.ancillas.begin(), nf.ancillas.end());
  const Matrix u = unitary_matrix(nf.unitary, wires);
  std::vector<Wire> rows = nf.outputs;
  rows.insert(rows.end(), nf.env.begin(), nf.env.end());
  std::vector<std::size_t> row_perm, col_perm;
  for (std::size_t k = 0; k < wires.size(); ++k) {
    row_perm.push_back(static_cast<std::size_t>(std::find(wires.begin(), wires.end(), rows[k]) - wires.begin()));
    col_perm.push_back(k);
  }
  const Dims twos(wires.size(), 2);
  const Matrix v = permute_systems(u, twos, row_perm, twos, col_perm);
  StinespringRep rep{v, Dims(nf.ancillas.size(), 2), Dims(nf.env.size(), 2)};
  return Channel::from_stinespring(std::move(rep), Dims(nf.inputs.size(), 2), Dims(nf.outputs.size(), 2));
}

// --------------------------------------------------------- constructions

Circuit controlled(const Circuit& c) {
  if (!c.is_unitary()) throw CircuitError("controlled: circuit has non-unitary instructions");
  std::map<Wire, Wire> shift;
  for (Wire w = 0; w < c.next_wire(); ++w) shift[w] = w + 1;
  std::vector<Instruction> body;
  for (const auto& i : c.instructions()) body.push_back(relabel(i, shift));
  Circuit out(c.num_inputs() + 1);
  out.cu(0, std::move(body));
  return out;
}

Circuit controlled_logdepth(const Circuit& c, std::size_t n) {
  if (!c.is_unitary()) throw CircuitError("controlled_logdepth: circuit has non-unitary instructions");
  if (n == 0) throw CircuitError("controlled_logdepth: need at least one control copy");
  std::map<Wire, Wire> shift;
  for (Wire w = 0; w < c.next_wire(); ++w) shift[w] = w + 1;
  Circuit out(c.num_inputs() + 1);
  std::vector<Wire> copies{0};
  for (std::size_t k = 1; k < n; ++k) copies.push_back(out.ancilla());
  std::vector<Instruction> fan;
  for (std::size_t have = 1; have < n; have *= 2) {
    for (std::size_t k = 0; k < have && have + k < n; ++k) fan.push_back(gate(Op::kCnot, {copies[k], copies[have + k]}));
  }
  for (const auto& g : fan) out.add(g);
  // Layer the gates, then give each gate of a layer its own copy.
  std::map<Wire, std::size_t> level;
  std::vector<std::vector<const Instruction*>> layers;
  for (const auto& g : c.instructions()) {
    std::size_t l = 0;
    const auto ws = touched(g);
    for (Wire w : ws) l = std::max(l, level[w]);
    for (Wire w : ws) level[w] = l + 1;
    if (layers.size() <= l) layers.resize(l + 1);
    layers[l].push_back(&g);
  }
  for (const auto& layer : layers) {
    for (std::size_t k = 0; k < layer.size(); ++k) {
      out.cu(copies[k % n], {relabel(*layer[k], shift)});
    }
  }
  for (auto it = fan.rbegin(); it != fan.rend(); ++it) out.add(*it);
  for (std::size_t k = 1; k < n; ++k) out.traceout(copies[k]);
  return out;
}

Circuit swap_test_circuit(std::size_t n) {
  Circuit c(2 * n + 1);
  c.h(0);
  std::vector<Instruction> swaps;
  for (std::size_t i = 0; i < n; ++i) swaps.push_back(gate(Op::kSwap, {1 + i, 1 + n + i}));
  c.cu(0, std::move(swaps));
  c.h(0);
  c.measure(0);
  return c;
}

double antisym_probability(const DensityMatrix& rho) {
  const std::size_t d = rho.dim();
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
  if (k * k != d) throw CircuitError("antisym_probability: halves have unequal dimension");
  cplx tr = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) tr += rho.mat()(static_cast<Idx>(a * k + b), static_cast<Idx>(b * k + a));
  }
  return 0.5 * (1.0 - tr.real());
}

std::vector<Instruction> route_wires(const std::vector<Wire>& from, const std::vector<Wire>& to) {
  if (from.size() != to.size() || std::set<Wire>(from.begin(), from.end()) != std::set<Wire>(to.begin(), to.end())) {
    throw CircuitError("route_wires: lists are not permutations of one set");
  }
  std::map<Wire, Wire> dest;
  for (std::size_t k = 0; k < from.size(); ++k) dest[from[k]] = to[k];
  std::vector<Instruction> first, second;
  std::set<Wire> seen;
  for (Wire start : from) {
    if (seen.count(start)) continue;
    std::vector<Wire> cyc;
    for (Wire w = start; !seen.count(w); w = dest[w]) {
      seen.insert(w);
      cyc.push_back(w);
    }
    const std::size_t m = cyc.size();
    // a_i -> a_{-i} then a_j -> a_{1-j}
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = (m - i) % m;
      if (i < j) first.push_back(gate(Op::kSwap, {cyc[i], cyc[j]}));
      const std::size_t l = (m + 1 - i) % m;
      if (i < l) second.push_back(gate(Op::kSwap, {cyc[i], cyc[l]}));
    }
  }
  first.insert(first.end(), second.begin(), second.end());
  return first;
}

}  // namespace qchan

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

#include "qchan/reductions.hpp"

#include "qchan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace qchan {

namespace {

using Idx = Eigen::Index;
using Wires = std::vector<Wire>;

// Cap on copies of the input circuits inside one polarized circuit.
constexpr std::size_t kMaxPolarizeCopies = std::size_t{1} << 16;
// Largest total dimension for the channel-level mixed-unitary construction.
constexpr std::size_t kMaxApproxDim = 64;

Wires range(Wire first, std::size_t count) {
  Wires w(count);
  std::iota(w.begin(), w.end(), first);
  return w;
}

Wires fresh(Circuit& c, std::size_t count) {
  Wires w;
  for (std::size_t k = 0; k < count; ++k) w.push_back(c.ancilla());
  return w;
}

Wires concat(Wires a, const Wires& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Position k of the body becomes host wire map[k].
Instruction remap(const Instruction& ins, const Wires& map) {
  Instruction out{ins.op, {}, {}};
  for (Wire w : ins.wires) out.wires.push_back(map.at(w));
  for (const auto& b : ins.body) out.body.push_back(remap(b, map));
  return out;
}

std::vector<Instruction> remap(const std::vector<Instruction>& body, const Wires& map) {
  std::vector<Instruction> out;
  out.reserve(body.size());
  for (const auto& g : body) out.push_back(remap(g, map));
  return out;
}

Instruction remap(const Instruction& ins, const std::map<Wire, Wire>& map) {
  Instruction out{ins.op, {}, {}};
  for (Wire w : ins.wires) out.wires.push_back(map.at(w));
  for (const auto& b : ins.body) out.body.push_back(remap(b, map));
  return out;
}

// Inverse gate sequence. T has order 8 so its inverse is seven copies.
std::vector<Instruction> adjoint_body(const std::vector<Instruction>& body) {
  std::vector<Instruction> out;
  for (auto it = body.rbegin(); it != body.rend(); ++it) {
    if (it->op == Op::kT) {
      for (int k = 0; k < 7; ++k) out.push_back(*it);
    } else if (it->op == Op::kCu) {
      out.push_back(Instruction{Op::kCu, it->wires, adjoint_body(it->body)});
    } else {
      out.push_back(*it);
    }
  }
  return out;
}

void add_all(Circuit& c, const std::vector<Instruction>& body) {
  for (const auto& g : body) c.add(g);
}

// Moves the listed values so outputs sit on the lowest live ids in order and
// env values on the rest in order, then traces the env.
void finish(Circuit& c, const Wires& outputs, const Wires& env) {
  const Wires sorted = c.live_wires();
  const Wires from = concat(outputs, env);
  if (std::set<Wire>(from.begin(), from.end()) != std::set<Wire>(sorted.begin(), sorted.end()) ||
      from.size() != sorted.size()) {
    throw std::logic_error("finish: outputs and env must partition the live wires");
  }
  add_all(c, route_wires(from, sorted));
  for (std::size_t k = outputs.size(); k < sorted.size(); ++k) c.traceout(sorted[k]);
}

Wires live_except(const Circuit& c, const Wires& keep) {
  const std::set<Wire> k(keep.begin(), keep.end());
  Wires rest;
  for (Wire w : c.live_wires()) {
    if (!k.count(w)) rest.push_back(w);
  }
  return rest;
}

void require_form(const Circuit& q, const char* what) {
  if (!in_stinespring_form(q)) throw CircuitError(std::string(what) + ": input is not in Stinespring normal form");
}

// A circuit's dilation unitary on wires 0..width-1: inputs on 0..inputs-1,
// ancillas on the rest; afterwards outputs sit on 0..outputs-1 and the
// environment on outputs..width-1.
struct Block {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::size_t width = 0;
  std::vector<Instruction> body;
  std::vector<std::string> notes;
};

Block make_block(const Circuit& q, std::size_t min_in, std::size_t min_out, std::size_t min_width) {
  const NormalForm nf = normal_form_parts(in_stinespring_form(q) ? q : to_stinespring_form(q));
  const std::size_t n = nf.inputs.size(), m = nf.ancillas.size(), nout = nf.outputs.size();
  Block b;
  b.inputs = std::max(n, min_in);
  b.outputs = std::max(nout, min_out);
  const std::size_t base = b.inputs + m + (b.outputs - nout);
  b.width = std::max(base, min_width);
  std::map<Wire, Wire> pos;
  for (std::size_t k = 0; k < n; ++k) pos[nf.inputs[k]] = k;
  for (std::size_t j = 0; j < m; ++j) pos[nf.ancillas[j]] = b.inputs + j;
  for (const auto& g : nf.unitary) b.body.push_back(remap(g, pos));
  Wires from;
  for (Wire w : nf.outputs) from.push_back(pos.at(w));
  for (std::size_t k = 0; k < b.outputs - nout; ++k) from.push_back(b.inputs + m + k);
  for (Wire w : nf.env) from.push_back(pos.at(w));
  for (std::size_t k = n; k < b.inputs; ++k) from.push_back(k);
  for (std::size_t k = base; k < b.width; ++k) from.push_back(k);
  const auto route = route_wires(from, range(0, b.width));
  b.body.insert(b.body.end(), route.begin(), route.end());
  if (b.inputs > n) b.notes.push_back("input padded with " + std::to_string(b.inputs - n) + " traced qubits");
  if (b.outputs > nout) b.notes.push_back("output padded with " + std::to_string(b.outputs - nout) + " |0> qubits");
  if (b.width > base) b.notes.push_back("ancilla space padded with " + std::to_string(b.width - base) + " unused qubits");
  return b;
}

Block square_block(const Circuit& q) {
  const std::size_t n = std::max(q.num_inputs(), q.num_outputs());
  return make_block(q, n, n, 0);
}

std::pair<Block, Block> paired_blocks(const Circuit& q1, const Circuit& q2) {
  const std::size_t nin = std::max(q1.num_inputs(), q2.num_inputs());
  const std::size_t nout = std::max(q1.num_outputs(), q2.num_outputs());
  const std::size_t w = std::max(make_block(q1, nin, nout, 0).width, make_block(q2, nin, nout, 0).width);
  return {make_block(q1, nin, nout, w), make_block(q2, nin, nout, w)};
}

void add_notes(ReductionReport& r, const std::string& who, const Block& b) {
  for (const auto& n : b.notes) r.notes.push_back(who + ": " + n);
}

ReductionReport pair_report(std::string kind, const Circuit& q1, const Circuit& q2) {
  ReductionReport r;
  r.kind = std::move(kind);
  r.inputs = {{"q1", digest(q1)}, {"q2", digest(q2)}};
  r.artifacts = {"c1", "c2"};
  return r;
}

// Swap test on halves a, b with result on t, run only when the selector
// equals the given value; otherwise t stays |0>.
void selected_swap_test(Circuit& c, Wire selector, bool on_one, Wire t, const Wires& a, const Wires& b) {
  const std::size_t w = a.size();
  Circuit layer(2 * w);
  for (std::size_t k = 0; k < w; ++k) layer.swap(k, w + k);
  const Circuit gadget = controlled_logdepth(layer, std::max<std::size_t>(w, 1));
  if (!on_one) c.x(selector);
  c.cu(selector, {gate(Op::kH, {t})});
  c.append(gadget, concat(concat(Wires{t}, a), b));
  c.cu(selector, {gate(Op::kH, {t})});
  if (!on_one) c.x(selector);
  c.measure(t);
}

// Product state without the dense-matrix cap.
Vector kron_state(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Idx i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix weyl(std::size_t d, std::size_t a, std::size_t b) { return weyl_operator(d, a, b).mat(); }

}  // namespace

double ReductionReport::parameter(std::string_view name) const {
  for (const auto& [k, v] : parameters) {
    if (k == name) return v;
  }
  throw std::out_of_range("report has no parameter " + std::string(name));
}

std::string digest(const Circuit& c) { return content_digest(serialize(c)); }

// ------------------------------------------------------------ polarization

std::pair<double, double> direct_product_bracket(double delta, std::size_t r) {
  const double k = static_cast<double>(r);
  return {2.0 - 2.0 * std::exp(-k * delta * delta / 8.0), k * delta};
}

CircuitPair direct_product(const Circuit& q1, const Circuit& q2, std::size_t r) {
  if (r == 0) throw CircuitError("direct_product: r must be at least 1");
  auto build = [r](const Circuit& q) {
    const std::size_t n = q.num_inputs();
    Circuit c(r * n);
    Wires outs;
    for (std::size_t k = 0; k < r; ++k) {
      const Wires o = c.append(q, range(k * n, n));
      outs.insert(outs.end(), o.begin(), o.end());
    }
    finish(c, outs, {});
    return c;
  };
  CircuitPair out{build(q1), build(q2), pair_report("product", q1, q2)};
  out.report.parameters = {{"r", static_cast<double>(r)}};
  out.report.predicted.push_back({"diamond(C1,C2)", "2 - 2 exp(-r delta^2 / 8) < value <= r delta, delta = diamond(Q1,Q2)",
                                  std::nullopt, std::nullopt});
  out.report.predicted.push_back({"diamond(C1,C2)", "== 0 when Q1 == Q2", std::nullopt, std::nullopt});
  return out;
}

double xor_mix_distance(double delta, std::size_t r) {
  return 2.0 * std::pow(delta / 2.0, static_cast<double>(r));
}

CircuitPair xor_mix(const Circuit& q1, const Circuit& q2, std::size_t r) {
  if (r == 0) throw CircuitError("xor_mix: r must be at least 1");
  const auto [b1, b2] = paired_blocks(q1, q2);
  auto build = [&, r](bool odd) {
    Circuit c(r * b1.inputs);
    const Wires bits = fresh(c, r);
    std::vector<Wires> slots;
    for (std::size_t k = 0; k < r; ++k) slots.push_back(concat(range(k * b1.inputs, b1.inputs), fresh(c, b1.width - b1.inputs)));
    // bit 1 selects q1; the last bit fixes the parity of the q1 count.
    for (std::size_t k = 0; k + 1 < r; ++k) c.mixu({gate(Op::kX, {bits[k]})});
    for (std::size_t k = 0; k + 1 < r; ++k) c.cnot(bits[k], bits[r - 1]);
    if (odd) c.x(bits[r - 1]);
    Wires outs;
    for (std::size_t k = 0; k < r; ++k) {
      c.cu(bits[k], remap(b1.body, slots[k]));
      c.x(bits[k]);
      c.cu(bits[k], remap(b2.body, slots[k]));
      c.x(bits[k]);
      outs.insert(outs.end(), slots[k].begin(), slots[k].begin() + static_cast<std::ptrdiff_t>(b1.outputs));
    }
    finish(c, outs, live_except(c, outs));
    return c;
  };
  CircuitPair out{build(true), build(false), pair_report("xor", q1, q2)};
  out.report.parameters = {{"r", static_cast<double>(r)}};
  out.report.predicted.push_back({"diamond(C1,C2)", "== 2 (delta/2)^r, delta = diamond(Q1,Q2)", std::nullopt, std::nullopt});
  add_notes(out.report, "q1", b1);
  add_notes(out.report, "q2", b2);
  return out;
}

PolarizeParameters polarize_parameters(std::size_t n, double a, double b) {
  if (n == 0) throw CircuitError("polarize: n must be at least 1");
  if (!(b > 0.0 && b < a && a < 2.0)) throw CircuitError("polarize: need 0 < b < a < 2");
  if (!(2.0 * b < a * a)) throw CircuitError("polarize: need 2b < a^2");
  // Guard the rounding steps against ulp-level noise in exact cases.
  constexpr double kSlack = 1e-12;
  const double ratio = std::log2(16.0 * static_cast<double>(n)) / std::log2(a * a / (2.0 * b));
  PolarizeParameters p;
  p.r = static_cast<std::size_t>(std::ceil(ratio * (1.0 - kSlack)));
  const double s = std::pow(b / 2.0, -static_cast<double>(p.r)) / 4.0;
  if (!(s < 1e15)) throw ResourceCapError("polarize: product count overflows");
  p.s = static_cast<std::size_t>(std::floor(s * (1.0 + kSlack)));
  p.t = (n + 2) / 2;
  return p;
}

CircuitPair polarize(const Circuit& q1, const Circuit& q2, std::size_t n, double a, double b) {
  const PolarizeParameters p = polarize_parameters(n, a, b);
  if (p.s == 0 || p.r * p.s * p.t > kMaxPolarizeCopies) {
    throw ResourceCapError("polarize: " + std::to_string(p.r * p.s * p.t) + " circuit copies exceed the cap");
  }
  CircuitPair first = xor_mix(q1, q2, p.r);
  CircuitPair grown = direct_product(first.first, first.second, p.s);
  CircuitPair last = xor_mix(grown.first, grown.second, p.t);
  CircuitPair out{std::move(last.first), std::move(last.second), pair_report("polarize", q1, q2)};
  out.report.parameters = {{"n", static_cast<double>(n)}, {"a", a}, {"b", b}, {"r", static_cast<double>(p.r)},
                           {"s", static_cast<double>(p.s)}, {"t", static_cast<double>(p.t)}};
  const double eps = std::ldexp(1.0, -static_cast<int>(n));
  out.report.predicted.push_back({"diamond(C1,C2)", "< 2^-n when diamond(Q1,Q2) <= b", std::nullopt, eps});
  out.report.predicted.push_back({"diamond(C1,C2)", "> 2 - 2^-n when diamond(Q1,Q2) >= a", 2.0 - eps, std::nullopt});
  out.report.notes = first.report.notes;
  return out;
}

// ------------------------------------------------------------ close images

CircuitPair qip_to_close_images(const Circuit& v1, const Circuit& v2, const VerifierSpaces& spaces) {
  if (!v1.is_unitary() || !v2.is_unitary()) throw CircuitError("qip_to_close_images: verifier must be unitary");
  const std::size_t nv = spaces.verifier.size(), nm = spaces.message.size();
  if (nv == 0) throw CircuitError("qip_to_close_images: verifier space is empty");
  const Wires all = concat(spaces.verifier, spaces.message);
  const Wires expected = range(0, all.size());
  if (std::set<Wire>(all.begin(), all.end()) != std::set<Wire>(expected.begin(), expected.end()) ||
      v1.num_inputs() != all.size() || v2.num_inputs() != all.size()) {
    throw CircuitError("qip_to_close_images: spaces must partition the verifier wires");
  }
  const std::size_t nin = nm + nv - 1;

  Circuit c1(nin);
  {
    Wires map(all.size());
    for (std::size_t k = 0; k < nm; ++k) map[spaces.message[k]] = k;
    const Wires v = fresh(c1, nv);
    for (std::size_t j = 0; j < nv; ++j) map[spaces.verifier[j]] = v[j];
    add_all(c1, remap(v1.instructions(), map));
    Wires env;
    for (Wire w : spaces.message) env.push_back(map[w]);
    for (std::size_t k = nm; k < nin; ++k) env.push_back(k);
    finish(c1, v, env);
  }
  Circuit c2(nin);
  {
    Wires map(all.size());
    for (std::size_t j = 1; j < nv; ++j) map[spaces.verifier[j]] = j - 1;
    for (std::size_t k = 0; k < nm; ++k) map[spaces.message[k]] = nv - 1 + k;
    const Wire flag = c2.ancilla();
    map[spaces.verifier[0]] = flag;
    c2.x(flag);
    add_all(c2, remap(adjoint_body(v2.instructions()), map));
    Wires outs, env;
    for (Wire w : spaces.verifier) outs.push_back(map[w]);
    for (Wire w : spaces.message) env.push_back(map[w]);
    finish(c2, outs, env);
  }
  CircuitPair out{std::move(c1), std::move(c2), pair_report("qip2ci", v1, v2)};
  out.report.inputs = {{"v1", digest(v1)}, {"v2", digest(v2)}};
  out.report.artifacts = {"q1", "q2"};
  out.report.parameters = {{"verifier_qubits", static_cast<double>(nv)}, {"message_qubits", static_cast<double>(nm)}};
  out.report.predicted.push_back({"max_acceptance", "== Fmax(Q1,Q2)^2", 0.0, 1.0});
  if (nv > 1) out.report.notes.push_back("q1: input padded with " + std::to_string(nv - 1) + " traced qubits");
  return out;
}

// --------------------------------------------------------------- log depth

LogDepthPlan plan_logdepth(const Circuit& q1, const Circuit& q2, std::size_t gates_per_piece) {
  require_form(q1, "ci_to_logdepth");
  require_form(q2, "ci_to_logdepth");
  if (gates_per_piece == 0) throw CircuitError("ci_to_logdepth: pieces need at least one gate");
  const auto [b1, b2] = paired_blocks(q1, q2);
  LogDepthPlan plan;
  plan.inputs = b1.inputs;
  plan.outputs = b1.outputs;
  plan.width = b1.width;
  const std::array<const Block*, 2> blocks{&b1, &b2};
  for (std::size_t c = 0; c < 2; ++c) {
    auto& pieces = plan.pieces[c];
    const auto& body = blocks[c]->body;
    for (std::size_t k = 0; k < body.size(); k += gates_per_piece) {
      const auto last = std::min(body.size(), k + gates_per_piece);
      pieces.emplace_back(body.begin() + static_cast<std::ptrdiff_t>(k), body.begin() + static_cast<std::ptrdiff_t>(last));
    }
    if (pieces.empty()) pieces.emplace_back();
  }
  const std::size_t g = std::max(plan.pieces[0].size(), plan.pieces[1].size());
  for (auto& p : plan.pieces) p.resize(g);
  return plan;
}

CircuitPair ci_to_logdepth(const Circuit& q1, const Circuit& q2, std::size_t gates_per_piece) {
  const LogDepthPlan plan = plan_logdepth(q1, q2, gates_per_piece);
  const std::size_t g = plan.pieces[0].size(), nb = plan.boundaries(), w = plan.width;
  auto build = [&](std::size_t which) {
    Circuit c(plan.input_qubits());
    std::vector<Wires> blk(g), cpy(g);
    blk[0] = concat(range(0, plan.inputs), fresh(c, w - plan.inputs));
    for (std::size_t k = 1; k < g; ++k) {
      blk[k] = range(plan.block_input(k), w);
      cpy[k] = range(plan.block_copy(k), w);
    }
    const Wires sel = fresh(c, nb), t_in = fresh(c, nb), t_out = fresh(c, nb), dummy = fresh(c, 2 * nb);
    for (Wire s : sel) c.mixu({gate(Op::kX, {s})});
    // Selector 1: compare the block input with its copy; 0: the copy with the
    // previous block's output.
    for (std::size_t k = 1; k < g; ++k) selected_swap_test(c, sel[k - 1], true, t_in[k - 1], blk[k], cpy[k]);
    for (std::size_t k = 0; k < g; ++k) add_all(c, remap(plan.pieces[which][k], blk[k]));
    for (std::size_t k = 1; k < g; ++k) selected_swap_test(c, sel[k - 1], false, t_out[k - 1], cpy[k], blk[k - 1]);
    Wires outs;
    for (std::size_t k = 0; k < nb; ++k) {
      for (std::size_t j = 0; j < 2; ++j) {
        const Wire test = j == 0 ? t_in[k] : t_out[k];
        const Wire zero = dummy[2 * k + j];
        if (which == 0) outs.insert(outs.end(), {test, zero});
        else outs.insert(outs.end(), {zero, test});
      }
    }
    outs.insert(outs.end(), blk[g - 1].begin(), blk[g - 1].begin() + static_cast<std::ptrdiff_t>(plan.outputs));
    finish(c, outs, live_except(c, outs));
    return to_stinespring_form(c);
  };
  CircuitPair out{build(0), build(1), pair_report("ci2logdepth", q1, q2)};
  const double sz = static_cast<double>(std::max(size(q1), size(q2)));
  out.report.parameters = {{"pieces", static_cast<double>(g)},
                           {"gates_per_piece", static_cast<double>(gates_per_piece)},
                           {"block_width", static_cast<double>(w)},
                           {"tests", static_cast<double>(plan.tests())},
                           {"alpha", kLogDepthAlpha},
                           {"beta", kLogDepthBeta}};
  out.report.predicted.push_back({"C1(honest input)", "== |0...0><0...0| (x) Q1(rho)", std::nullopt, std::nullopt});
  out.report.predicted.push_back({"P(some test of a boundary fails)", ">= |U rho_prev U^* - rho_next|_1^2 / 128",
                                  std::nullopt, std::nullopt});
  out.report.predicted.push_back({"depth(Ci)", "<= alpha log2(size(Qi)) + beta", std::nullopt,
                                  kLogDepthAlpha * std::log2(std::max(sz, 2.0)) + kLogDepthBeta});
  return out;
}

Vector logdepth_honest_input(const LogDepthPlan& plan, std::size_t which, const Vector& psi) {
  if (which > 1) throw CircuitError("logdepth_honest_input: circuit index must be 0 or 1");
  if (static_cast<std::size_t>(psi.size()) != (std::size_t{1} << plan.inputs)) {
    throw CircuitError("logdepth_honest_input: state has the wrong dimension");
  }
  if (plan.input_qubits() > 24) throw ResourceCapError("logdepth_honest_input: state too large");
  Vector zero = Vector::Zero(static_cast<Idx>(std::size_t{1} << (plan.width - plan.inputs)));
  zero(0) = 1.0;
  Vector cur = kron_state(psi, zero);
  Vector out = psi;
  for (std::size_t k = 1; k < plan.pieces[which].size(); ++k) {
    cur = apply_unitary(plan.pieces[which][k - 1], range(0, plan.width), cur);
    out = kron_state(kron_state(out, cur), cur);
  }
  return out;
}

// ---------------------------------------------------------------- qcd

CircuitPair ci_to_qcd(const Circuit& q1, const Circuit& q2) {
  require_form(q1, "ci_to_qcd");
  require_form(q2, "ci_to_qcd");
  const auto [b1, b2] = paired_blocks(q1, q2);
  auto build = [&](bool flip) {
    Circuit c(1 + b1.inputs);
    const Wires wires = concat(range(1, b1.inputs), fresh(c, b1.width - b1.inputs));
    c.x(0);
    c.cu(0, remap(b1.body, wires));
    c.x(0);
    c.cu(0, remap(b2.body, wires));
    if (flip) c.z(0);
    Wires outs{0};
    outs.insert(outs.end(), wires.begin() + static_cast<std::ptrdiff_t>(b1.outputs), wires.end());
    finish(c, outs, Wires(wires.begin(), wires.begin() + static_cast<std::ptrdiff_t>(b1.outputs)));
    return c;
  };
  CircuitPair out{build(false), build(true), pair_report("ci2qcd", q1, q2)};
  out.report.parameters = {{"env_qubits", static_cast<double>(b1.width - b1.outputs)}};
  out.report.predicted.push_back({"diamond(C1,C2) / 2", "== Fmax(Q1,Q2)", 0.0, 1.0});
  add_notes(out.report, "q1", b1);
  add_notes(out.report, "q2", b2);
  return out;
}

// ------------------------------------------------------------- embeddings

Embedding degradable_embed(const Circuit& q) {
  const Block b = square_block(q);
  const std::size_t n = b.inputs, a = b.width - b.inputs;
  Circuit c(n);
  const Wire flag = c.ancilla(), copy = c.ancilla();
  const Wires anc = fresh(c, a);
  const Wires wires = concat(range(0, n), anc);
  c.h(flag);
  c.cnot(flag, copy);
  c.cu(flag, remap(b.body, wires));
  finish(c, concat(Wires{flag}, range(0, n)), concat(Wires{copy}, anc));

  // Flag 0 still holds the input: run the dilation and keep its environment.
  // Flag 1: the fresh ancillas already are the environment.
  Circuit d(1 + n);
  const Wires anc2 = fresh(d, a);
  d.x(0);
  d.cu(0, remap(b.body, concat(range(1, n), anc2)));
  finish(d, concat(Wires{0}, anc2), range(1, n));

  Channel map = to_channel(d);
  Embedding out{std::move(c), std::move(d), std::move(map), {}};
  out.report.kind = "degradable";
  out.report.inputs = {{"q", digest(q)}};
  out.report.artifacts = {"c", "degrader"};
  out.report.parameters = {{"qubits", static_cast<double>(n)}, {"env_qubits", static_cast<double>(a + 1)}};
  out.report.predicted.push_back({"choi(degrader o C - C^c)", "max entry < 1e-9", std::nullopt, 1e-9});
  out.report.predicted.push_back({"diamond(C1,C2)", "== diamond(Q1,Q2) / 2 for paired embeddings", std::nullopt, std::nullopt});
  add_notes(out.report, "q", b);
  return out;
}

Embedding antidegradable_embed(const Circuit& q) {
  const Block b = square_block(q);
  const std::size_t n = b.inputs, a = b.width - b.inputs;
  Circuit c(n);
  const Wire flag = c.ancilla(), copy = c.ancilla();
  const Wires anc = fresh(c, a), zero = fresh(c, n);
  c.h(flag);
  c.cnot(flag, copy);
  c.cu(flag, remap(b.body, concat(range(0, n), anc)));
  std::vector<Instruction> swaps;
  for (std::size_t k = 0; k < n; ++k) swaps.push_back(gate(Op::kSwap, {k, zero[k]}));
  c.x(flag);
  c.cu(flag, swaps);
  c.x(flag);
  finish(c, concat(Wires{flag}, range(0, n)), concat(concat(Wires{copy}, anc), zero));

  // Environment wires: copy flag, the dilation's ancilla block, the swapped
  // out input. Flag 0 means the input sits in the last block: run Q on it.
  // Flag 1: discard and swap in fresh zeros.
  Circuit d(1 + a + n);
  const Wires held = range(1 + a, n);
  const Wires anc2 = fresh(d, a), zero2 = fresh(d, n);
  d.x(0);
  d.cu(0, remap(b.body, concat(held, anc2)));
  std::vector<Instruction> swaps2;
  for (std::size_t k = 0; k < n; ++k) swaps2.push_back(gate(Op::kSwap, {held[k], zero2[k]}));
  d.x(0);
  d.cu(0, swaps2);
  d.x(0);
  const Wires outs = concat(Wires{0}, held);
  finish(d, outs, live_except(d, outs));

  Channel map = to_channel(d);
  Embedding out{std::move(c), std::move(d), std::move(map), {}};
  out.report.kind = "antidegradable";
  out.report.inputs = {{"q", digest(q)}};
  out.report.artifacts = {"c", "antidegrader"};
  out.report.parameters = {{"qubits", static_cast<double>(n)}, {"env_qubits", static_cast<double>(1 + a + n)}};
  out.report.predicted.push_back({"choi(antidegrader o C^c - C)", "max entry < 1e-9", std::nullopt, 1e-9});
  out.report.predicted.push_back({"diamond(C1,C2)", "== diamond(Q1,Q2) / 2 for paired embeddings", std::nullopt, std::nullopt});
  add_notes(out.report, "q", b);
  return out;
}

// ---------------------------------------------------------- mixed unitary

ChannelApprox mixed_unitary_approx(const Channel& phi, std::size_t anc_extra_qubits) {
  if (!phi.stinespring()) throw ChannelError("mixed_unitary_approx: missing Stinespring rep");
  const StinespringRep& rep = *phi.stinespring();
  const std::size_t extra = std::size_t{1} << anc_extra_qubits;
  const std::size_t dh = phi.in_dim(), dk = phi.out_dim();
  const std::size_t da = rep.anc_dim() * extra, db = rep.env_dim() * extra, d = da * dh;
  if (da < 2) throw ChannelError("mixed_unitary_approx: ancilla space needs dimension at least 2");
  if (d > kMaxApproxDim) throw ResourceCapError("mixed_unitary_approx: total dimension " + std::to_string(d) + " exceeds cap");
  const Idx D = static_cast<Idx>(d);

  // A (x) H -> H (x) A, then the dilation padded by the unused extra qubits.
  Matrix perm = Matrix::Zero(D, D);
  for (std::size_t x = 0; x < da; ++x) {
    for (std::size_t h = 0; h < dh; ++h) perm(static_cast<Idx>(h * da + x), static_cast<Idx>(x * dh + h)) = 1.0;
  }
  const Idx e = static_cast<Idx>(extra);
  const Matrix dil = kron(rep.unitary, Matrix::Identity(e, e)) * perm;

  MixedUnitaryRep mu;
  Matrix flip = Matrix::Identity(D, D);
  for (Idx i = static_cast<Idx>(dh); i < D; ++i) flip(i, i) = -1.0;
  mu.stages.push_back({{0.5, 0.5}, {Matrix::Identity(D, D), flip}});

  const std::size_t dperp = d - dh;
  MixedUnitaryStage mix;
  for (std::size_t x = 0; x < dperp; ++x) {
    for (std::size_t z = 0; z < dperp; ++z) {
      Matrix u = Matrix::Identity(D, D);
      u.bottomRightCorner(static_cast<Idx>(dperp), static_cast<Idx>(dperp)) = weyl(dperp, x, z);
      mix.unitaries.push_back(std::move(u));
      mix.probabilities.push_back(1.0 / static_cast<double>(dperp * dperp));
    }
  }
  mu.stages.push_back(std::move(mix));
  mu.stages.push_back({{1.0}, {dil}});

  MixedUnitaryStage noise;
  const Idx K = static_cast<Idx>(dk);
  for (std::size_t x = 0; x < db; ++x) {
    for (std::size_t z = 0; z < db; ++z) {
      noise.unitaries.push_back(kron(Matrix::Identity(K, K), weyl(db, x, z)));
      noise.probabilities.push_back(1.0 / static_cast<double>(db * db));
    }
  }
  mu.stages.push_back(std::move(noise));

  ChannelApprox out{Channel::from_mixed_unitary(std::move(mu), Dims{da, dh}, Dims{dk, db}), {}};
  auto& r = out.report;
  r.kind = "mixed-unitary";
  r.artifacts = {"channel"};
  r.parameters = {{"anc_dim", static_cast<double>(da)},
                  {"env_dim", static_cast<double>(db)},
                  {"in_dim", static_cast<double>(dh)},
                  {"out_dim", static_cast<double>(dk)},
                  {"anc_extra_qubits", static_cast<double>(anc_extra_qubits)}};
  const double dad = static_cast<double>(da), dbd = static_cast<double>(db);
  r.predicted.push_back({"Phi'(|0><0| (x) sigma)", "== Phi(sigma) (x) I/dim B", std::nullopt, std::nullopt});
  r.predicted.push_back({"|Phi'(rho) - I/dim(K B)|_1 for rho on S0-perp", "<= 2/dim A", std::nullopt, 2.0 / dad});
  r.predicted.push_back({"Smin(Phi') - log dim B", "in [Smin(Phi) - 1/dim A, Smin(Phi)]", -1.0 / dad, 0.0});
  r.predicted.push_back({"nu_p(Phi') / |I/dim B|_p", "in [nu_p(Phi), nu_p(Phi) + 2 dim B/dim A]", 0.0, 2.0 * dbd / dad});
  r.notes.push_back("offsets are relative to the original channel's value");
  return out;
}

CircuitResult mixed_unitary_circuit(const Circuit& q, std::size_t anc_extra) {
  require_form(q, "mixed_unitary_circuit");
  const NormalForm nf = normal_form_parts(q);
  const std::size_t n = nf.inputs.size(), m0 = nf.ancillas.size(), m = m0 + anc_extra;
  Circuit c(m + n);
  std::map<Wire, Wire> pos;
  for (std::size_t k = 0; k < n; ++k) pos[nf.inputs[k]] = m + k;
  for (std::size_t j = 0; j < m0; ++j) pos[nf.ancillas[j]] = j;
  const Wires anc = range(0, m), all = range(0, m + n);

  for (Wire a : anc) c.mixu({gate(Op::kZ, {a})});
  for (Wire j : anc) {
    for (Wire w : all) {
      if (w != j) c.cdepol(j, w);
    }
    for (Wire a : anc) {
      if (a != j) c.cdepol(a, j);
    }
  }
  for (const auto& g : nf.unitary) c.add(remap(g, pos));
  Wires outs, env;
  for (Wire w : nf.outputs) outs.push_back(pos.at(w));
  for (Wire w : nf.env) env.push_back(pos.at(w));
  for (std::size_t j = m0; j < m; ++j) env.push_back(j);
  for (Wire b : env) {
    c.mixu({gate(Op::kZ, {b})});
    c.mixu({gate(Op::kX, {b})});
  }
  finish(c, concat(outs, env), {});

  CircuitResult out{std::move(c), {}};
  auto& r = out.report;
  r.kind = "mixed-unitary";
  r.inputs = {{"q", digest(q)}};
  r.artifacts = {"c"};
  const double eps = std::ldexp(1.0, -(static_cast<int>(m) - 3));
  r.parameters = {{"m", static_cast<double>(m)}, {"anc_extra", static_cast<double>(anc_extra)}, {"epsilon", eps}};
  r.predicted.push_back({"C(|0><0| (x) sigma)", "== Q(sigma) (x) I/dim B", std::nullopt, std::nullopt});
  r.predicted.push_back({"|C(|k><k| (x) rho) - I (x) tr_H rho / dim|_1, k != 0", "<= 2^-(m-1)", std::nullopt,
                         std::ldexp(1.0, -(static_cast<int>(m) - 1))});
  r.predicted.push_back({"diamond(C1,C2)", "in [diamond(Q1,Q2), diamond(Q1,Q2) + epsilon], epsilon = 2^-(m-3)", 0.0, eps});
  if (anc_extra) r.notes.push_back("ancilla space padded with " + std::to_string(anc_extra) + " qubits");
  return out;
}

}  // namespace qchan

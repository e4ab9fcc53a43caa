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

#include "qchan/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>

#include "qchan/measures.hpp"
#include "qchan/protocol.hpp"
#include "qchan/random.hpp"
#include "qchan/reductions.hpp"

namespace qchan {

namespace {

using Idx = Eigen::Index;

struct Checks {
  std::vector<PropertyCheck> list;

  void at_most(std::string name, double value, double bound) {
    list.push_back({std::move(name), value, "<=", bound, value <= bound});
  }
  void at_least(std::string name, double value, double bound) {
    list.push_back({std::move(name), value, ">=", bound, value >= bound});
  }
};

OptimizerConfig config(std::uint64_t seed, std::size_t restarts = 20) {
  OptimizerConfig cfg;
  cfg.seed = seed;
  cfg.restarts = restarts;
  return cfg;
}

Matrix eye(std::size_t d) { return Matrix::Identity(static_cast<Idx>(d), static_cast<Idx>(d)); }

Matrix pure(const Vector& v) { return v * v.adjoint(); }

// Qubit in, qubit out, one ancilla, a few random gates.
Circuit random_qubit_circuit(Rng& rng) {
  Circuit c(1);
  const Wire a = c.ancilla();
  const Wire wires[] = {0, a};
  for (int k = 0; k < 8; ++k) {
    const auto pick = static_cast<int>(rng.uniform() * 5.0);
    const Wire w = wires[rng.uniform() < 0.5 ? 0 : 1];
    switch (pick) {
      case 0: c.h(w); break;
      case 1: c.t(w); break;
      case 2: c.cnot(w, w == 0 ? a : 0); break;
      case 3: c.x(w); break;
      default: c.cu(w == 0 ? a : 0, {gate(Op::kH, {w})}); break;
    }
  }
  c.traceout(rng.uniform() < 0.5 ? Wire{0} : a);
  return c;
}

Circuit single(std::string_view ops) {
  Circuit c(1);
  for (char ch : ops) {
    if (ch == 'h') c.h(0);
    if (ch == 't') c.t(0);
  }
  return c;
}

Matrix t_matrix() {
  Matrix m = eye(2);
  m(1, 1) = std::polar(1.0, std::numbers::pi / 4.0);
  return m;
}

Channel random_channel(std::size_t din, std::size_t dout, std::size_t env, Rng& rng) {
  const Matrix u = random_unitary(dout * env, rng);
  std::vector<Matrix> kraus;
  for (std::size_t e = 0; e < env; ++e) {
    Matrix a(static_cast<Idx>(dout), static_cast<Idx>(din));
    for (Idx o = 0; o < a.rows(); ++o) {
      for (Idx i = 0; i < a.cols(); ++i) a(o, i) = u(o * static_cast<Idx>(env) + static_cast<Idx>(e), i);
    }
    kraus.push_back(a);
  }
  return Channel::from_kraus(kraus, Dims{din}, Dims{dout});
}

void weyl_suite(Checks& c, Rng& rng) {
  for (std::size_t d = 2; d <= 5; ++d) {
    double err = 0.0, unitarity = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        const Matrix w = weyl_operator(d, a, b).mat();
        unitarity = std::max(unitarity, max_abs(Matrix(w.adjoint() * w - eye(d))));
      }
    }
    for (int k = 0; k < 50; ++k) {
      const Matrix rho = random_density(d, rng);
      Matrix sum = Matrix::Zero(static_cast<Idx>(d), static_cast<Idx>(d));
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
          const Matrix w = weyl_operator(d, a, b).mat();
          sum += w * rho * w.adjoint();
        }
      }
      err = std::max(err, max_abs(Matrix(sum / static_cast<double>(d * d) - eye(d) / static_cast<double>(d))));
    }
    c.at_most("weyl unitarity d=" + std::to_string(d), unitarity, 1e-10);
    c.at_most("weyl mixture depolarizes d=" + std::to_string(d), err, 1e-10);
  }
  for (std::size_t d = 2; d <= 4; ++d) {
    double err = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        Matrix e = Matrix::Zero(static_cast<Idx>(d), static_cast<Idx>(d));
        e(static_cast<Idx>(i), static_cast<Idx>(j)) = 1.0;
        Matrix sum = Matrix::Zero(static_cast<Idx>(d), static_cast<Idx>(d));
        for (std::size_t b = 0; b < d; ++b) {
          const Matrix z = weyl_operator(d, 0, b).mat();
          sum += z * e * z.adjoint();
        }
        const Matrix want = i == j ? e : Matrix::Zero(static_cast<Idx>(d), static_cast<Idx>(d));
        err = std::max(err, max_abs(Matrix(sum / static_cast<double>(d) - want)));
        err = std::max(err, max_abs(Matrix(dephasing_channel(d).apply(e) - want)));
      }
    }
    c.at_most("dephasing keeps only diagonal units d=" + std::to_string(d), err, 1e-10);
  }
}

void fvdg_suite(Checks& c, Rng& rng) {
  double lower = kInfinity, upper = kInfinity;
  for (int k = 0; k < 500; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform() * 5.0);
    const Matrix rho = random_density(d, rng), sigma = random_density(d, rng);
    const double f = fidelity(rho, sigma), t = 0.5 * trace_norm(Matrix(rho - sigma));
    lower = std::min(lower, t - (1.0 - f));
    upper = std::min(upper, std::sqrt(std::max(0.0, 1.0 - f * f)) - t);
  }
  c.at_least("1 - F <= T slack over 500 pairs", lower, -1e-9);
  c.at_least("T <= sqrt(1 - F^2) slack over 500 pairs", upper, -1e-9);
  double helstrom_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t d = k % 2 == 0 ? 2 : 3;
    const Matrix rho = random_density(d, rng), sigma = random_density(d, rng);
    const HelstromResult h = helstrom(rho, sigma);
    const double direct = 0.5 * (h.accept_first * rho).trace().real() + 0.5 * (h.accept_second * sigma).trace().real();
    helstrom_err = std::max(helstrom_err, std::abs(direct - (0.5 + 0.25 * trace_norm(Matrix(rho - sigma)))));
  }
  c.at_most("helstrom success == 1/2 + |rho - sigma|_1 / 4", helstrom_err, 1e-10);
}

void monotonicity_suite(Checks& c, Rng& rng) {
  double trace_gain = -kInfinity, fidelity_loss = -kInfinity;
  for (int k = 0; k < 100; ++k) {
    const std::size_t din = 2 + static_cast<std::size_t>(rng.uniform() * 2.0);
    const std::size_t dout = 2 + static_cast<std::size_t>(rng.uniform() * 2.0);
    const Channel phi = random_channel(din, dout, 2, rng);
    const Matrix rho = random_density(din, rng), sigma = random_density(din, rng);
    trace_gain = std::max(trace_gain, trace_norm(Matrix(phi.apply(rho) - phi.apply(sigma))) - trace_norm(Matrix(rho - sigma)));
    fidelity_loss = std::max(fidelity_loss, fidelity(rho, sigma) - fidelity(phi.apply(rho), phi.apply(sigma)));
  }
  c.at_most("trace distance never grows under a channel", trace_gain, 1e-9);
  c.at_most("fidelity never drops under a channel", fidelity_loss, 1e-9);
}

void multiplicativity_suite(Checks& c, Rng& rng, std::uint64_t seed) {
  double err = 0.0;
  for (double p : {1.0, 2.0, 3.0, kInfinity}) {
    for (int k = 0; k < 10; ++k) {
      const Matrix a = random_matrix(2, 3, rng), b = random_matrix(3, 2, rng);
      const double lhs = schatten_norm(kron(a, b), p), rhs = schatten_norm(a, p) * schatten_norm(b, p);
      err = std::max(err, std::abs(lhs - rhs) / rhs);
    }
  }
  c.at_most("schatten norms multiply over tensor products (relative)", err, 1e-10);
  double fmax_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Channel a1 = random_channel(2, 2, 2, rng), a2 = random_channel(2, 2, 2, rng);
    const Channel b1 = random_channel(2, 2, 2, rng), b2 = random_channel(2, 2, 2, rng);
    const double fa = max_output_fidelity(a1, a2, config(seed + 10 + k)).value;
    const double fb = max_output_fidelity(b1, b2, config(seed + 20 + k)).value;
    const double fab = max_output_fidelity(tensor_channels(a1, b1), tensor_channels(a2, b2), config(seed + 30 + k, 8)).value;
    fmax_err = std::max(fmax_err, std::abs(fab - fa * fb));
  }
  c.at_most("Fmax multiplies over tensor products", fmax_err, 2e-3);
  double dmult = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Matrix u = random_unitary(2, rng), v = random_unitary(2, rng);
    const double one = diamond_unitary_oracle(u, v);
    const double est = diamond_distance(Channel::unitary(u, Dims{2}), Channel::unitary(v, Dims{2}), config(seed + 40 + k)).value;
    dmult = std::max(dmult, std::abs(est - one));
  }
  c.at_most("diamond seesaw matches the unitary closed form", dmult, 1e-6);
}

void swap_suite(Checks& c, Rng& rng) {
  const Circuit st = swap_test_circuit(1);
  const Channel ch = to_channel(st);
  double err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector a = random_unit_vector(2, rng), b = random_unit_vector(2, rng);
    Matrix zero = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    const Matrix out = ch.apply(kron(kron(zero, pure(a)), pure(b)));
    const std::vector<std::size_t> keep{0};
    const Matrix ctrl = partial_trace(out, Dims{2, 2, 2}, keep);
    err = std::max(err, std::abs(ctrl(1, 1).real() - 0.5 * (1.0 - std::norm(a.dot(b)))));
  }
  c.at_most("swap test rejects with (1 - |<a|b>|^2) / 2", err, 1e-10);
}

void ci2qcd_suite(Checks& c, Rng& rng, std::uint64_t seed) {
  double err = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Circuit q1 = random_qubit_circuit(rng), q2 = random_qubit_circuit(rng);
    const auto pair = ci_to_qcd(to_stinespring_form(q1), to_stinespring_form(q2));
    const double d = diamond_distance(to_channel(pair.first), to_channel(pair.second), config(seed + 100 + k)).value;
    const double f = max_output_fidelity(to_channel(q1), to_channel(q2), config(seed + 200 + k)).value;
    err = std::max(err, std::abs(0.5 * d - f));
  }
  c.at_most("diamond(C1,C2)/2 == Fmax(Q1,Q2)", err, 5e-3);
}

void embedding_suite(Checks& c, Rng& rng, std::uint64_t seed, bool anti) {
  double residual = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Circuit q = random_qubit_circuit(rng);
    const Embedding e = anti ? antidegradable_embed(q) : degradable_embed(q);
    const Channel ch = to_stinespring_channel(e.circuit);
    const auto check = anti ? verify_degrading(e.map, complement(ch), 1e-9) : verify_degrading(e.map, ch, 1e-9);
    residual = std::max(residual, check.residual);
  }
  c.at_most(anti ? "antidegrader o complement == channel" : "degrader o channel == complement", residual, 1e-9);
  const double delta = diamond_unitary_oracle(eye(2), t_matrix());
  auto embed = [anti](const Circuit& q) { return anti ? antidegradable_embed(q).circuit : degradable_embed(q).circuit; };
  const double d = diamond_distance(to_channel(embed(single(""))), to_channel(embed(single("t"))), config(seed + 300)).value;
  c.at_most("embedded distance == half the original (I vs T)", std::abs(d - delta / 2.0), 2e-3);
}

void mixed_unitary_suite(Checks& c, Rng& rng) {
  const Channel phi = dilate(random_channel(2, 2, 2, rng));
  const ChannelApprox approx = mixed_unitary_approx(phi, 1);
  const auto da = static_cast<std::size_t>(approx.report.parameter("anc_dim"));
  const auto db = static_cast<std::size_t>(approx.report.parameter("env_dim"));
  double sim = 0.0, mixing = 0.0;
  Matrix zero = Matrix::Zero(static_cast<Idx>(da), static_cast<Idx>(da));
  zero(0, 0) = 1.0;
  for (int k = 0; k < 5; ++k) {
    const Matrix sigma = random_density(2, rng);
    sim = std::max(sim, max_abs(Matrix(approx.channel.apply(kron(zero, sigma)) - kron(phi.apply(sigma), eye(db) / static_cast<double>(db)))));
    Matrix rho = random_density(2 * da, rng);
    rho.topRows(2).setZero();
    rho.leftCols(2).setZero();
    rho /= rho.trace().real();
    mixing = std::max(mixing, trace_norm(Matrix(approx.channel.apply(rho) - eye(2 * da) / static_cast<double>(2 * da))));
  }
  c.at_most("exact simulation on |0>_A (x) H", sim, 1e-9);
  c.at_most("off-subspace inputs land within 2/dim A of flat", mixing, 2.0 / static_cast<double>(da));
  c.at_most("approximation is a channel", cptp_residual(approx.channel), 1e-9);
}

void polarize_suite(Checks& c, std::uint64_t seed) {
  const auto p = polarize_parameters(1, 1.0, 0.25);
  c.at_most("(n,a,b)=(1,1,1/4) gives r=4", std::abs(static_cast<double>(p.r) - 4.0), 0.0);
  c.at_most("(n,a,b)=(1,1,1/4) gives s=1024", std::abs(static_cast<double>(p.s) - 1024.0), 0.0);
  c.at_most("(n,a,b)=(1,1,1/4) gives t=1", std::abs(static_cast<double>(p.t) - 1.0), 0.0);
  const double delta = diamond_unitary_oracle(eye(2), t_matrix());
  const auto x = xor_mix(single(""), single("t"), 2);
  const double dx = diamond_distance(to_channel(x.first), to_channel(x.second), config(seed + 400)).value;
  c.at_most("xor of two slots == 2 (delta/2)^2", std::abs(dx - xor_mix_distance(delta, 2)), 2e-3);
  const auto pr = direct_product(single(""), single("t"), 2);
  const double dp = diamond_distance(to_channel(pr.first), to_channel(pr.second), config(seed + 401)).value;
  const auto [lo, hi] = direct_product_bracket(delta, 2);
  c.at_least("two copies beat the lower bracket", dp - lo, 0.0);
  c.at_least("two copies stay under the upper bracket", hi - dp, -1e-9);
}

void protocol_suite(Checks& c, Rng& rng, std::uint64_t seed) {
  double identity = 0.0, dominance = -kInfinity;
  for (int k = 0; k < 5; ++k) {
    const Circuit q1 = random_qubit_circuit(rng), q2 = random_qubit_circuit(rng);
    const auto honest = run_qcd_protocol(q1, q2, ProverSpec{}, config(seed + 500 + k));
    identity = std::max(identity, std::abs(honest.acceptance - (0.5 + 0.25 * honest.distance)));
    ProverSpec grid;
    grid.kind = ProverStrategy::kGrid;
    grid.resolution = 8;
    const auto g = run_qcd_protocol(q1, q2, grid, config(seed + 500 + k));
    dominance = std::max(dominance, g.acceptance - honest.acceptance);
  }
  c.at_most("honest acceptance == 1/2 + d/4", identity, 1e-9);
  c.at_most("grid prover never beats the honest one", dominance, 2e-3);
}

using Runner = std::function<void(Checks&, Rng&, std::uint64_t)>;

const std::map<std::string, Runner, std::less<>>& runners() {
  static const std::map<std::string, Runner, std::less<>> table{
      {"weyl", [](Checks& c, Rng& r, std::uint64_t) { weyl_suite(c, r); }},
      {"fvdg", [](Checks& c, Rng& r, std::uint64_t) { fvdg_suite(c, r); }},
      {"monotonicity", [](Checks& c, Rng& r, std::uint64_t) { monotonicity_suite(c, r); }},
      {"multiplicativity", multiplicativity_suite},
      {"swap", [](Checks& c, Rng& r, std::uint64_t) { swap_suite(c, r); }},
      {"ci2qcd", ci2qcd_suite},
      {"degradable", [](Checks& c, Rng& r, std::uint64_t s) { embedding_suite(c, r, s, false); }},
      {"antidegradable", [](Checks& c, Rng& r, std::uint64_t s) { embedding_suite(c, r, s, true); }},
      {"mixed-unitary", [](Checks& c, Rng& r, std::uint64_t) { mixed_unitary_suite(c, r); }},
      {"polarize", [](Checks& c, Rng&, std::uint64_t s) { polarize_suite(c, s); }},
      {"protocol", protocol_suite},
  };
  return table;
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& p) { return p.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"weyl",       "fvdg",           "monotonicity",  "multiplicativity",
                                              "swap",       "ci2qcd",         "degradable",    "antidegradable",
                                              "mixed-unitary", "polarize",    "protocol"};
  return names;
}

SuiteResult run_suite(std::string_view name, std::uint64_t seed) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw std::invalid_argument("unknown suite: " + std::string(name));
  Checks checks;
  Rng rng(mix_seed(seed, 0x7375697465ULL));
  it->second(checks, rng, seed);
  return {std::string(name), seed, std::move(checks.list)};
}

}  // namespace qchan

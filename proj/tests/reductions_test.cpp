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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "qchan/measures.hpp"
#include "test_util.hpp"

namespace qchan {
namespace {

using Idx = Eigen::Index;
using testing::failure_probability;
using testing::fmax_grid_qubit;
using testing::half;
using testing::ket0;
using testing::kron_power;
using testing::word;
using testing::word_matrix;
using testing::kron_state;
using testing::pure_output;
using testing::random_circuit;
using testing::random_qubit_channel;

OptimizerConfig config(std::uint64_t seed, std::size_t restarts = 20) {
  OptimizerConfig cfg;
  cfg.seed = seed;
  cfg.restarts = restarts;
  return cfg;
}

// Constant channel onto |bit>.
Circuit constant_circuit(bool bit) {
  Circuit c(1);
  const Wire a = c.ancilla();
  if (bit) c.x(a);
  c.traceout(0);
  return to_stinespring_form(c);
}

Circuit random_form(std::size_t inputs, std::size_t count, Rng& rng, std::size_t max_live = 3) {
  return to_stinespring_form(random_circuit(inputs, count, rng, false, max_live));
}

// ---------------------------------------------------------------- digest

TEST(Digest, StableAndDistinct) {
  const std::string a = digest(word("ht"));
  EXPECT_EQ(a.size(), 16u);
  EXPECT_EQ(a, digest(word("ht")));
  EXPECT_NE(a, digest(word("th")));
  EXPECT_EQ(a.find_first_not_of("0123456789abcdef"), std::string::npos);
}

// ------------------------------------------------------------ product/xor

TEST(Product, SingleCopyAndIdenticalInputs) {
  Rng rng(101);
  const Circuit q1 = random_form(1, 8, rng, 2), q2 = random_form(1, 8, rng, 2);
  const auto one = direct_product(q1, q2, 1);
  EXPECT_LT(choi_distance(to_channel(one.first), to_channel(q1)), 1e-10);
  EXPECT_LT(choi_distance(to_channel(one.second), to_channel(q2)), 1e-10);
  const auto same = direct_product(q1, q1, 2);
  EXPECT_EQ(same.first, same.second);
  EXPECT_EQ(same.first.num_inputs(), 2 * q1.num_inputs());
  EXPECT_THROW(direct_product(q1, q2, 0), CircuitError);
}

TEST(Product, BracketOnUnitaryPairs) {
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{{"", "t"}, {"h", "th"}}) {
    const double delta = diamond_unitary_oracle(word_matrix(a), word_matrix(b));
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto pair = direct_product(word(a), word(b), k);
      const double exact = diamond_unitary_oracle(kron_power(word_matrix(a), k), kron_power(word_matrix(b), k));
      const double est = diamond_distance(to_channel(pair.first), to_channel(pair.second), config(200 + k)).value;
      EXPECT_NEAR(est, exact, 2e-3) << a << "/" << b << " k=" << k;
      const auto [lo, hi] = direct_product_bracket(delta, k);
      EXPECT_GT(est, lo - 1e-9);
      EXPECT_LE(est, hi + 1e-9);
    }
  }
}

TEST(Xor, SingleSlotKeepsInputs) {
  Rng rng(102);
  const Circuit q1 = random_qubit_channel(rng), q2 = random_qubit_channel(rng);
  const auto one = xor_mix(q1, q2, 1);
  EXPECT_LT(choi_distance(to_channel(one.first), to_channel(q1)), 1e-10);
  EXPECT_LT(choi_distance(to_channel(one.second), to_channel(q2)), 1e-10);
  const auto same = xor_mix(q1, q1, 2);
  EXPECT_LT(choi_distance(to_channel(same.first), to_channel(same.second)), 1e-10);
  EXPECT_THROW(xor_mix(q1, q2, 0), CircuitError);
}

TEST(Xor, ExactShrinkLaw) {
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{{"", "t"}, {"", "h"}, {"h", "th"}}) {
    const double delta = diamond_unitary_oracle(word_matrix(a), word_matrix(b));
    for (std::size_t r = 1; r <= 3; ++r) {
      const auto pair = xor_mix(word(a), word(b), r);
      const double est = diamond_distance(to_channel(pair.first), to_channel(pair.second), config(300 + r)).value;
      EXPECT_NEAR(est, 2.0 * std::pow(delta / 2.0, static_cast<double>(r)), 2e-3) << a << "/" << b << " r=" << r;
      EXPECT_NEAR(xor_mix_distance(delta, r), 2.0 * std::pow(delta / 2.0, static_cast<double>(r)), 1e-15);
    }
  }
}

TEST(Xor, PadsMismatchedShapes) {
  Circuit wide(2);
  wide.cnot(0, 1);
  const auto pair = xor_mix(word("h"), wide, 2);
  EXPECT_EQ(pair.first.num_inputs(), pair.second.num_inputs());
  EXPECT_EQ(pair.first.num_outputs(), pair.second.num_outputs());
  EXPECT_FALSE(pair.report.notes.empty());
}

TEST(Polarize, Parameters) {
  const auto p = polarize_parameters(1, 1.0, 0.25);
  EXPECT_EQ(p.r, 4u);
  EXPECT_EQ(p.s, 1024u);
  EXPECT_EQ(p.t, 1u);
  const auto q = polarize_parameters(3, 1.5, 0.5);
  EXPECT_EQ(q.r, 5u);
  EXPECT_EQ(q.s, 256u);
  EXPECT_EQ(q.t, 2u);
  EXPECT_THROW(polarize_parameters(1, 0.5, 0.6), CircuitError);
  EXPECT_THROW(polarize_parameters(1, 1.0, 0.5), CircuitError);
  EXPECT_THROW(polarize_parameters(1, 2.0, 0.1), CircuitError);
  EXPECT_THROW(polarize_parameters(0, 1.0, 0.25), CircuitError);
}

TEST(Polarize, BuildsAndCaps) {
  const auto pair = polarize(word(""), word("t"), 1, 1.0, 0.25);
  EXPECT_EQ(pair.first.num_inputs(), 4u * 1024u);
  EXPECT_EQ(pair.first.num_outputs(), 4u * 1024u);
  EXPECT_EQ(pair.report.parameter("s"), 1024.0);
  EXPECT_THROW(polarize(word(""), word("t"), 40, 1.0, 0.4), ResourceCapError);
}

// ----------------------------------------------------------- close images

Circuit two_wire(std::string_view ops) {
  Circuit c(2);
  for (char ch : ops) {
    if (ch == 'c') c.cnot(1, 0);
    if (ch == 'h') c.h(1);
    if (ch == 't') c.t(1);
    if (ch == 'x') c.x(0);
  }
  return c;
}

TEST(CloseImages, Examples) {
  const VerifierSpaces spaces{{0}, {1}};
  const auto accept = qip_to_close_images(two_wire(""), two_wire("x"), spaces);
  EXPECT_NEAR(max_output_fidelity(to_channel(accept.first), to_channel(accept.second), config(1)).value, 1.0, 1e-9);
  const auto reject = qip_to_close_images(two_wire(""), two_wire(""), spaces);
  EXPECT_NEAR(max_output_fidelity(to_channel(reject.first), to_channel(reject.second), config(2)).value, 0.0, 1e-9);
}

TEST(CloseImages, MatchesHandBuiltChannels) {
  Rng rng(103);
  const Circuit v1 = random_circuit(3, 12, rng, true), v2 = random_circuit(3, 12, rng, true);
  const auto pair = qip_to_close_images(v1, v2, VerifierSpaces{{0, 2}, {1}});
  const Matrix u1 = unitary_matrix(v1.instructions(), {0, 1, 2});
  const Matrix u2 = unitary_matrix(v2.instructions(), {0, 1, 2});
  const Channel c1 = to_channel(pair.first), c2 = to_channel(pair.second);
  ASSERT_EQ(c1.in_dim(), 4u);
  ASSERT_EQ(c2.in_dim(), 4u);
  const std::size_t keep[] = {0, 2};
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix rho = random_density(2, rng), tau = random_density(2, rng);
    const Matrix one = testing::basis_op(2, 1, 1);
    const Matrix want1 = partial_trace(u1 * kron(kron(ket0(2), rho), ket0(2)) * u1.adjoint(), Dims{2, 2, 2}, keep);
    EXPECT_LT(max_abs(c1.apply(kron(rho, tau)) - want1), 1e-10);
    const Matrix want2 = partial_trace(u2.adjoint() * kron(kron(one, rho), tau) * u2, Dims{2, 2, 2}, keep);
    EXPECT_LT(max_abs(c2.apply(kron(tau, rho)) - want2), 1e-10);
  }
}

TEST(CloseImages, RandomAgainstGrid) {
  Rng rng(104);
  for (int trial = 0; trial < 5; ++trial) {
    const Circuit v1 = random_circuit(2, 10, rng, true), v2 = random_circuit(2, 10, rng, true);
    const auto pair = qip_to_close_images(v1, v2, VerifierSpaces{{0}, {1}});
    const Channel c1 = to_channel(pair.first), c2 = to_channel(pair.second);
    const double est = max_output_fidelity(c1, c2, config(400 + trial)).value;
    EXPECT_NEAR(est * est, std::pow(fmax_grid_qubit(c1, c2), 2), 5e-3);
  }
}

TEST(CloseImages, Errors) {
  Circuit noisy(2);
  noisy.measure(0);
  const VerifierSpaces spaces{{0}, {1}};
  EXPECT_THROW(qip_to_close_images(noisy, two_wire(""), spaces), CircuitError);
  EXPECT_THROW(qip_to_close_images(two_wire(""), two_wire(""), VerifierSpaces{{0}, {0}}), CircuitError);
  EXPECT_THROW(qip_to_close_images(two_wire(""), two_wire(""), VerifierSpaces{{0}, {2}}), CircuitError);
  EXPECT_THROW(qip_to_close_images(two_wire(""), two_wire(""), VerifierSpaces{{}, {0, 1}}), CircuitError);
}

// --------------------------------------------------------------- log depth

// Splits into two pieces, so one boundary and two tests.
TEST(LogDepth, RequiresNormalForm) {
  Circuit c(1);
  c.measure(0);
  EXPECT_THROW(ci_to_logdepth(c, c), CircuitError);
  EXPECT_THROW(plan_logdepth(word("h"), word("h"), 0), CircuitError);
}

TEST(LogDepth, HonestInputSimulates) {
  Rng rng(105);
  for (int trial = 0; trial < 3; ++trial) {
    const Circuit q1 = random_qubit_channel(rng, 6), q2 = random_qubit_channel(rng, 6);
    const std::size_t per = half(q1, q2);
    const LogDepthPlan plan = plan_logdepth(q1, q2, per);
    ASSERT_EQ(plan.boundaries(), 1u);
    const auto pair = ci_to_logdepth(q1, q2, per);
    ASSERT_TRUE(in_stinespring_form(pair.first));
    const Vector psi = random_unit_vector(std::size_t{1} << plan.inputs, rng);
    const Matrix rho = psi * psi.adjoint();
    const std::array<const Circuit*, 2> qs{&q1, &q2};
    const std::array<const Circuit*, 2> cs{&pair.first, &pair.second};
    for (std::size_t which = 0; which < 2; ++which) {
      const Matrix out = pure_output(*cs[which], logdepth_honest_input(plan, which, psi));
      // The padded block may carry extra |0> outputs after the real ones.
      const Channel q = to_channel(*qs[which]);
      const std::size_t pad = std::size_t{1} << (plan.outputs - qs[which]->num_outputs());
      const Matrix want = kron(kron(ket0(std::size_t{1} << (2 * plan.tests())), q.apply(rho)), ket0(pad));
      EXPECT_LT(max_abs(out - want), 1e-9) << "trial " << trial << " circuit " << which;
    }
  }
}

TEST(LogDepth, MismatchIsDetected) {
  Rng rng(106);
  for (int trial = 0; trial < 4; ++trial) {
    const Circuit q1 = random_qubit_channel(rng, 6), q2 = random_qubit_channel(rng, 6);
    const std::size_t per = half(q1, q2);
    const LogDepthPlan plan = plan_logdepth(q1, q2, per);
    const std::size_t which = trial % 2;
    const std::size_t dw = std::size_t{1} << plan.width;
    const Vector psi = random_unit_vector(std::size_t{1} << plan.inputs, rng);
    Vector start = Vector::Zero(static_cast<Idx>(dw));
    for (Idx i = 0; i < psi.size(); ++i) start(i << (plan.width - plan.inputs)) = psi(i);
    std::vector<Wire> wires(plan.width);
    std::iota(wires.begin(), wires.end(), Wire{0});
    const Vector next = apply_unitary(plan.pieces[which][0], wires, start);
    // Even trials keep the copy equal to the block input; odd ones do not.
    const Vector block = random_unit_vector(dw, rng);
    const Vector copy = trial < 2 ? block : random_unit_vector(dw, rng);
    const Vector input = kron_state(kron_state(psi, block), copy);
    const auto pair = ci_to_logdepth(q1, q2, per);
    const Matrix out = pure_output(which == 0 ? pair.first : pair.second, input);
    const double t = trace_norm(Matrix(next * next.adjoint() - block * block.adjoint()));
    const double fail = failure_probability(out, plan.tests(), which);
    EXPECT_GE(fail, t * t / 128.0 - 1e-12) << "trial " << trial;
    EXPECT_GT(fail, 0.0);
  }
}

TEST(LogDepth, DepthIsLogarithmic) {
  Rng rng(107);
  for (std::size_t target : {4u, 8u, 16u}) {
    // Narrow circuits have size = gate count; wide ones size = width.
    for (std::size_t inputs : {std::size_t{2}, target / 2, target}) {
      const std::size_t gates = inputs == target ? target / 2 : target;
      const Circuit q1 = random_circuit(inputs, gates, rng, true), q2 = random_circuit(inputs, gates, rng, true);
      ASSERT_EQ(std::max(size(q1), size(q2)), target);
      const auto pair = ci_to_logdepth(q1, q2);
      const double bound = pair.report.predicted.back().upper.value();
      EXPECT_DOUBLE_EQ(bound, kLogDepthAlpha * std::log2(static_cast<double>(target)) + kLogDepthBeta);
      EXPECT_LE(static_cast<double>(depth(pair.first)), bound) << "size " << target << " inputs " << inputs;
      EXPECT_LE(static_cast<double>(depth(pair.second)), bound) << "size " << target << " inputs " << inputs;
    }
  }
}

// ------------------------------------------------------------------- qcd

TEST(Qcd, IdenticalAndOrthogonal) {
  const auto same = ci_to_qcd(word(""), word(""));
  EXPECT_GE(diamond_distance(to_channel(same.first), to_channel(same.second), config(5)).value, 2.0 - 1e-4);
  const auto orth = ci_to_qcd(constant_circuit(false), constant_circuit(true));
  EXPECT_LT(choi_distance(to_channel(orth.first), to_channel(orth.second)), 1e-10);
  Circuit raw(1);
  raw.measure(0);
  EXPECT_THROW(ci_to_qcd(raw, word("")), CircuitError);
}

TEST(Qcd, HalfDiamondEqualsFidelity) {
  Rng rng(108);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit q1 = random_qubit_channel(rng), q2 = random_qubit_channel(rng);
    const auto pair = ci_to_qcd(q1, q2);
    const double d = diamond_distance(to_channel(pair.first), to_channel(pair.second), config(500 + trial)).value;
    const double f = fmax_grid_qubit(to_channel(q1), to_channel(q2));
    EXPECT_NEAR(0.5 * d, f, 5e-3) << "trial " << trial;
  }
}

// ------------------------------------------------------------ embeddings

TEST(Embedding, DegradableResidual) {
  Rng rng(109);
  for (int trial = 0; trial < 4; ++trial) {
    const Circuit q = random_form(1, 6, rng, 2);
    const Embedding e = degradable_embed(q);
    const Channel c = to_stinespring_channel(e.circuit);
    const auto check = verify_degrading(e.map, c, 1e-9);
    EXPECT_TRUE(check.ok) << check.residual;
    // Flag 1 runs q; flag 0 erases.
    const Matrix rho = random_density(std::size_t{1} << e.circuit.num_inputs(), rng);
    const Matrix out = to_channel(e.circuit).apply(rho);
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-10);
  }
}

TEST(Embedding, AntidegradableResidual) {
  Rng rng(110);
  for (int trial = 0; trial < 4; ++trial) {
    const Circuit q = random_qubit_channel(rng);
    const Embedding e = antidegradable_embed(q);
    const Channel c = to_stinespring_channel(e.circuit);
    const auto check = verify_degrading(e.map, complement(c), 1e-9);
    EXPECT_TRUE(check.ok) << check.residual;
  }
}

TEST(Embedding, DiamondHalving) {
  const std::vector<std::pair<std::string, std::string>> pairs{{"", "t"}, {"", "h"}, {"h", "th"}, {"t", "htht"}};
  std::uint64_t seed = 600;
  for (const auto& [a, b] : pairs) {
    const double delta = diamond_unitary_oracle(word_matrix(a), word_matrix(b));
    const double dg = diamond_distance(to_channel(degradable_embed(word(a)).circuit),
                                       to_channel(degradable_embed(word(b)).circuit), config(seed++)).value;
    const double ad = diamond_distance(to_channel(antidegradable_embed(word(a)).circuit),
                                       to_channel(antidegradable_embed(word(b)).circuit), config(seed++)).value;
    EXPECT_NEAR(dg, delta / 2.0, 2e-3) << a << "/" << b;
    EXPECT_NEAR(ad, delta / 2.0, 2e-3) << a << "/" << b;
  }
}

// --------------------------------------------------------- mixed unitary

TEST(MixedUnitaryApprox, SimulationMixingAndSandwiches) {
  Rng rng(111);
  const Channel phi = dilate(testing::random_channel(2, 2, 2, rng));
  const double smin = min_output_entropy(phi, config(700)).value;
  const double nu = max_output_p_norm(phi, 2.0, config(701)).value;
  for (std::size_t extra = 1; extra <= 3; ++extra) {
    const ChannelApprox approx = mixed_unitary_approx(phi, extra);
    const auto da = static_cast<std::size_t>(approx.report.parameter("anc_dim"));
    const auto db = static_cast<std::size_t>(approx.report.parameter("env_dim"));
    ASSERT_EQ(da, std::size_t{2} << extra);
    const Channel& p = approx.channel;
    EXPECT_LT(cptp_residual(p), 1e-9);
    const Matrix mixed_b = Matrix::Identity(static_cast<Idx>(db), static_cast<Idx>(db)) / static_cast<double>(db);
    for (int k = 0; k < 4; ++k) {
      const Matrix sigma = random_density(2, rng);
      EXPECT_LT(max_abs(p.apply(kron(ket0(da), sigma)) - kron(phi.apply(sigma), mixed_b)), 1e-9);
      // A state supported off |0>_A (x) H.
      const std::size_t d = da * 2;
      Matrix rho = random_density(d, rng);
      rho.topRows(2).setZero();
      rho.leftCols(2).setZero();
      rho /= rho.trace().real();
      const Matrix flat = Matrix::Identity(static_cast<Idx>(d), static_cast<Idx>(d)) / static_cast<double>(d);
      EXPECT_LE(trace_norm(Matrix(p.apply(rho) - flat)), 2.0 / static_cast<double>(da) + 1e-12);
    }
    const double s2 = min_output_entropy(p, config(710 + extra)).value - std::log2(static_cast<double>(db));
    EXPECT_LE(s2, smin + 2e-3);
    EXPECT_GE(s2, smin - 1.0 / static_cast<double>(da) - 2e-3);
    const double scale = std::pow(static_cast<double>(db), 0.5 - 1.0);
    const double nu2 = max_output_p_norm(p, 2.0, config(720 + extra)).value / scale;
    EXPECT_GE(nu2, nu - 2e-3);
    EXPECT_LE(nu2, nu + 2.0 * static_cast<double>(db) / static_cast<double>(da) + 2e-3);
  }
}

TEST(MixedUnitaryApprox, Errors) {
  EXPECT_THROW(mixed_unitary_approx(depolarizing_channel(2), 1), ChannelError);
  Rng rng(112);
  const Channel phi = dilate(testing::random_channel(2, 2, 2, rng));
  EXPECT_THROW(mixed_unitary_approx(phi, 6), ResourceCapError);
}

TEST(MixedUnitaryCircuit, HonestAndAuxiliaryInputs) {
  Rng rng(113);
  for (std::size_t extra : {2u, 3u}) {
    const Circuit q = random_qubit_channel(rng);
    const std::size_t m0 = normal_form_parts(q).ancillas.size();
    ASSERT_EQ(m0, 1u);
    const CircuitResult res = mixed_unitary_circuit(q, extra);
    const std::size_t m = m0 + extra;
    ASSERT_EQ(res.report.parameter("m"), static_cast<double>(m));
    const Channel c = to_channel(res.circuit), qc = to_channel(q);
    const std::size_t dout = qc.out_dim(), dtot = std::size_t{1} << (m + 1);
    const std::size_t db = dtot / dout;
    const Matrix mixed_b = Matrix::Identity(static_cast<Idx>(db), static_cast<Idx>(db)) / static_cast<double>(db);
    const Matrix flat = Matrix::Identity(static_cast<Idx>(dtot), static_cast<Idx>(dtot)) / static_cast<double>(dtot);
    for (int k = 0; k < 3; ++k) {
      const Matrix sigma = random_density(2, rng);
      EXPECT_LT(max_abs(c.apply(kron(ket0(std::size_t{1} << m), sigma)) - kron(qc.apply(sigma), mixed_b)), 1e-9);
      const std::size_t basis = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>((std::size_t{1} << m) - 1));
      const Matrix aux = testing::basis_op(std::size_t{1} << m, basis, basis);
      EXPECT_LE(trace_norm(Matrix(c.apply(kron(aux, sigma)) - flat)), std::ldexp(1.0, -static_cast<int>(m - 1)) + 1e-12);
    }
  }
}

TEST(MixedUnitaryCircuit, DiamondSandwichAtSixAncillas) {
  const double delta = diamond_unitary_oracle(word_matrix(""), word_matrix("t"));
  const auto c1 = mixed_unitary_circuit(word(""), 6), c2 = mixed_unitary_circuit(word("t"), 6);
  const double eps = c1.report.parameter("epsilon");
  EXPECT_DOUBLE_EQ(eps, 0.125);
  OptimizerConfig cfg = config(800, 3);
  cfg.ref_dim = 2;
  cfg.max_iters = 60;
  const double d = diamond_distance(CircuitMap(c1.circuit), CircuitMap(c2.circuit), cfg).value;
  EXPECT_GE(d, delta - 5e-3);
  EXPECT_LE(d, delta + eps + 5e-3);
}

TEST(MixedUnitaryCircuit, RequiresNormalForm) {
  Circuit c(1);
  c.measure(0);
  EXPECT_THROW(mixed_unitary_circuit(c, 1), CircuitError);
}

}  // namespace
}  // namespace qchan

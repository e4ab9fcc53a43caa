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

#include <gtest/gtest.h>

#include <cmath>

#include "qchan/measures.hpp"
#include "qchan/random.hpp"
#include "test_util.hpp"

namespace qchan {
namespace {

using testing::basis_op;
using testing::biased_channel;
using testing::constant_channel;
using testing::pauli_x;
using testing::random_channel;

void expect_monotone(const std::vector<std::vector<double>>& traces) {
  for (const auto& t : traces) {
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(t[i], t[i - 1]);
  }
}

OptimizerConfig config(std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.seed = seed;
  return cfg;
}

TEST(Norms, TraceNorm) {
  Rng rng(31);
  EXPECT_NEAR(trace_norm(random_density(4, rng)), 1.0, kTolExact);
  EXPECT_NEAR(trace_norm(Matrix(basis_op(2, 0, 0) - basis_op(2, 1, 1))), 2.0, kTolExact);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(3, 3, rng);
    const Matrix block = kron(basis_op(2, 0, 1), a) + kron(basis_op(2, 1, 0), Matrix(a.adjoint()));
    EXPECT_NEAR(trace_norm(block), 2.0 * trace_norm(a), 1e-10);
  }
}

TEST(Norms, Schatten) {
  Rng rng(32);
  const Matrix m = random_matrix(3, 4, rng);
  EXPECT_NEAR(schatten_norm(m, 1.0), trace_norm(m), kTolExact);
  EXPECT_NEAR(schatten_norm(random_unitary(3, rng), kInfinity), 1.0, kTolExact);
  for (double p : {1.0, 2.0, 3.0, kInfinity}) {
    const Matrix a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng);
    EXPECT_NEAR(schatten_norm(kron(a, b), p), schatten_norm(a, p) * schatten_norm(b, p), 1e-10);
  }
  EXPECT_THROW(schatten_norm(m, 0.5), std::invalid_argument);
}

TEST(Fidelity, BasicProperties) {
  Rng rng(33);
  const Matrix rho = random_density(3, rng), sigma = random_density(3, rng);
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-9);
  EXPECT_NEAR(fidelity(basis_op(2, 0, 0), basis_op(2, 1, 1)), 0.0, kTolExact);
  EXPECT_NEAR(fidelity(rho, sigma), fidelity(sigma, rho), 1e-10);
  const Matrix a = random_density(2, rng), b = random_density(2, rng);
  EXPECT_NEAR(fidelity(kron(rho, a), kron(sigma, b)), fidelity(rho, sigma) * fidelity(a, b), 1e-10);
  EXPECT_THROW(fidelity(rho, a), std::invalid_argument);
}

TEST(Fidelity, FuchsVanDeGraaf) {
  Rng rng(34);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 2 + trial % 5;
    const Matrix rho = random_density(d, rng, 1 + trial % d), sigma = random_density(d, rng);
    const double f = fidelity(rho, sigma);
    const double t = 0.5 * trace_norm(Matrix(rho - sigma));
    EXPECT_GE(t - (1.0 - f), -1e-9);
    EXPECT_GE(std::sqrt(1.0 - f * f) - t, -1e-9);
  }
}

TEST(Fidelity, TraceNormBridge) {
  Rng rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho(random_density(3, rng), Dims{3});
    const DensityMatrix xi(random_density(3, rng), Dims{3});
    const Vector psi = purify(rho).amplitudes();
    // any other purification of xi: rotate the purifying half
    const Vector phi = kron(Matrix::Identity(3, 3), random_unitary(3, rng)) * purify(xi).amplitudes();
    const std::vector<std::size_t> keep{1};
    const Matrix cross = partial_trace(Matrix(psi * phi.adjoint()), Dims{3, 3}, keep);
    EXPECT_NEAR(trace_norm(cross), fidelity(rho, xi), 1e-9);
  }
}

TEST(Monotonicity, TraceNormAndFidelity) {
  Rng rng(36);
  for (int trial = 0; trial < 50; ++trial) {
    const Channel phi = random_channel(3, 2, 3, rng);
    const Matrix rho = random_density(3, rng), sigma = random_density(3, rng);
    const Matrix a = phi.apply(rho), b = phi.apply(sigma);
    EXPECT_LE(trace_norm(Matrix(a - b)), trace_norm(Matrix(rho - sigma)) + 1e-9);
    EXPECT_GE(fidelity(a, b), fidelity(rho, sigma) - 1e-9);
  }
}

TEST(Helstrom, Cases) {
  const DensityMatrix zero(basis_op(2, 0, 0), Dims{2}), one(basis_op(2, 1, 1), Dims{2});
  EXPECT_NEAR(helstrom(zero, one).success, 1.0, kTolExact);
  EXPECT_NEAR(helstrom(zero, zero).success, 0.5, kTolExact);
  Rng rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const Matrix rho = random_density(d, rng), sigma = random_density(d, rng);
    const HelstromResult h = helstrom(rho, sigma);
    const double direct = 0.5 * (h.accept_first * rho).trace().real() + 0.5 * (h.accept_second * sigma).trace().real();
    EXPECT_NEAR(direct, h.success, 1e-10);
    EXPECT_NEAR(h.success, 0.5 + 0.25 * trace_norm(Matrix(rho - sigma)), 1e-10);
  }
}

TEST(Entropy, Cases) {
  Rng rng(38);
  const Vector psi = random_unit_vector(3, rng);
  EXPECT_NEAR(von_neumann_entropy(Matrix(psi * psi.adjoint())), 0.0, 1e-10);
  for (std::size_t d = 2; d <= 5; ++d) {
    const auto dd = static_cast<Eigen::Index>(d);
    EXPECT_NEAR(von_neumann_entropy(Matrix(Matrix::Identity(dd, dd) / static_cast<double>(d))), std::log2(d), 1e-10);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = random_density(4, rng);
    EXPECT_NEAR(renyi_entropy(rho, 1.0 + 1e-6), von_neumann_entropy(rho), 1e-4 * std::log2(4.0));
    EXPECT_LE(renyi_entropy(rho, 2.0), von_neumann_entropy(rho) + 1e-12);
  }
  EXPECT_THROW(renyi_entropy(Matrix(Matrix::Identity(2, 2) / 2.0), 1.0), std::invalid_argument);
}

TEST(Entropy, Concavity) {
  Rng rng(39);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix s = random_density(3, rng), x = random_density(3, rng, 1);
    const double q = rng.uniform();
    EXPECT_GE(von_neumann_entropy(Matrix(q * s + (1 - q) * x)),
              q * von_neumann_entropy(s) + (1 - q) * von_neumann_entropy(x) - 1e-9);
  }
}

TEST(MinOutputEntropy, Cases) {
  Rng rng(40);
  const auto u = min_output_entropy(Channel::unitary(random_unitary(3, rng), Dims{3}), config(1));
  EXPECT_NEAR(u.value, 0.0, 1e-6);
  const auto d = min_output_entropy(depolarizing_channel(2), config(2));
  EXPECT_NEAR(d.value, 1.0, 1e-6);
  const auto r = min_output_entropy(random_channel(2, 2, 2, rng), config(3));
  expect_monotone(r.iterations);
  EXPECT_EQ(r.iterations.size(), 20u);
}

TEST(MinOutputEntropy, ControlledWeylPreservesValue) {
  Rng rng(41);
  const Channel phi = random_channel(2, 2, 2, rng);
  const double base = min_output_entropy(phi, config(4)).value;
  const double lifted = min_output_entropy(controlled_weyl_channel(phi), config(5)).value;
  EXPECT_NEAR(lifted, base, 2e-3);
}

TEST(MaxOutputPNorm, Cases) {
  Rng rng(42);
  for (double p : {1.5, 2.0, kInfinity}) {
    EXPECT_NEAR(max_output_p_norm(Channel::unitary(random_unitary(2, rng), Dims{2}), p, config(6)).value, 1.0, 1e-9);
  }
  for (std::size_t d : {2u, 3u}) {
    EXPECT_NEAR(max_output_p_norm(depolarizing_channel(d), 2.0, config(7)).value, 1.0 / std::sqrt(d), 1e-6);
  }
  const auto r = max_output_p_norm(random_channel(2, 2, 3, rng), 2.0, config(8));
  expect_monotone(r.iterations);
  EXPECT_THROW(max_output_p_norm(depolarizing_channel(2), 0.5, config(8)), std::invalid_argument);
}

TEST(MaxOutputFidelity, Cases) {
  Rng rng(43);
  const Channel u = Channel::unitary(random_unitary(2, rng), Dims{2});
  EXPECT_NEAR(max_output_fidelity(u, u, config(9)).value, 1.0, 1e-9);
  EXPECT_NEAR(max_output_fidelity(constant_channel(0, 2), constant_channel(1, 2), config(9)).value, 0.0, 1e-9);
  EXPECT_THROW(max_output_fidelity(u, constant_channel(0, 3), config(9)), ChannelError);
}

TEST(MaxOutputFidelity, Multiplicative) {
  Rng rng(44);
  for (int trial = 0; trial < 3; ++trial) {
    const Channel p1 = biased_channel(0, 0.4, 2, rng), q1 = biased_channel(1, 0.5, 2, rng);
    const Channel p2 = biased_channel(0, 0.6, 2, rng), q2 = biased_channel(1, 0.3, 2, rng);
    const auto cfg = config(10 + trial);
    const double joint = max_output_fidelity(tensor_channels(p1, p2), tensor_channels(q1, q2), cfg).value;
    const double a = max_output_fidelity(p1, q1, cfg).value;
    const double b = max_output_fidelity(p2, q2, cfg).value;
    EXPECT_LT(a * b, 0.99);
    EXPECT_NEAR(joint, a * b, 2e-3);
  }
}

TEST(FmaxCrosscheck, AgreesWithDirectRoute) {
  Rng rng(45);
  const Channel u = dilate(Channel::unitary(random_unitary(2, rng), Dims{2}));
  EXPECT_NEAR(fmax_via_dnorm_crosscheck(u, u, config(11)).value, 1.0, 1e-9);
  EXPECT_NEAR(fmax_via_dnorm_crosscheck(constant_channel(0, 2), constant_channel(1, 2), config(11)).value, 0.0, 1e-9);
  for (int trial = 0; trial < 5; ++trial) {
    const Channel a = dilate(biased_channel(0, 0.4, 2, rng)), b = dilate(biased_channel(1, 0.5, 2, rng));
    const auto g = fmax_via_dnorm_crosscheck(a, b, config(12));
    const auto d = max_output_fidelity(a, b, config(13));
    expect_monotone(g.iterations);
    expect_monotone(d.iterations);
    EXPECT_NEAR(g.value, d.value, 2e-3);
  }
}

TEST(Diamond, Cases) {
  Rng rng(46);
  const Channel a = random_channel(2, 2, 2, rng);
  EXPECT_NEAR(diamond_distance(a, a, config(14)).value, 0.0, 1e-12);
  const Channel id = Channel::identity(Dims{2}), x = Channel::unitary(pauli_x(), Dims{2});
  EXPECT_NEAR(diamond_distance(id, x, config(15)).value, 2.0, 1e-6);
}

TEST(Diamond, UnitaryOracle) {
  EXPECT_NEAR(diamond_unitary_oracle(pauli_x(), pauli_x()), 0.0, 1e-12);
  EXPECT_NEAR(diamond_unitary_oracle(Matrix::Identity(2, 2), pauli_x()), 2.0, 1e-12);
  const double theta = 0.1;
  Matrix v = Matrix::Identity(2, 2);
  v(1, 1) = std::polar(1.0, theta);
  EXPECT_NEAR(diamond_unitary_oracle(Matrix::Identity(2, 2), v), 2.0 * std::sin(theta / 2.0), 1e-12);
  const auto est = diamond_distance(Channel::identity(Dims{2}), Channel::unitary(v, Dims{2}), config(16));
  EXPECT_NEAR(est.value, 2.0 * std::sin(theta / 2.0), 1e-6);
  EXPECT_THROW(diamond_unitary_oracle(Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)), std::invalid_argument);
}

TEST(Diamond, SeesawMatchesOracle) {
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix u = random_unitary(2, rng), v = random_unitary(2, rng);
    const auto est = diamond_distance(Channel::unitary(u, Dims{2}), Channel::unitary(v, Dims{2}), config(100 + trial));
    expect_monotone(est.iterations);
    EXPECT_NEAR(est.value, diamond_unitary_oracle(u, v), 1e-6);
  }
}

TEST(Diamond, StableUnderIdlePadding) {
  Rng rng(48);
  const Channel a = random_channel(2, 2, 2, rng), b = random_channel(2, 2, 2, rng);
  const Channel id = Channel::identity(Dims{2});
  const double base = diamond_distance(a, b, config(17)).value;
  const double padded = diamond_distance(tensor_channels(a, id), tensor_channels(b, id), config(18)).value;
  EXPECT_NEAR(padded, base, 2e-3);
}

TEST(Config, Validation) {
  OptimizerConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(diamond_distance(Channel::identity(Dims{2}), Channel::identity(Dims{2}), cfg), std::invalid_argument);
}

}  // namespace
}  // namespace qchan

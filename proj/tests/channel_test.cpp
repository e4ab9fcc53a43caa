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

#include "qchan/channel.hpp"
#include "qchan/random.hpp"
#include "test_util.hpp"

namespace qchan {
namespace {

using testing::basis_op;
using testing::pauli_x;
using testing::random_channel;

Matrix bell_projector() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0;
  return v * v.adjoint();
}

// SWAP of input and ancilla; env is the old input so the channel outputs |0><0|.
Channel constant_zero_via_swap() {
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  return Channel::from_stinespring(StinespringRep{swap, Dims{2}, Dims{2}}, Dims{2}, Dims{2});
}

double action_distance(const Channel& a, const Channel& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.in_dim(); ++i) {
    for (std::size_t j = 0; j < a.in_dim(); ++j) {
      const Matrix e = basis_op(a.in_dim(), i, j);
      worst = std::max(worst, max_abs(a.apply(e) - b.apply(e)));
    }
  }
  return worst;
}

TEST(Apply, IdentityDepolarizerAndFlip) {
  Rng rng(1);
  const DensityMatrix rho(random_density(2, rng), Dims{2});
  EXPECT_LT(max_abs(Channel::identity(Dims{2}).apply(rho).mat() - rho.mat()), kTolExact);
  EXPECT_LT(max_abs(depolarizing_channel(2).apply(rho).mat() - 0.5 * Matrix::Identity(2, 2)), kTolExact);
  const Matrix flipped = Channel::unitary(pauli_x(), Dims{2}).apply(basis_op(2, 0, 0));
  EXPECT_LT(max_abs(flipped - basis_op(2, 1, 1)), kTolExact);
}

TEST(Apply, ReferenceAndAdjoint) {
  Rng rng(2);
  const Channel phi = random_channel(2, 3, 2, rng);
  const Matrix x = random_matrix(4, 4, rng);
  // (phi (x) id)(A (x) B) = phi(A) (x) B
  const Matrix a = random_matrix(2, 2, rng), b = random_matrix(2, 2, rng);
  EXPECT_LT(max_abs(phi.apply(kron(a, b), 2) - kron(phi.apply(a), b)), kTolExact);
  // <Y, phi(X)> == <phi^*(Y), X>
  const Matrix y = random_matrix(6, 6, rng);
  const cplx lhs = (y.adjoint() * phi.apply(x, 2)).trace();
  const cplx rhs = (phi.apply_adjoint(y, 2).adjoint() * x).trace();
  EXPECT_LT(std::abs(lhs - rhs), 1e-10);
  EXPECT_THROW(phi.apply(x, 3), ChannelError);
}

TEST(Choi, KnownValues) {
  EXPECT_LT(max_abs(Channel::identity(Dims{2}).choi() - bell_projector()), kTolExact);
  EXPECT_LT(max_abs(depolarizing_channel(2).choi() - 0.5 * Matrix::Identity(4, 4)), kTolExact);
  Rng rng(3);
  const Channel phi = random_channel(4, 4, 3, rng);
  EXPECT_LT(cptp_residual(phi), 1e-10);
}

TEST(Construction, RejectsInvalid) {
  std::vector<Matrix> bad{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  EXPECT_THROW(Channel::from_kraus(bad, Dims{2}, Dims{2}), ChannelError);
  Matrix j = bell_projector();
  j(0, 0) = 2.0;
  EXPECT_THROW(Channel::from_choi(j, Dims{2}, Dims{2}), ChannelError);
}

TEST(KrausFromStinespring, Cases) {
  const Channel id = Channel::from_stinespring(StinespringRep{Matrix::Identity(2, 2), {}, {}}, Dims{2}, Dims{2});
  const Channel k = kraus_from_stinespring(id);
  ASSERT_EQ(k.kraus()->size(), 1u);
  EXPECT_LT(max_abs(k.kraus()->front() - Matrix::Identity(2, 2)), kTolExact);

  const Channel c = constant_zero_via_swap();
  Rng rng(4);
  const Matrix rho = random_density(2, rng);
  EXPECT_LT(max_abs(c.apply(rho) - basis_op(2, 0, 0)), kTolExact);

  const Channel random = dilate(random_channel(2, 2, 3, rng));
  EXPECT_LT(action_distance(kraus_from_stinespring(random), random), kTolExact);
}

TEST(KrausFromChoi, Cases) {
  const Channel id = kraus_from_choi(Channel::from_choi(bell_projector(), Dims{2}, Dims{2}));
  ASSERT_EQ(id.kraus()->size(), 1u);
  const Matrix a = id.kraus()->front();
  EXPECT_NEAR(std::abs(a(0, 0)), 1.0, kTolExact);
  EXPECT_LT(max_abs(a / a(0, 0) - Matrix::Identity(2, 2)), kTolExact);

  const Channel dep = kraus_from_choi(Channel::from_choi(0.5 * Matrix::Identity(4, 4), Dims{2}, Dims{2}));
  EXPECT_EQ(dep.kraus()->size(), 4u);
  EXPECT_LT(action_distance(dep, depolarizing_channel(2)), kTolExact);

  Rng rng(5);
  const Channel phi = random_channel(3, 2, 4, rng);
  const Channel back = kraus_from_choi(Channel::from_choi(phi.choi(), Dims{3}, Dims{2}));
  EXPECT_LT(choi_distance(back, phi), 1e-9);
}

TEST(Complement, Cases) {
  const Channel c = complement(constant_zero_via_swap());
  EXPECT_LT(action_distance(c, Channel::identity(Dims{2})), kTolExact);

  const Channel id = Channel::from_stinespring(StinespringRep{Matrix::Identity(2, 2), {}, {}}, Dims{2}, Dims{2});
  const Channel tr = complement(id);
  EXPECT_EQ(tr.out_dim(), 1u);
  EXPECT_NEAR(tr.apply(basis_op(2, 1, 1))(0, 0).real(), 1.0, kTolExact);
  EXPECT_NEAR(std::abs(tr.apply(basis_op(2, 0, 1))(0, 0)), 0.0, kTolExact);

  Rng rng(6);
  const Channel phi = dilate(random_channel(2, 3, 2, rng));
  EXPECT_LT(choi_distance(complement(complement(phi)), phi), kTolExact);
  EXPECT_THROW(complement(random_channel(2, 2, 2, rng)), ChannelError);
}

TEST(ComposeTensor, Cases) {
  Rng rng(7);
  const Channel phi = random_channel(2, 3, 2, rng);
  EXPECT_LT(choi_distance(compose(Channel::identity(Dims{3}), phi), phi), kTolExact);

  const Channel dd = tensor_channels(depolarizing_channel(2), depolarizing_channel(3));
  const DensityMatrix rho(random_density(6, rng), Dims{2, 3});
  EXPECT_LT(max_abs(dd.apply(rho).mat() - Matrix::Identity(6, 6) / 6.0), kTolExact);

  const Matrix u = random_unitary(3, rng);
  const Channel round = compose(Channel::unitary(u.adjoint(), Dims{3}), Channel::unitary(u, Dims{3}));
  EXPECT_LT(choi_distance(round, Channel::identity(Dims{3})), kTolExact);

  // Parallel application agrees with the product action.
  const Channel a = random_channel(2, 2, 2, rng), b = random_channel(2, 3, 3, rng);
  const Channel ab = tensor_channels(a, b);
  const Matrix x = random_matrix(2, 2, rng), y = random_matrix(2, 2, rng);
  EXPECT_LT(max_abs(ab.apply(kron(x, y)) - kron(a.apply(x), b.apply(y))), kTolExact);
  const Channel sa = dilate(a), sb = dilate(b);
  const Channel sab = tensor_channels(sa, sb);
  ASSERT_TRUE(sab.stinespring().has_value());
  EXPECT_LT(choi_distance(sab, ab), kTolExact);
  EXPECT_LT(choi_distance(complement(sab), tensor_channels(complement(sa), complement(sb))), kTolExact);

  EXPECT_THROW(compose(phi, phi), ChannelError);
}

TEST(Families, DepolarizingDephasing) {
  Rng rng(8);
  const DensityMatrix rho(random_density(3, rng), Dims{3});
  EXPECT_LT(max_abs(depolarizing_channel(3).apply(rho).mat() - Matrix::Identity(3, 3) / 3.0), kTolExact);
  const Channel deph = dephasing_channel(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const Matrix expect = (i == j) ? basis_op(4, i, j) : Matrix::Zero(4, 4);
      EXPECT_LT(max_abs(deph.apply(basis_op(4, i, j)) - expect), kTolExact);
    }
  }
  EXPECT_LT(choi_distance(dephasing_channel(1), Channel::identity(Dims{1})), kTolExact);
  // unital
  for (const Channel& c : {depolarizing_channel(3), dephasing_channel(3)}) {
    EXPECT_LT(max_abs(c.apply(Matrix(Matrix::Identity(3, 3))) - Matrix::Identity(3, 3)), kTolExact);
    ASSERT_TRUE(c.mixed_unitary().has_value());
  }
}

TEST(MixedUnitary, StagesExpandConsistently) {
  Rng rng(9);
  MixedUnitaryRep rep;
  rep.stages.push_back({{0.3, 0.7}, {random_unitary(2, rng), random_unitary(2, rng)}});
  rep.stages.push_back({{0.5, 0.25, 0.25}, {random_unitary(2, rng), random_unitary(2, rng), random_unitary(2, rng)}});
  const Channel staged = Channel::from_mixed_unitary(rep, Dims{2});
  const Channel flat = Channel::from_mixed_unitary(rep.expanded(), Dims{2});
  EXPECT_EQ(rep.term_count(), 6u);
  EXPECT_LT(choi_distance(staged, flat), kTolExact);
  ASSERT_TRUE(staged.kraus().has_value());
  for (std::size_t k = 0; k < rep.term_count(); ++k) {
    auto [p, u] = rep.term(k);
    EXPECT_LT(max_abs((*staged.kraus())[k] - std::sqrt(p) * u), kTolExact);
  }
}

TEST(ControlledWeyl, Cases) {
  Rng rng(10);
  const Channel phi = random_channel(2, 2, 2, rng);
  const Channel cw = controlled_weyl_channel(phi);
  EXPECT_EQ(cw.in_dims(), (Dims{2, 2, 2}));
  const Matrix rho = random_density(2, rng);
  EXPECT_LT(max_abs(cw.apply(kron(rho, basis_op(4, 0, 0))) - phi.apply(rho)), kTolExact);
  const Matrix mixed = Matrix::Identity(4, 4) / 4.0;
  EXPECT_LT(max_abs(cw.apply(kron(rho, mixed)) - 0.5 * Matrix::Identity(2, 2)), kTolExact);
  // control register is dephased: coherences between controls vanish
  EXPECT_LT(max_abs(cw.apply(kron(rho, basis_op(4, 0, 1)))), kTolExact);
}

TEST(VerifyDegrading, EmbeddingIsNotADegrader) {
  // rho -> rho (x) |0><0| sends a depolarizer's output into its 4-dim environment.
  const Channel dep = dilate(depolarizing_channel(2));
  const std::size_t env = complement(dep).out_dim();
  ASSERT_EQ(env % 2, 0u);
  std::vector<Matrix> k{Matrix::Zero(static_cast<Eigen::Index>(env), 2)};
  k[0](0, 0) = 1.0;
  k[0](static_cast<Eigen::Index>(env / 2), 1) = 1.0;
  const Channel embed = Channel::from_kraus(k, Dims{2}, Dims{env});
  const DegradingCheck r = verify_degrading(embed, dep);
  EXPECT_FALSE(r.ok);
  EXPECT_GE(r.residual, 0.1);
}

}  // namespace
}  // namespace qchan

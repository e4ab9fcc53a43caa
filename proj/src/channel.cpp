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

#include "qchan/channel.hpp"

#include <algorithm>
#include <cmath>

namespace qchan {

namespace {

using Idx = Eigen::Index;

constexpr double kKrausPrune = 1e-12;
// Kraus lists longer than this are not materialized alongside the Choi matrix.
constexpr std::size_t kMaxKraus = 4096;
// Positivity of the Choi matrix is checked by eigendecomposition up to this size.
constexpr Idx kMaxPsdCheck = 1024;

Idx ix(std::size_t v) { return static_cast<Idx>(v); }

Matrix choi_from_kraus(const std::vector<Matrix>& kraus, std::size_t din, std::size_t dout) {
  Matrix vecs(ix(din * dout), ix(kraus.size()));
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    const Matrix& a = kraus[k];
    for (Idx o = 0; o < ix(dout); ++o) {
      for (Idx i = 0; i < ix(din); ++i) vecs(o * ix(din) + i, ix(k)) = a(o, i);
    }
  }
  return vecs * vecs.adjoint();
}

// T[(a,b),(i,j)] = J[(a,i),(b,j)]; the same index shuffle is its own inverse
// up to swapping the roles of the dimensions.
Matrix reshuffle(const Matrix& m, std::size_t d_row, std::size_t d_col) {
  const Idx r = ix(d_row), c = ix(d_col);
  Matrix out(r * r, c * c);
  for (Idx a = 0; a < r; ++a) {
    for (Idx b = 0; b < r; ++b) {
      for (Idx i = 0; i < c; ++i) {
        for (Idx j = 0; j < c; ++j) out(a * r + b, i * c + j) = m(a * c + i, b * c + j);
      }
    }
  }
  return out;
}

Matrix unreshuffle(const Matrix& t, std::size_t d_row, std::size_t d_col) {
  const Idx r = ix(d_row), c = ix(d_col);
  Matrix out(r * c, r * c);
  for (Idx a = 0; a < r; ++a) {
    for (Idx b = 0; b < r; ++b) {
      for (Idx i = 0; i < c; ++i) {
        for (Idx j = 0; j < c; ++j) out(a * c + i, b * c + j) = t(a * r + b, i * c + j);
      }
    }
  }
  return out;
}

Matrix stage_transfer(const MixedUnitaryStage& stage) {
  const Idx d = stage.unitaries.front().rows();
  Matrix t = Matrix::Zero(d * d, d * d);
  for (std::size_t k = 0; k < stage.unitaries.size(); ++k) {
    const Matrix& u = stage.unitaries[k];
    const Matrix uc = u.conjugate();
    for (Idx a = 0; a < d; ++a) {
      for (Idx i = 0; i < d; ++i) {
        const cplx w = stage.probabilities[k] * u(a, i);
        if (w == cplx(0.0)) continue;
        t.block(a * d, i * d, d, d) += w * uc;
      }
    }
  }
  return t;
}

std::vector<Matrix> prune(std::vector<Matrix> kraus) {
  std::erase_if(kraus, [](const Matrix& a) { return a.norm() < kKrausPrune; });
  return kraus;
}

void check_unitary(const Matrix& u, const char* what) {
  if (u.rows() != u.cols() ||
      max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) > 1e-9) {
    throw ChannelError(std::string(what) + ": operator not unitary");
  }
}

}  // namespace

std::size_t MixedUnitaryRep::term_count() const {
  std::size_t n = 1;
  for (const auto& s : stages) n *= s.unitaries.size();
  return n;
}

std::pair<double, Matrix> MixedUnitaryRep::term(std::size_t k) const {
  double p = 1.0;
  Matrix u;
  for (const auto& s : stages) {
    const std::size_t i = k % s.unitaries.size();
    k /= s.unitaries.size();
    p *= s.probabilities[i];
    u = (u.size() == 0) ? s.unitaries[i] : Matrix(s.unitaries[i] * u);
  }
  return {p, u};
}

MixedUnitaryRep MixedUnitaryRep::expanded() const {
  MixedUnitaryStage flat;
  const std::size_t n = term_count();
  for (std::size_t k = 0; k < n; ++k) {
    auto [p, u] = term(k);
    flat.probabilities.push_back(p);
    flat.unitaries.push_back(std::move(u));
  }
  return MixedUnitaryRep{{std::move(flat)}};
}

Channel::Channel(Dims in_dims, Dims out_dims, Matrix choi)
    : in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)), choi_(std::move(choi)) {
  const std::size_t din = in_dim(), dout = out_dim();
  if (choi_.rows() != ix(din * dout) || choi_.cols() != choi_.rows()) {
    throw ChannelError("Choi matrix shape does not match channel dims");
  }
  if (!choi_.allFinite()) throw ChannelError("Choi matrix has non-finite entries");
  if (!is_hermitian(choi_, 1e-9)) throw ChannelError("Choi matrix not Hermitian");
  choi_ = 0.5 * (choi_ + choi_.adjoint());
  const Matrix tr_out = partial_trace(choi_, Dims{dout, din}, std::vector<std::size_t>{1});
  if (max_abs(tr_out - Matrix::Identity(ix(din), ix(din))) > 1e-9) {
    throw ChannelError("map is not trace preserving");
  }
  transfer_ = reshuffle(choi_, dout, din);
}

Channel Channel::from_kraus(std::vector<Matrix> kraus, Dims in_dims, Dims out_dims) {
  const std::size_t din = product(in_dims), dout = product(out_dims);
  if (kraus.empty()) throw ChannelError("empty Kraus list");
  Matrix completeness = Matrix::Zero(ix(din), ix(din));
  for (const auto& a : kraus) {
    if (a.rows() != ix(dout) || a.cols() != ix(din)) throw ChannelError("Kraus operator shape mismatch");
    completeness += a.adjoint() * a;
  }
  if (max_abs(completeness - Matrix::Identity(ix(din), ix(din))) > 1e-9) {
    throw ChannelError("Kraus operators are not complete");
  }
  kraus = prune(std::move(kraus));
  Channel ch(std::move(in_dims), std::move(out_dims), choi_from_kraus(kraus, din, dout));
  ch.kraus_ = std::move(kraus);
  return ch;
}

Channel Channel::from_choi(Matrix choi, Dims in_dims, Dims out_dims) {
  Channel ch(std::move(in_dims), std::move(out_dims), std::move(choi));
  if (ch.choi_.rows() <= kMaxPsdCheck) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(ch.choi_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff())) {
      throw ChannelError("Choi matrix not positive semidefinite");
    }
  }
  return ch;
}

Channel Channel::from_stinespring(StinespringRep rep, Dims in_dims, Dims out_dims) {
  const std::size_t din = product(in_dims), dout = product(out_dims);
  const std::size_t danc = rep.anc_dim(), denv = rep.env_dim();
  if (din * danc != dout * denv || rep.unitary.rows() != ix(dout * denv)) {
    throw ChannelError("Stinespring dimensions inconsistent");
  }
  check_unitary(rep.unitary, "from_stinespring");
  std::vector<Matrix> kraus;
  for (std::size_t e = 0; e < denv; ++e) {
    Matrix a(ix(dout), ix(din));
    for (Idx o = 0; o < ix(dout); ++o) {
      for (Idx i = 0; i < ix(din); ++i) a(o, i) = rep.unitary(o * ix(denv) + ix(e), i * ix(danc));
    }
    kraus.push_back(std::move(a));
  }
  Channel ch = from_kraus(std::move(kraus), std::move(in_dims), std::move(out_dims));
  ch.stinespring_ = std::move(rep);
  return ch;
}

Channel Channel::from_mixed_unitary(MixedUnitaryRep rep, Dims dims, Dims out_dims) {
  const std::size_t d = product(dims);
  if (out_dims.empty()) out_dims = dims;
  if (product(out_dims) != d) throw ChannelError("from_mixed_unitary: output factors change the dimension");
  if (rep.stages.empty()) throw ChannelError("mixed-unitary rep has no stages");
  Matrix t;
  for (const auto& s : rep.stages) {
    if (s.unitaries.empty() || s.unitaries.size() != s.probabilities.size()) {
      throw ChannelError("mixed-unitary stage malformed");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < s.unitaries.size(); ++k) {
      if (s.probabilities[k] < 0.0) throw ChannelError("negative mixture probability");
      if (s.unitaries[k].rows() != ix(d)) throw ChannelError("mixture unitary has wrong dimension");
      check_unitary(s.unitaries[k], "from_mixed_unitary");
      total += s.probabilities[k];
    }
    if (std::abs(total - 1.0) > kTolExact) throw ChannelError("mixture probabilities do not sum to 1");
    const Matrix st = stage_transfer(s);
    t = (t.size() == 0) ? st : Matrix(st * t);
  }
  Channel ch(dims, out_dims, unreshuffle(t, d, d));
  if (rep.term_count() <= kMaxKraus) {
    std::vector<Matrix> kraus;
    const std::size_t n = rep.term_count();
    for (std::size_t k = 0; k < n; ++k) {
      auto [p, u] = rep.term(k);
      kraus.push_back(std::sqrt(p) * u);
    }
    ch.kraus_ = prune(std::move(kraus));
  }
  ch.mixed_unitary_ = std::move(rep);
  return ch;
}

Channel Channel::identity(Dims dims) {
  const auto d = ix(product(dims));
  return unitary(Matrix::Identity(d, d), std::move(dims));
}

Channel Channel::unitary(const Matrix& u, Dims dims) {
  check_unitary(u, "unitary channel");
  MixedUnitaryRep rep{{MixedUnitaryStage{{1.0}, {u}}}};
  Channel ch = from_mixed_unitary(std::move(rep), dims);
  ch.stinespring_ = StinespringRep{u, {}, {}};
  return ch;
}

DensityMatrix Channel::apply(const DensityMatrix& rho, const Dims& ref_dims) const {
  Dims expect = in_dims_;
  expect.insert(expect.end(), ref_dims.begin(), ref_dims.end());
  if (product(expect) != rho.dim() ||
      (rho.dims() != expect && product(ref_dims) != 1)) {
    throw ChannelError("apply: state dims do not match channel input ++ reference");
  }
  Dims out = out_dims_;
  out.insert(out.end(), ref_dims.begin(), ref_dims.end());
  return DensityMatrix(apply(rho.mat(), product(ref_dims)), out, 1e-9);
}

Matrix Channel::apply(const Matrix& x, std::size_t ref_dim) const {
  const Idx din = ix(in_dim()), dout = ix(out_dim()), r = ix(ref_dim);
  if (x.rows() != din * r || x.cols() != din * r) throw ChannelError("apply: operand dimension mismatch");
  Matrix xr(din * din, r * r);
  for (Idx i = 0; i < din; ++i) {
    for (Idx j = 0; j < din; ++j) {
      for (Idx a = 0; a < r; ++a) {
        for (Idx b = 0; b < r; ++b) xr(i * din + j, a * r + b) = x(i * r + a, j * r + b);
      }
    }
  }
  const Matrix yr = transfer_ * xr;
  Matrix y(dout * r, dout * r);
  for (Idx i = 0; i < dout; ++i) {
    for (Idx j = 0; j < dout; ++j) {
      for (Idx a = 0; a < r; ++a) {
        for (Idx b = 0; b < r; ++b) y(i * r + a, j * r + b) = yr(i * dout + j, a * r + b);
      }
    }
  }
  return y;
}

Matrix Channel::apply_adjoint(const Matrix& y, std::size_t ref_dim) const {
  const Idx din = ix(in_dim()), dout = ix(out_dim()), r = ix(ref_dim);
  if (y.rows() != dout * r || y.cols() != dout * r) {
    throw ChannelError("apply_adjoint: operand dimension mismatch");
  }
  // tr(Y (Phi (x) id)(X)) = tr((Phi^* (x) id)(Y) X)
  Matrix mr(dout * dout, r * r);
  for (Idx a = 0; a < dout; ++a) {
    for (Idx b = 0; b < dout; ++b) {
      for (Idx s = 0; s < r; ++s) {
        for (Idx t = 0; t < r; ++t) mr(a * dout + b, s * r + t) = y(b * r + t, a * r + s);
      }
    }
  }
  const Matrix xr = transfer_.transpose() * mr;
  Matrix x(din * r, din * r);
  for (Idx i = 0; i < din; ++i) {
    for (Idx j = 0; j < din; ++j) {
      for (Idx s = 0; s < r; ++s) {
        for (Idx t = 0; t < r; ++t) x(j * r + t, i * r + s) = xr(i * din + j, s * r + t);
      }
    }
  }
  return x;
}

double cptp_residual(const Channel& phi) {
  const std::size_t din = phi.in_dim(), dout = phi.out_dim();
  const Matrix tr_out = partial_trace(phi.choi(), Dims{dout, din}, std::vector<std::size_t>{1});
  double r = max_abs(tr_out - Matrix::Identity(ix(din), ix(din)));
  Eigen::SelfAdjointEigenSolver<Matrix> es(phi.choi(), Eigen::EigenvaluesOnly);
  r = std::max(r, -es.eigenvalues().minCoeff());
  return std::max(r, 0.0);
}

double choi_distance(const Channel& a, const Channel& b) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) {
    throw ChannelError("choi_distance: dimension mismatch");
  }
  return max_abs(a.choi() - b.choi());
}

Channel kraus_from_stinespring(const Channel& phi) {
  if (!phi.stinespring()) throw ChannelError("kraus_from_stinespring: missing Stinespring rep");
  return Channel::from_stinespring(*phi.stinespring(), phi.in_dims(), phi.out_dims());
}

Channel kraus_from_choi(const Channel& phi) {
  const Spectrum s = eigh(phi.choi());
  const std::size_t din = phi.in_dim(), dout = phi.out_dim();
  const double scale = std::max(1.0, s.values.front());
  std::vector<Matrix> kraus;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    const double lam = s.values[k];
    if (lam < -1e-9 * scale) throw ChannelError("kraus_from_choi: Choi matrix not positive");
    if (lam <= 0.0) continue;
    Matrix a(ix(dout), ix(din));
    for (Idx o = 0; o < ix(dout); ++o) {
      for (Idx i = 0; i < ix(din); ++i) a(o, i) = std::sqrt(lam) * s.vectors(o * ix(din) + i, ix(k));
    }
    kraus.push_back(std::move(a));
  }
  kraus = prune(std::move(kraus));
  // Renormalize away the eigen-solver roundoff so completeness holds tightly.
  Matrix c = Matrix::Zero(ix(din), ix(din));
  for (const auto& a : kraus) c += a.adjoint() * a;
  const Matrix fix = psd_sqrt(Matrix(c.inverse()));
  for (auto& a : kraus) a = a * fix;
  return Channel::from_kraus(std::move(kraus), phi.in_dims(), phi.out_dims());
}

Channel dilate(const Channel& phi) {
  const Channel with_kraus = phi.kraus() ? phi : kraus_from_choi(phi);
  const auto& kraus = *with_kraus.kraus();
  const std::size_t din = phi.in_dim(), dout = phi.out_dim();
  std::size_t env = kraus.size();
  while ((dout * env) % din != 0) ++env;
  const std::size_t anc = dout * env / din;
  const Idx n = ix(dout * env);
  Matrix v = Matrix::Zero(n, ix(din));
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    for (Idx o = 0; o < ix(dout); ++o) {
      for (Idx i = 0; i < ix(din); ++i) v(o * ix(env) + ix(k), i) = kraus[k](o, i);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(v);
  const Matrix q = qr.householderQ();
  Matrix u(n, n);
  Idx next = ix(din);
  for (Idx i = 0; i < ix(din); ++i) {
    for (Idx t = 0; t < ix(anc); ++t) u.col(i * ix(anc) + t) = (t == 0) ? Matrix(v.col(i)) : Matrix(q.col(next++));
  }
  StinespringRep rep{std::move(u), Dims{anc}, Dims{env}};
  Channel out = Channel::from_stinespring(std::move(rep), phi.in_dims(), phi.out_dims());
  return out;
}

Channel complement(const Channel& phi) {
  if (!phi.stinespring()) throw ChannelError("complement: missing Stinespring rep");
  const StinespringRep& rep = *phi.stinespring();
  const std::size_t din = phi.in_dim(), dout = phi.out_dim();
  const std::size_t danc = rep.anc_dim(), denv = rep.env_dim();
  const Matrix swapped = permute_systems(rep.unitary, Dims{dout, denv}, std::vector<std::size_t>{1, 0},
                                         Dims{din, danc}, std::vector<std::size_t>{0, 1});
  Dims env = rep.env_dims.empty() ? Dims{1} : rep.env_dims;
  StinespringRep c{swapped, rep.anc_dims, phi.out_dims()};
  return Channel::from_stinespring(std::move(c), phi.in_dims(), std::move(env));
}

Channel compose(const Channel& phi, const Channel& psi) {
  if (psi.out_dim() != phi.in_dim()) throw ChannelError("compose: dimension mismatch");
  const Matrix t = phi.transfer() * psi.transfer();
  const Matrix choi = unreshuffle(t, phi.out_dim(), psi.in_dim());
  if (phi.mixed_unitary() && psi.mixed_unitary() && phi.in_dim() == psi.in_dim()) {
    MixedUnitaryRep rep = *psi.mixed_unitary();
    for (const auto& s : phi.mixed_unitary()->stages) rep.stages.push_back(s);
    return Channel::from_mixed_unitary(std::move(rep), psi.in_dims(), phi.out_dims());
  }
  if (phi.kraus() && psi.kraus() && phi.kraus()->size() * psi.kraus()->size() <= kMaxKraus) {
    std::vector<Matrix> kraus;
    for (const auto& a : *phi.kraus()) {
      for (const auto& b : *psi.kraus()) kraus.push_back(a * b);
    }
    return Channel::from_kraus(std::move(kraus), psi.in_dims(), phi.out_dims());
  }
  return Channel::from_choi(choi, psi.in_dims(), phi.out_dims());
}

Channel tensor_channels(const Channel& phi, const Channel& psi) {
  Dims in = phi.in_dims();
  in.insert(in.end(), psi.in_dims().begin(), psi.in_dims().end());
  Dims out = phi.out_dims();
  out.insert(out.end(), psi.out_dims().begin(), psi.out_dims().end());
  const std::size_t i1 = phi.in_dim(), i2 = psi.in_dim(), o1 = phi.out_dim(), o2 = psi.out_dim();
  const std::vector<std::size_t> mid{0, 2, 1, 3};

  if (phi.stinespring() && psi.stinespring()) {
    const auto& r1 = *phi.stinespring();
    const auto& r2 = *psi.stinespring();
    const Matrix k = kron(r1.unitary, r2.unitary);
    const Matrix u = permute_systems(k, Dims{o1, r1.env_dim(), o2, r2.env_dim()}, mid,
                                     Dims{i1, r1.anc_dim(), i2, r2.anc_dim()}, mid);
    Dims anc = r1.anc_dims;
    anc.insert(anc.end(), r2.anc_dims.begin(), r2.anc_dims.end());
    Dims env = r1.env_dims;
    env.insert(env.end(), r2.env_dims.begin(), r2.env_dims.end());
    return Channel::from_stinespring(StinespringRep{u, anc, env}, in, out);
  }
  if (phi.mixed_unitary() && psi.mixed_unitary()) {
    MixedUnitaryRep rep;
    const Matrix id1 = Matrix::Identity(ix(i1), ix(i1));
    const Matrix id2 = Matrix::Identity(ix(i2), ix(i2));
    for (const auto& s : phi.mixed_unitary()->stages) {
      MixedUnitaryStage t{s.probabilities, {}};
      for (const auto& u : s.unitaries) t.unitaries.push_back(kron(u, id2));
      rep.stages.push_back(std::move(t));
    }
    for (const auto& s : psi.mixed_unitary()->stages) {
      MixedUnitaryStage t{s.probabilities, {}};
      for (const auto& u : s.unitaries) t.unitaries.push_back(kron(id1, u));
      rep.stages.push_back(std::move(t));
    }
    return Channel::from_mixed_unitary(std::move(rep), in);
  }
  if (phi.kraus() && psi.kraus() && phi.kraus()->size() * psi.kraus()->size() <= kMaxKraus) {
    std::vector<Matrix> kraus;
    for (const auto& a : *phi.kraus()) {
      for (const auto& b : *psi.kraus()) kraus.push_back(kron(a, b));
    }
    return Channel::from_kraus(std::move(kraus), in, out);
  }
  const Matrix t = permute_systems(kron(phi.transfer(), psi.transfer()), Dims{o1, o1, o2, o2}, mid,
                                   Dims{i1, i1, i2, i2}, mid);
  return Channel::from_choi(unreshuffle(t, o1 * o2, i1 * i2), in, out);
}

Channel depolarizing_channel(std::size_t d) {
  if (d == 0) throw ChannelError("depolarizing_channel: d must be positive");
  MixedUnitaryStage s;
  const double p = 1.0 / static_cast<double>(d * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      s.probabilities.push_back(p);
      s.unitaries.push_back(weyl_operator(d, a, b).mat());
    }
  }
  return Channel::from_mixed_unitary(MixedUnitaryRep{{std::move(s)}}, Dims{d});
}

Channel dephasing_channel(std::size_t d) {
  if (d == 0) throw ChannelError("dephasing_channel: d must be positive");
  MixedUnitaryStage s;
  for (std::size_t b = 0; b < d; ++b) {
    s.probabilities.push_back(1.0 / static_cast<double>(d));
    s.unitaries.push_back(weyl_operator(d, 0, b).mat());
  }
  return Channel::from_mixed_unitary(MixedUnitaryRep{{std::move(s)}}, Dims{d});
}

Channel controlled_weyl_channel(const Channel& phi) {
  const std::size_t d = phi.out_dim();
  const std::size_t din = phi.in_dim();
  const Channel base = phi.kraus() ? phi : kraus_from_choi(phi);
  std::vector<Matrix> kraus;
  for (const auto& a : *base.kraus()) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const Matrix wa = weyl_operator(d, i, j).mat() * a;
        Matrix k = Matrix::Zero(ix(d), ix(din * d * d));
        // column (h, i, j) of the input H (x) C1 (x) C2
        for (Idx h = 0; h < ix(din); ++h) k.col(h * ix(d * d) + ix(i * d + j)) = wa.col(h);
        kraus.push_back(std::move(k));
      }
    }
  }
  Dims in = phi.in_dims();
  in.push_back(d);
  in.push_back(d);
  return Channel::from_kraus(std::move(kraus), std::move(in), phi.out_dims());
}

DegradingCheck verify_degrading(const Channel& delta, const Channel& phi, double tol) {
  if (delta.in_dim() != phi.out_dim()) throw ChannelError("verify_degrading: dimension mismatch");
  const Channel comp = complement(phi);
  if (delta.out_dim() != comp.out_dim()) {
    throw ChannelError("verify_degrading: degrader output does not match environment");
  }
  const Channel composed = compose(delta, phi);
  const double residual = max_abs(composed.choi() - comp.choi());
  const double scale = std::max(1.0, max_abs(comp.choi()));
  return {residual < tol * scale, residual};
}

}  // namespace qchan

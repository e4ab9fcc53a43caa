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

#include "qchan/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qchan {

namespace {

void check_cap(std::size_t d) {
  if (d > kMaxDim) {
    throw ResourceCapError("dimension " + std::to_string(d) +
                           " exceeds cap " + std::to_string(kMaxDim));
  }
}

void check_finite(const Matrix& m) {
  if (!m.allFinite()) throw LinalgError("matrix has non-finite entries");
}

// src[n] is the old flat index of new flat index n.
std::vector<Eigen::Index> permutation_index(const Dims& dims,
                                            std::span<const std::size_t> perm) {
  const std::size_t k = dims.size();
  if (perm.size() != k) throw LinalgError("permutation length mismatch");
  std::vector<bool> seen(k, false);
  for (auto p : perm) {
    if (p >= k || seen[p]) throw LinalgError("invalid permutation");
    seen[p] = true;
  }
  Dims new_dims(k);
  for (std::size_t i = 0; i < k; ++i) new_dims[i] = dims[perm[i]];
  std::vector<std::size_t> old_stride(k, 1);
  for (std::size_t i = k; i-- > 1;) old_stride[i - 1] = old_stride[i] * dims[i];

  const std::size_t total = product(dims);
  std::vector<Eigen::Index> src(total);
  std::vector<std::size_t> digit(k, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t old = 0;
    for (std::size_t i = 0; i < k; ++i) old += digit[i] * old_stride[perm[i]];
    src[n] = static_cast<Eigen::Index>(old);
    for (std::size_t i = k; i-- > 0;) {
      if (++digit[i] < new_dims[i]) break;
      digit[i] = 0;
    }
  }
  return src;
}

}  // namespace

std::size_t product(std::span<const std::size_t> dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

ComplexMatrix::ComplexMatrix(Matrix m, Dims row_dims, Dims col_dims)
    : m_(std::move(m)), row_dims_(std::move(row_dims)), col_dims_(std::move(col_dims)) {
  if (product(row_dims_) != rows() || product(col_dims_) != cols()) {
    throw LinalgError("subsystem dimensions do not match matrix shape");
  }
  check_finite(m_);
}

ComplexMatrix::ComplexMatrix(Matrix m, Dims dims)
    : ComplexMatrix(std::move(m), dims, dims) {}

ComplexMatrix::ComplexMatrix(Matrix m)
    : ComplexMatrix(m, Dims{static_cast<std::size_t>(m.rows())},
                    Dims{static_cast<std::size_t>(m.cols())}) {}

DensityMatrix::DensityMatrix(Matrix m, Dims dims, double tol)
    : m_(std::move(m)), dims_(std::move(dims)) {
  if (m_.rows() != m_.cols()) throw LinalgError("density matrix must be square");
  if (product(dims_) != dim()) throw LinalgError("dims do not match density matrix");
  check_finite(m_);
  if (!is_hermitian(m_, tol)) throw LinalgError("density matrix not Hermitian");
  if (std::abs(m_.trace() - cplx(1.0)) > tol) throw LinalgError("density matrix trace != 1");
  const Matrix h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw LinalgError("density matrix not positive");
  m_ = h;
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m, double tol)
    : DensityMatrix(m.mat(), m.row_dims(), tol) {}

PureState::PureState(Vector amplitudes, Dims dims, double tol)
    : v_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (product(dims_) != dim()) throw LinalgError("dims do not match state vector");
  if (!v_.allFinite()) throw LinalgError("state has non-finite entries");
  if (std::abs(v_.norm() - 1.0) > tol) throw LinalgError("state not normalized");
}

DensityMatrix PureState::density() const {
  return DensityMatrix(v_ * v_.adjoint(), dims_);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  check_cap(static_cast<std::size_t>(std::max(a.rows() * b.rows(), a.cols() * b.cols())));
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return r;
}

Matrix kron_all(std::span<const Matrix> factors) {
  Matrix r = Matrix::Identity(1, 1);
  for (const auto& f : factors) r = kron(r, f);
  return r;
}

Matrix permute_systems(const Matrix& m, const Dims& dims,
                       std::span<const std::size_t> perm) {
  if (static_cast<std::size_t>(m.rows()) != product(dims) || m.rows() != m.cols()) {
    throw LinalgError("permute_systems: shape mismatch");
  }
  const auto src = permutation_index(dims, perm);
  return m(src, src);
}

Vector permute_systems(const Vector& v, const Dims& dims,
                       std::span<const std::size_t> perm) {
  if (static_cast<std::size_t>(v.size()) != product(dims)) {
    throw LinalgError("permute_systems: shape mismatch");
  }
  const auto src = permutation_index(dims, perm);
  return v(src);
}

Matrix permute_systems(const Matrix& m, const Dims& row_dims,
                       std::span<const std::size_t> row_perm, const Dims& col_dims,
                       std::span<const std::size_t> col_perm) {
  if (static_cast<std::size_t>(m.rows()) != product(row_dims) ||
      static_cast<std::size_t>(m.cols()) != product(col_dims)) {
    throw LinalgError("permute_systems: shape mismatch");
  }
  return m(permutation_index(row_dims, row_perm), permutation_index(col_dims, col_perm));
}

Matrix partial_trace(const Matrix& m, const Dims& dims,
                     std::span<const std::size_t> keep) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != product(dims)) {
    throw LinalgError("partial_trace: shape mismatch");
  }
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw LinalgError("partial_trace: repeated subsystem index");
  }
  for (auto k : kept) {
    if (k >= dims.size()) throw LinalgError("partial_trace: invalid subsystem index");
  }
  std::vector<std::size_t> perm = kept;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!std::binary_search(kept.begin(), kept.end(), i)) perm.push_back(i);
  }
  std::size_t dk = 1;
  for (auto k : kept) dk *= dims[k];
  const std::size_t dt = product(dims) / dk;
  const Matrix p = permute_systems(m, dims, perm);
  Matrix r = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t t = 0; t < dt; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    const auto st = static_cast<Eigen::Index>(dt);
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, j) += p(i * st + ti, j * st + ti);
    }
  }
  return r;
}

bool is_hermitian(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return max_abs(h - h.adjoint()) <= tol * std::max(1.0, max_abs(h));
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Spectrum eigh(const Matrix& h) {
  if (!is_hermitian(h)) throw LinalgError("spectral: matrix not Hermitian");
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const auto n = static_cast<std::size_t>(sym.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ev(static_cast<Eigen::Index>(a)) > ev(static_cast<Eigen::Index>(b));
  });
  Spectrum s;
  s.values.resize(n);
  s.vectors.resize(sym.rows(), sym.cols());
  for (std::size_t k = 0; k < n; ++k) {
    const auto src = static_cast<Eigen::Index>(order[k]);
    s.values[k] = ev(src);
    s.vectors.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(src);
  }
  return s;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  Dims rd = a.row_dims();
  rd.insert(rd.end(), b.row_dims().begin(), b.row_dims().end());
  Dims cd = a.col_dims();
  cd.insert(cd.end(), b.col_dims().begin(), b.col_dims().end());
  return {kron(a.mat(), b.mat()), rd, cd};
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> keep) {
  if (m.row_dims() != m.col_dims()) throw LinalgError("partial_trace: non-square subsystems");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  Matrix r = partial_trace(m.mat(), m.row_dims(), kept);
  Dims d;
  for (auto k : kept) d.push_back(m.row_dims()[k]);
  return {std::move(r), d};
}

Spectrum spectral(const ComplexMatrix& h) { return eigh(h.mat()); }

SingularDecomposition svd(const ComplexMatrix& m) {
  Eigen::JacobiSVD<Matrix> js(m.mat(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularDecomposition r;
  const auto& sv = js.singularValues();
  r.values.assign(sv.data(), sv.data() + sv.size());
  r.left = js.matrixU();
  r.right = js.matrixV();
  return r;
}

Matrix psd_sqrt(const Matrix& p) {
  const Spectrum s = eigh(p);
  double scale = 1.0;
  for (double v : s.values) scale = std::max(scale, std::abs(v));
  Vector root(static_cast<Eigen::Index>(s.values.size()));
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (s.values[k] < -kTolExact * scale) throw LinalgError("psd_sqrt: matrix not positive");
    root(static_cast<Eigen::Index>(k)) = std::sqrt(std::max(s.values[k], 0.0));
  }
  return s.vectors * root.asDiagonal() * s.vectors.adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& p) {
  return {psd_sqrt(p.mat()), p.row_dims(), p.col_dims()};
}

ComplexMatrix weyl_operator(std::size_t d, std::size_t a, std::size_t b) {
  if (d == 0 || a >= d || b >= d) throw LinalgError("weyl_operator: index out of range");
  const double tau = 2.0 * std::numbers::pi / static_cast<double>(d);
  // X^a Z^b |j> = omega^{bj} |j + a mod d>
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    const double phase = tau * static_cast<double>((b * j) % d);
    w(static_cast<Eigen::Index>((j + a) % d), static_cast<Eigen::Index>(j)) = std::polar(1.0, phase);
  }
  return ComplexMatrix(std::move(w));
}

PureState purify(const DensityMatrix& rho) {
  const Spectrum s = eigh(rho.mat());
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Vector v = Vector::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double lam = s.values[static_cast<std::size_t>(k)];
    if (lam <= 0.0) continue;
    // sqrt(lam) |phi_k> (x) |k>
    for (Eigen::Index i = 0; i < d; ++i) v(i * d + k) += std::sqrt(lam) * s.vectors(i, k);
  }
  v /= v.norm();
  Dims dims = rho.dims();
  dims.insert(dims.end(), rho.dims().begin(), rho.dims().end());
  return {std::move(v), std::move(dims)};
}

SchmidtDecomposition schmidt(const PureState& psi, std::span<const std::size_t> cut) {
  const Dims& dims = psi.dims();
  std::vector<std::size_t> left(cut.begin(), cut.end());
  std::sort(left.begin(), left.end());
  if (left.empty() || left.size() >= dims.size() ||
      std::adjacent_find(left.begin(), left.end()) != left.end() || left.back() >= dims.size()) {
    throw LinalgError("schmidt: cut must be a nonempty proper subset");
  }
  std::vector<std::size_t> perm = left;
  SchmidtDecomposition r;
  for (auto k : left) r.left_dims.push_back(dims[k]);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!std::binary_search(left.begin(), left.end(), i)) {
      perm.push_back(i);
      r.right_dims.push_back(dims[i]);
    }
  }
  const Vector v = permute_systems(psi.amplitudes(), dims, perm);
  const auto dl = static_cast<Eigen::Index>(product(r.left_dims));
  const auto dr = static_cast<Eigen::Index>(product(r.right_dims));
  Matrix m(dl, dr);
  for (Eigen::Index a = 0; a < dl; ++a) {
    for (Eigen::Index b = 0; b < dr; ++b) m(a, b) = v(a * dr + b);
  }
  Eigen::JacobiSVD<Matrix> js(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = js.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-12) ++rank;
  r.coefficients.assign(sv.data(), sv.data() + rank);
  r.left = js.matrixU().leftCols(rank);
  r.right = js.matrixV().leftCols(rank).conjugate();
  return r;
}

}  // namespace qchan

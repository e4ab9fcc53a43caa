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

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qchan {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

inline constexpr double kTolExact = 1e-10;
// Largest Hilbert dimension any dense matrix operation accepts.
inline constexpr std::size_t kMaxDim = std::size_t{1} << 12;

class LinalgError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an operation would exceed kMaxDim or a compile cap.
class ResourceCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

std::size_t product(std::span<const std::size_t> dims);

// Dense complex matrix carrying the subsystem structure of its row and
// column spaces.
class ComplexMatrix {
 public:
  ComplexMatrix(Matrix m, Dims row_dims, Dims col_dims);
  ComplexMatrix(Matrix m, Dims dims);  // square with row_dims == col_dims
  explicit ComplexMatrix(Matrix m);    // single subsystem per side

  const Matrix& mat() const { return m_; }
  std::size_t rows() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(m_.cols()); }
  const Dims& row_dims() const { return row_dims_; }
  const Dims& col_dims() const { return col_dims_; }

 private:
  Matrix m_;
  Dims row_dims_;
  Dims col_dims_;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, positivity and unit trace within tol.
  DensityMatrix(Matrix m, Dims dims, double tol = kTolExact);
  explicit DensityMatrix(const ComplexMatrix& m, double tol = kTolExact);

  const Matrix& mat() const { return m_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  ComplexMatrix as_matrix() const { return {m_, dims_}; }

 private:
  Matrix m_;
  Dims dims_;
};

class PureState {
 public:
  PureState(Vector amplitudes, Dims dims, double tol = kTolExact);

  const Vector& amplitudes() const { return v_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(v_.size()); }
  DensityMatrix density() const;

 private:
  Vector v_;
  Dims dims_;
};

struct Spectrum {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
};

struct SingularDecomposition {
  std::vector<double> values;  // descending, nonnegative
  Matrix left;
  Matrix right;  // m == left * diag(values) * right.adjoint()
};

struct SchmidtDecomposition {
  std::vector<double> coefficients;  // positive, descending
  Matrix left;                       // columns on the cut subsystems
  Matrix right;                      // columns on the complement
  Dims left_dims;
  Dims right_dims;
};

// Raw kernels on Eigen matrices; the typed API below forwards to these.
Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(std::span<const Matrix> factors);
Matrix partial_trace(const Matrix& m, const Dims& dims,
                     std::span<const std::size_t> keep);
// Reorders tensor factors: factor k of the result is factor perm[k] of m.
Matrix permute_systems(const Matrix& m, const Dims& dims,
                       std::span<const std::size_t> perm);
Vector permute_systems(const Vector& v, const Dims& dims,
                       std::span<const std::size_t> perm);
// Rectangular variant: rows and columns are reordered independently.
Matrix permute_systems(const Matrix& m, const Dims& row_dims,
                       std::span<const std::size_t> row_perm, const Dims& col_dims,
                       std::span<const std::size_t> col_perm);
Spectrum eigh(const Matrix& h);
bool is_hermitian(const Matrix& h, double tol = kTolExact);
double max_abs(const Matrix& m);

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace(const ComplexMatrix& m,
                            std::span<const std::size_t> keep);
Spectrum spectral(const ComplexMatrix& h);
SingularDecomposition svd(const ComplexMatrix& m);
ComplexMatrix psd_sqrt(const ComplexMatrix& p);
Matrix psd_sqrt(const Matrix& p);
ComplexMatrix weyl_operator(std::size_t d, std::size_t a, std::size_t b);
PureState purify(const DensityMatrix& rho);
SchmidtDecomposition schmidt(const PureState& psi,
                             std::span<const std::size_t> cut);

}  // namespace qchan

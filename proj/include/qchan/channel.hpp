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
#include <utility>
#include <vector>

#include "qchan/linalg.hpp"

namespace qchan {

class ChannelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A linear map that can act with an untouched reference system attached.
// Operators on in (x) R are laid out with the map's system first.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual std::size_t in_dim() const = 0;
  virtual std::size_t out_dim() const = 0;
  // (map (x) id_R)(x)
  virtual Matrix apply(const Matrix& x, std::size_t ref_dim) const = 0;
  // (map^* (x) id_R)(y)
  virtual Matrix apply_adjoint(const Matrix& y, std::size_t ref_dim) const = 0;
};

// U maps in (x) anc onto out (x) env; the ancilla starts in |0>.
struct StinespringRep {
  Matrix unitary;
  Dims anc_dims;
  Dims env_dims;

  std::size_t anc_dim() const { return product(anc_dims); }
  std::size_t env_dim() const { return product(env_dims); }
};

struct MixedUnitaryStage {
  std::vector<double> probabilities;
  std::vector<Matrix> unitaries;
};

// A product of mixed-unitary stages applied first to last. A single stage is
// the plain form sum_i p_i U_i . U_i^*; several stages keep large mixtures
// (products of every term) from being expanded eagerly.
struct MixedUnitaryRep {
  std::vector<MixedUnitaryStage> stages;

  std::size_t term_count() const;
  // Term k of the expanded mixture: probability and unitary.
  std::pair<double, Matrix> term(std::size_t k) const;
  MixedUnitaryRep expanded() const;
};

class Channel : public LinearMap {
 public:
  static Channel from_kraus(std::vector<Matrix> kraus, Dims in_dims, Dims out_dims);
  static Channel from_choi(Matrix choi, Dims in_dims, Dims out_dims);
  static Channel from_stinespring(StinespringRep rep, Dims in_dims, Dims out_dims);
  // out_dims only refactors the output; its product must equal that of dims.
  static Channel from_mixed_unitary(MixedUnitaryRep rep, Dims dims, Dims out_dims = {});
  static Channel identity(Dims dims);
  static Channel unitary(const Matrix& u, Dims dims);

  const Dims& in_dims() const { return in_dims_; }
  const Dims& out_dims() const { return out_dims_; }
  std::size_t in_dim() const override { return product(in_dims_); }
  std::size_t out_dim() const override { return product(out_dims_); }

  // J = sum_ij Phi(|i><j|) (x) |i><j|, output factor first.
  const Matrix& choi() const { return choi_; }
  // Row-major vectorized action: vec(Phi(X)) = transfer * vec(X).
  const Matrix& transfer() const { return transfer_; }
  const std::optional<std::vector<Matrix>>& kraus() const { return kraus_; }
  const std::optional<StinespringRep>& stinespring() const { return stinespring_; }
  const std::optional<MixedUnitaryRep>& mixed_unitary() const { return mixed_unitary_; }

  DensityMatrix apply(const DensityMatrix& rho, const Dims& ref_dims = {}) const;
  Matrix apply(const Matrix& x, std::size_t ref_dim) const override;
  Matrix apply_adjoint(const Matrix& y, std::size_t ref_dim) const override;
  Matrix apply(const Matrix& x) const { return apply(x, 1); }

 private:
  Channel(Dims in_dims, Dims out_dims, Matrix choi);

  Dims in_dims_;
  Dims out_dims_;
  Matrix choi_;
  Matrix transfer_;
  std::optional<std::vector<Matrix>> kraus_;
  std::optional<StinespringRep> stinespring_;
  std::optional<MixedUnitaryRep> mixed_unitary_;
};

// Largest deviation from complete positivity and trace preservation.
double cptp_residual(const Channel& phi);
// Channel equality metric: max absolute Choi entry difference.
double choi_distance(const Channel& a, const Channel& b);

Channel kraus_from_stinespring(const Channel& phi);
Channel kraus_from_choi(const Channel& phi);
// Attaches a Stinespring rep built from the Kraus operators.
Channel dilate(const Channel& phi);
Channel complement(const Channel& phi);
// phi after psi.
Channel compose(const Channel& phi, const Channel& psi);
Channel tensor_channels(const Channel& phi, const Channel& psi);

Channel depolarizing_channel(std::size_t d);
Channel dephasing_channel(std::size_t d);
// Input is H (x) C1 (x) C2 with dim C1 == dim C2 == d, the output dim.
Channel controlled_weyl_channel(const Channel& phi);

struct DegradingCheck {
  bool ok;
  double residual;
};
DegradingCheck verify_degrading(const Channel& delta, const Channel& phi,
                                double tol = kTolExact);

}  // namespace qchan

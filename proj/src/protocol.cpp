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

#include "qchan/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qchan/random.hpp"

namespace qchan {

namespace {

using Idx = Eigen::Index;

void check_pair(const LinearMap& q1, const LinearMap& q2) {
  if (q1.in_dim() != q2.in_dim() || q1.out_dim() != q2.out_dim()) {
    throw ChannelError("protocol: the two channels have different dimensions");
  }
}

struct Outcome {
  double acceptance;
  double distance;
  Matrix accept_first;
};

// Outputs of both channels on the state, reference kept.
std::pair<Matrix, Matrix> outputs(const LinearMap& q1, const LinearMap& q2, const Vector& psi) {
  const std::size_t din = q1.in_dim();
  if (psi.size() == 0 || static_cast<std::size_t>(psi.size()) % din != 0) {
    throw ChannelError("protocol: state dimension is not a multiple of the input dimension");
  }
  const std::size_t ref = static_cast<std::size_t>(psi.size()) / din;
  const Matrix x = psi * psi.adjoint();
  return {q1.apply(x, ref), q2.apply(x, ref)};
}

double success(const Matrix& p1, const Matrix& out1, const Matrix& out2) {
  const Idx d = p1.rows();
  const Matrix p2 = Matrix::Identity(d, d) - p1;
  return 0.5 * (p1 * out1).trace().real() + 0.5 * (p2 * out2).trace().real();
}

Outcome helstrom_outcome(const LinearMap& q1, const LinearMap& q2, const Vector& psi) {
  const auto [o1, o2] = outputs(q1, q2, psi);
  const HelstromResult h = helstrom(o1, o2);
  return {success(h.accept_first, o1, o2), trace_norm(Matrix(o1 - o2)), h.accept_first};
}

// Input (x) reference states (U (x) I)(cos a |00> + sin a |11>), U sending |0>
// to the Bloch direction (theta, phi). Covers every two-qubit pure state up to
// a unitary on the reference, which no measurement result depends on.
Vector grid_state(double a, double theta, double phi) {
  const cplx e = std::polar(1.0, phi);
  const cplx u00 = std::cos(theta / 2.0), u10 = e * std::sin(theta / 2.0);
  const cplx u01 = -std::conj(u10), u11 = std::conj(u00);
  Vector v(4);
  // |i r>: index 2 i + r.
  v(0) = std::cos(a) * u00;
  v(2) = std::cos(a) * u10;
  v(1) = std::sin(a) * u01;
  v(3) = std::sin(a) * u11;
  return v;
}

}  // namespace

std::string to_string(ProverStrategy s) {
  switch (s) {
    case ProverStrategy::kHonest: return "honest";
    case ProverStrategy::kGrid: return "grid";
    case ProverStrategy::kFixed: return "fixed";
  }
  return "unknown";
}

ProverStrategy parse_strategy(std::string_view name) {
  if (name == "honest") return ProverStrategy::kHonest;
  if (name == "grid") return ProverStrategy::kGrid;
  if (name == "fixed") return ProverStrategy::kFixed;
  throw std::invalid_argument("unknown prover strategy: " + std::string(name));
}

ProtocolRun run_qcd_protocol(const LinearMap& q1, const LinearMap& q2, const ProverSpec& prover,
                             const OptimizerConfig& cfg, std::size_t trials) {
  check_pair(q1, q2);
  cfg.validate();
  ProtocolRun run;
  run.strategy = prover.kind;
  run.trials = trials;
  run.seed = cfg.seed;
  switch (prover.kind) {
    case ProverStrategy::kHonest: {
      const MeasureResult d = diamond_distance(q1, q2, cfg);
      run.state = d.witness.front().col(0);
      const Outcome o = helstrom_outcome(q1, q2, run.state);
      run.acceptance = o.acceptance;
      run.distance = d.value;
      run.accept_first = o.accept_first;
      break;
    }
    case ProverStrategy::kGrid: {
      if (q1.in_dim() != 2) throw ChannelError("protocol: the grid prover handles qubit inputs only");
      const std::size_t n = prover.resolution;
      if (n < 2) throw std::invalid_argument("protocol: grid resolution must be at least 2");
      run.resolution = n;
      run.acceptance = -1.0;
      const double step = 1.0 / static_cast<double>(n - 1);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t k = 0; k < n; ++k) {
            const Vector psi = grid_state(std::numbers::pi / 2.0 * step * static_cast<double>(i),
                                          std::numbers::pi * step * static_cast<double>(j),
                                          2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
            const Outcome o = helstrom_outcome(q1, q2, psi);
            // Strict comparison keeps the first grid point on ties.
            if (o.acceptance > run.acceptance) {
              run.acceptance = o.acceptance;
              run.distance = o.distance;
              run.state = psi;
              run.accept_first = o.accept_first;
            }
          }
        }
      }
      break;
    }
    case ProverStrategy::kFixed: {
      const Vector psi = prover.state / prover.state.norm();
      const auto [o1, o2] = outputs(q1, q2, psi);
      if (prover.accept_first.rows() != o1.rows() || prover.accept_first.cols() != o1.cols()) {
        throw ChannelError("protocol: measurement does not match the output dimension");
      }
      const Matrix p = prover.accept_first;
      if (max_abs(Matrix(p * p - p)) > 1e-8 || max_abs(Matrix(p - p.adjoint())) > 1e-8) {
        throw std::invalid_argument("protocol: fixed measurement is not a projector");
      }
      run.state = psi;
      run.accept_first = p;
      run.acceptance = success(p, o1, o2);
      run.distance = trace_norm(Matrix(o1 - o2));
      break;
    }
  }
  // Rounding can push a certain win a few ulps past 1.
  run.acceptance = std::clamp(run.acceptance, 0.0, 1.0);
  if (trials > 0) {
    const auto [o1, o2] = outputs(q1, q2, run.state);
    const double p1 = (run.accept_first * o1).trace().real();
    const double p2 = 1.0 - (run.accept_first * o2).trace().real();
    Rng rng(mix_seed(cfg.seed, 0x70726f746fULL));
    std::size_t wins = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const bool first = rng.uniform() < 0.5;
      wins += rng.uniform() < (first ? p1 : p2) ? 1 : 0;
    }
    run.sampled_acceptance = static_cast<double>(wins) / static_cast<double>(trials);
  }
  return run;
}

ProtocolRun run_qcd_protocol(const Circuit& q1, const Circuit& q2, const ProverSpec& prover,
                             const OptimizerConfig& cfg, std::size_t trials) {
  return run_qcd_protocol(to_channel(q1), to_channel(q2), prover, cfg, trials);
}

double ci_acceptance(const LinearMap& q1, const LinearMap& q2, const OptimizerConfig& cfg) {
  check_pair(q1, q2);
  const double f = max_output_fidelity(q1, q2, cfg).value;
  return f * f;
}

double ci_acceptance(const Circuit& q1, const Circuit& q2, const OptimizerConfig& cfg) {
  return ci_acceptance(to_channel(q1), to_channel(q2), cfg);
}

}  // namespace qchan

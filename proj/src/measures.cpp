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

#include "qchan/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "qchan/random.hpp"

namespace qchan {

namespace {

using Idx = Eigen::Index;

constexpr double kEntropyFloor = 1e-14;
// Regularizer for the inverse square root in the fidelity gradient.
constexpr double kFidelityFloor = 1e-14;
constexpr int kLineSearchSteps = 60;

Idx ix(std::size_t v) { return static_cast<Idx>(v); }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// Apply f to the eigenvalues of a Hermitian matrix.
Matrix spectral_map(const Matrix& h, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  Eigen::VectorXd vals = es.eigenvalues();
  for (Idx i = 0; i < vals.size(); ++i) vals(i) = f(vals(i));
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

Vector top_eigenvector(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  return es.eigenvectors().col(es.eigenvalues().size() - 1);
}

Vector bottom_eigenvector(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  return es.eigenvectors().col(0);
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

void check_maps(const LinearMap& a, const LinearMap& b, const char* what) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) {
    throw ChannelError(std::string(what) + ": channel dimensions differ");
  }
}

struct Attempt {
  double value;
  std::vector<Matrix> witness;
  std::vector<double> trace;
};

// Independent restarts, each with its own sub-seed; best by value, ties to
// the lowest restart index.
MeasureResult best_of(const OptimizerConfig& cfg, const std::function<Attempt(Rng&)>& run) {
  cfg.validate();
  MeasureResult out;
  out.seed = cfg.seed;
  out.value = -kInfinity;
  for (std::size_t k = 0; k < cfg.restarts; ++k) {
    Rng rng(mix_seed(cfg.seed, k));
    Attempt a = run(rng);
    if (a.value > out.value) {
      out.value = a.value;
      out.witness = a.witness;
      out.best_restart = k;
    }
    out.iterations.push_back(std::move(a.trace));
  }
  return out;
}

bool converged(double prev, double next, double tol) {
  return std::abs(next - prev) <= tol * std::max(1.0, std::abs(prev));
}

// Generic ascent: eval(state) gives the objective, step(state) proposes the
// next state. Stops on convergence or if a proposal does not improve.
template <class State, class Eval, class Step>
Attempt ascend(State s, const OptimizerConfig& cfg, Eval eval, Step step,
               const std::function<std::vector<Matrix>(const State&)>& witness) {
  double f = eval(s);
  std::vector<double> trace{f};
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    State n = step(s);
    const double g = eval(n);
    if (!(g >= f)) break;  // roundoff-level decrease: keep the better point
    s = std::move(n);
    const bool done = converged(f, g, cfg.conv_tol);
    f = g;
    trace.push_back(f);
    if (done) break;
  }
  return {f, witness(s), std::move(trace)};
}

// Maximizes a concave function on [0, 1].
double golden_max(const std::function<double(double)>& h) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = h(c), fd = h(d);
  for (int i = 0; i < kLineSearchSteps; ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = h(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = h(c);
    }
  }
  const double mid = 0.5 * (a + b);
  double best = mid, fbest = h(mid);
  for (double e : {0.0, 1.0}) {
    const double fe = h(e);
    if (fe > fbest) {
      best = e;
      fbest = fe;
    }
  }
  return best;
}

// Gradient of X -> F(X, Y) = tr sqrt(sqrt(Y) X sqrt(Y)).
Matrix fidelity_gradient(const Matrix& x, const Matrix& y) {
  const Matrix ry = psd_sqrt(Matrix(hermitian_part(y)));
  const Matrix inner = ry * hermitian_part(x) * ry;
  const Matrix inv_sqrt = spectral_map(inner, [](double l) { return 1.0 / std::sqrt(std::max(l, kFidelityFloor)); });
  return 0.5 * ry * inv_sqrt * ry;
}

Matrix clip_psd(const Matrix& m) {
  return spectral_map(m, [](double l) { return std::max(l, 0.0); });
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 1 || max_iters < 1 || !(conv_tol > 0.0)) {
    throw std::invalid_argument("optimizer config needs restarts >= 1, max_iters >= 1, conv_tol > 0");
  }
}

// ---------------------------------------------------------------- norms

double trace_norm(const Matrix& m) { return schatten_norm(m, 1.0); }
double trace_norm(const ComplexMatrix& m) { return trace_norm(m.mat()); }

double schatten_norm(const Matrix& m, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("schatten_norm: p must be >= 1");
  const auto s = svd(ComplexMatrix(m)).values;
  if (s.empty()) return 0.0;
  if (std::isinf(p)) return s.front();
  if (p == 1.0) {
    double t = 0.0;
    for (double v : s) t += v;
    return t;
  }
  // scale by the largest value to avoid overflow for large p
  const double top = s.front();
  if (top == 0.0) return 0.0;
  double t = 0.0;
  for (double v : s) t += std::pow(v / top, p);
  return top * std::pow(t, 1.0 / p);
}

double schatten_norm(const ComplexMatrix& m, double p) { return schatten_norm(m.mat(), p); }

double fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  const Matrix r = psd_sqrt(clip_psd(rho));
  const Matrix inner = r * hermitian_part(sigma) * r;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(inner), Eigen::EigenvaluesOnly);
  double f = 0.0;
  for (Idx i = 0; i < es.eigenvalues().size(); ++i) f += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) throw std::invalid_argument("fidelity: dimension mismatch");
  return fidelity(rho.mat(), sigma.mat());
}

HelstromResult helstrom(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows()) throw std::invalid_argument("helstrom: dimension mismatch");
  const Spectrum s = eigh(Matrix(rho - sigma));
  const Idx d = rho.rows();
  Matrix plus = Matrix::Zero(d, d);
  double tn = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    tn += std::abs(s.values[k]);
    if (s.values[k] > 0.0) plus += projector(s.vectors.col(ix(k)));
  }
  Matrix minus = Matrix::Identity(d, d) - plus;
  return {0.5 + 0.25 * tn, std::move(plus), std::move(minus)};
}

HelstromResult helstrom(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) throw std::invalid_argument("helstrom: dimension mismatch");
  return helstrom(rho.mat(), sigma.mat());
}

double von_neumann_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Idx i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > kEntropyFloor) s -= l * std::log2(l);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.mat()); }

double renyi_entropy(const Matrix& rho, double p) {
  if (!(p >= 1.0) || p == 1.0) throw std::invalid_argument("renyi_entropy: need p >= 1 and p != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  if (std::isinf(p)) return -std::log2(v.maxCoeff());
  double t = 0.0;
  for (Idx i = 0; i < v.size(); ++i) {
    if (v(i) > kEntropyFloor) t += std::pow(v(i), p);
  }
  return std::log2(t) / (1.0 - p);
}

double renyi_entropy(const DensityMatrix& rho, double p) { return renyi_entropy(rho.mat(), p); }

// ----------------------------------------------------------- optimizers

MeasureResult min_output_entropy(const LinearMap& phi, const OptimizerConfig& cfg) {
  const std::size_t din = phi.in_dim();
  auto eval = [&](const Vector& psi) { return -von_neumann_entropy(phi.apply(projector(psi), 1)); };
  // Klein: S(out(psi')) <= -tr out(psi') log out(psi), minimized by the
  // bottom eigenvector of the pulled-back -log.
  auto step = [&](const Vector& psi) -> Vector {
    const Matrix out = phi.apply(projector(psi), 1);
    const Matrix neg_log = spectral_map(out, [](double l) { return -std::log(std::max(l, kEntropyFloor)); });
    return bottom_eigenvector(phi.apply_adjoint(neg_log, 1));
  };
  auto wit = [](const Vector& psi) { return std::vector<Matrix>{Matrix(psi)}; };
  MeasureResult r = best_of(cfg, [&](Rng& rng) {
    return ascend<Vector>(random_unit_vector(din, rng), cfg, eval, step, wit);
  });
  r.value = -r.value;
  return r;
}

MeasureResult max_output_p_norm(const LinearMap& phi, double p, const OptimizerConfig& cfg) {
  if (!(p >= 1.0)) throw std::invalid_argument("max_output_p_norm: p must be >= 1");
  const std::size_t din = phi.in_dim();
  auto eval = [&](const Vector& psi) { return schatten_norm(phi.apply(projector(psi), 1), p); };
  auto step = [&](const Vector& psi) -> Vector {
    const Matrix out = hermitian_part(phi.apply(projector(psi), 1));
    Matrix grad;
    if (std::isinf(p)) {
      grad = projector(top_eigenvector(out));
    } else {
      const double norm = schatten_norm(out, p);
      grad = spectral_map(out, [&](double l) { return std::pow(std::max(l, 0.0) / norm, p - 1.0); });
    }
    return top_eigenvector(phi.apply_adjoint(grad, 1));
  };
  auto wit = [](const Vector& psi) { return std::vector<Matrix>{Matrix(psi)}; };
  return best_of(cfg, [&](Rng& rng) {
    return ascend<Vector>(random_unit_vector(din, rng), cfg, eval, step, wit);
  });
}

MeasureResult max_output_fidelity(const LinearMap& phi1, const LinearMap& phi2, const OptimizerConfig& cfg) {
  if (phi1.out_dim() != phi2.out_dim()) throw ChannelError("max_output_fidelity: output dimensions differ");
  using Pair = std::pair<Matrix, Matrix>;
  auto eval = [&](const Pair& s) { return fidelity(phi1.apply(s.first, 1), phi2.apply(s.second, 1)); };
  // Frank-Wolfe on each argument in turn; F is jointly concave, so exact
  // line search never lowers the objective.
  auto fw = [](const LinearMap& own, const Matrix& x, const Matrix& other_out) -> Matrix {
    const Matrix out = own.apply(x, 1);
    const Vector s = top_eigenvector(own.apply_adjoint(fidelity_gradient(out, other_out), 1));
    const Matrix dir = projector(s) - x;
    const Matrix dir_out = own.apply(dir, 1);
    const double g = golden_max([&](double t) { return fidelity(out + t * dir_out, other_out); });
    return x + g * dir;
  };
  auto step = [&](const Pair& s) -> Pair {
    const Matrix rho = fw(phi1, s.first, phi2.apply(s.second, 1));
    const Matrix sigma = fw(phi2, s.second, phi1.apply(rho, 1));
    return {rho, sigma};
  };
  auto wit = [](const Pair& s) { return std::vector<Matrix>{s.first, s.second}; };
  return best_of(cfg, [&](Rng& rng) {
    Pair start{projector(random_unit_vector(phi1.in_dim(), rng)), projector(random_unit_vector(phi2.in_dim(), rng))};
    return ascend<Pair>(start, cfg, eval, step, wit);
  });
}

MeasureResult diamond_distance(const LinearMap& phi1, const LinearMap& phi2, const OptimizerConfig& cfg) {
  check_maps(phi1, phi2, "diamond_distance");
  const std::size_t din = phi1.in_dim();
  const std::size_t ref = cfg.ref_dim == 0 ? din : cfg.ref_dim;
  auto diff = [&](const Vector& psi) {
    const Matrix x = projector(psi);
    return Matrix(phi1.apply(x, ref) - phi2.apply(x, ref));
  };
  auto eval = [&](const Vector& psi) { return trace_norm(Matrix(hermitian_part(diff(psi)))); };
  auto step = [&](const Vector& psi) -> Vector {
    const Matrix sign = spectral_map(diff(psi), [](double l) { return l > 0.0 ? 1.0 : (l < 0.0 ? -1.0 : 0.0); });
    return top_eigenvector(phi1.apply_adjoint(sign, ref) - phi2.apply_adjoint(sign, ref));
  };
  auto wit = [](const Vector& psi) { return std::vector<Matrix>{Matrix(psi)}; };
  return best_of(cfg, [&](Rng& rng) {
    return ascend<Vector>(random_unit_vector(din * ref, rng), cfg, eval, step, wit);
  });
}

double diamond_unitary_oracle(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.rows() != u.cols() || v.rows() != v.cols()) {
    throw std::invalid_argument("diamond_unitary_oracle: shape mismatch");
  }
  const Idx d = u.rows();
  const Matrix id = Matrix::Identity(d, d);
  if (max_abs(u.adjoint() * u - id) > 1e-9 || max_abs(v.adjoint() * v - id) > 1e-9) {
    throw std::invalid_argument("diamond_unitary_oracle: input not unitary");
  }
  Eigen::ComplexEigenSolver<Matrix> es(u.adjoint() * v, false);
  std::vector<double> angles;
  for (Idx i = 0; i < d; ++i) angles.push_back(std::arg(es.eigenvalues()(i)));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  // The eigenvalues fit in an arc of length 2pi - gap; past a half circle
  // their hull contains the origin.
  const double spread = 2.0 * std::numbers::pi - gap;
  if (spread >= std::numbers::pi) return 2.0;
  return 2.0 * std::sin(spread / 2.0);
}

MeasureResult fmax_via_dnorm_crosscheck(const Channel& phi1, const Channel& phi2, const OptimizerConfig& cfg) {
  if (phi1.in_dim() != phi2.in_dim() || phi1.out_dim() != phi2.out_dim()) {
    throw ChannelError("fmax_via_dnorm_crosscheck: channel dimensions differ");
  }
  auto kraus_of = [](const Channel& c) {
    if (c.stinespring()) return *kraus_from_stinespring(c).kraus();
    return c.kraus() ? *c.kraus() : *kraus_from_choi(c).kraus();
  };
  const auto a = kraus_of(phi1);
  const auto b = kraus_of(phi2);
  const std::size_t din = phi1.in_dim();
  const std::size_t ref = cfg.ref_dim == 0 ? din : cfg.ref_dim;
  const Idx r = ix(ref);
  std::vector<Matrix> cross;  // B_l^* A_k at index k * |b| + l
  for (const auto& ak : a) {
    for (const auto& bl : b) cross.push_back(bl.adjoint() * ak);
  }
  auto reshape = [&](const Vector& v) {
    Matrix m(ix(din), r);
    for (Idx h = 0; h < ix(din); ++h) {
      for (Idx j = 0; j < r; ++j) m(h, j) = v(h * r + j);
    }
    return m;
  };
  using Pair = std::pair<Vector, Vector>;
  auto image = [&](const Pair& s) {
    const Matrix uu = reshape(s.first), vv = reshape(s.second);
    Matrix y(ix(a.size()) * r, ix(b.size()) * r);
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (std::size_t l = 0; l < b.size(); ++l) {
        y.block(ix(k) * r, ix(l) * r, r, r) = (vv.adjoint() * cross[k * b.size() + l] * uu).transpose();
      }
    }
    return y;
  };
  auto eval = [&](const Pair& s) { return trace_norm(image(s)); };
  auto step = [&](const Pair& s) -> Pair {
    const Matrix y = image(s);
    Eigen::JacobiSVD<Matrix> sv(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix w = sv.matrixU() * sv.matrixV().adjoint();
    Matrix g = Matrix::Zero(ix(din) * r, ix(din) * r);
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (std::size_t l = 0; l < b.size(); ++l) {
        g += kron(cross[k * b.size() + l], Matrix(w.block(ix(k) * r, ix(l) * r, r, r).adjoint()));
      }
    }
    Eigen::JacobiSVD<Matrix> gs(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {gs.matrixV().col(0), gs.matrixU().col(0)};
  };
  auto wit = [](const Pair& s) { return std::vector<Matrix>{Matrix(s.first), Matrix(s.second)}; };
  return best_of(cfg, [&](Rng& rng) {
    Pair start{random_unit_vector(din * ref, rng), random_unit_vector(din * ref, rng)};
    return ascend<Pair>(start, cfg, eval, step, wit);
  });
}

}  // namespace qchan

// Copyright 2026 The QKFE Authors
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

#include "qkfe/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "qkfe/errors.hpp"

namespace qkfe {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(mix64(seed)); }

// out = (2 H - 1) in
void apply_chebyshev_arg(const SparseOperator& h, const StateVector& in,
                         StateVector& out) {
  h.apply({in.data(), static_cast<std::size_t>(in.size())},
          {out.data(), static_cast<std::size_t>(out.size())});
  out = 2.0 * out - in;
}

// psi <- sum_k coeffs[k] T_k(2H - 1) psi
void chebyshev_apply(StateVector& psi, const SparseOperator& h,
                     const std::vector<cplx>& coeffs) {
  StateVector t_prev = psi;
  StateVector result = coeffs[0] * psi;
  if (coeffs.size() == 1) {
    psi = result;
    return;
  }
  StateVector t_cur(psi.size());
  apply_chebyshev_arg(h, t_prev, t_cur);
  result += coeffs[1] * t_cur;
  StateVector t_next(psi.size());
  for (std::size_t k = 2; k < coeffs.size(); ++k) {
    apply_chebyshev_arg(h, t_cur, t_next);
    t_next = 2.0 * t_next - t_prev;
    result += coeffs[k] * t_next;
    std::swap(t_prev, t_cur);
    std::swap(t_cur, t_next);
  }
  psi = std::move(result);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b) {
  return mix64(mix64(mix64(master) ^ (a + 0x632be59bd9b4e019ULL)) ^
               (b + 0x8cb92ba72f3d8dd7ULL));
}

Eigen::VectorXd SpectrumDecomposition::rescaled(const Rescaling& r) const {
  return ((eigenvalues.array() - r.offset()) / r.width()).matrix();
}

SpectrumDecomposition eigendecompose(const SparseOperator& hamiltonian,
                                     int max_qubits) {
  if (hamiltonian.num_qubits() > max_qubits) {
    throw CapacityError("eigendecomposition of " +
                        std::to_string(hamiltonian.num_qubits()) +
                        " qubits exceeds oracle_max_qubits = " +
                        std::to_string(max_qubits));
  }
  if (!hamiltonian.hermitian()) {
    throw InvalidArgument("eigendecomposition needs a hermitian operator");
  }
  SpectrumDecomposition out;
  out.fingerprint = hamiltonian.fingerprint();
  const Eigen::MatrixXcd dense = hamiltonian.to_dense();
  if (hamiltonian.real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense.real());
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
  }
  return out;
}

void evolve_inplace(StateVector& psi, const SparseOperator& hamiltonian,
                    double theta, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("evolve tolerance must be positive");
  if (static_cast<std::uint64_t>(psi.size()) != hamiltonian.dimension()) {
    throw InvalidArgument("state and operator dimensions differ");
  }
  if (theta == 0.0) return;
  const int substeps =
      std::max(1, static_cast<int>(std::ceil(std::abs(theta) / (kPi / 2) - 1e-12)));
  const double step = theta / substeps;
  const double per_step_tol = tol / substeps;

  // e^{-i s H} = e^{-i s/2} sum_k (2 - delta_k0) (-i)^k J_k(s/2) T_k(2H - 1)
  const double a = step / 2.0;
  const cplx phase = std::exp(cplx(0.0, -a));
  static constexpr cplx kMinusIPow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  std::vector<cplx> coeffs;
  constexpr int kMaxTerms = 64;
  for (int k = 0;; ++k) {
    if (k >= kMaxTerms) {
      throw ConvergenceError("Chebyshev evolution did not converge within " +
                             std::to_string(kMaxTerms) + " terms");
    }
    const double jk = std::cyl_bessel_j(static_cast<double>(k), std::abs(a));
    // J_k(-x) = (-1)^k J_k(x)
    const double signed_jk = (a < 0 && (k % 2)) ? -jk : jk;
    coeffs.push_back(phase * (k == 0 ? 1.0 : 2.0) * kMinusIPow[k % 4] * signed_jk);
    if (k > std::abs(a) && 2.0 * std::abs(jk) < 0.1 * per_step_tol) break;
  }
  for (int s = 0; s < substeps; ++s) chebyshev_apply(psi, hamiltonian, coeffs);
}

StateVector evolve(const StateVector& psi, const SparseOperator& hamiltonian,
                   double theta, double tol) {
  StateVector out = psi;
  evolve_inplace(out, hamiltonian, theta, tol);
  return out;
}

Eigen::MatrixXcd haar_unitary(int dimension, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd z(dimension, dimension);
  for (int j = 0; j < dimension; ++j) {
    for (int i = 0; i < dimension; ++i) z(i, j) = {gauss(rng), gauss(rng)};
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is exactly Haar.
  for (int j = 0; j < dimension; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : cplx{1.0});
  }
  return q;
}

void apply_local(StateVector& psi, const Eigen::MatrixXcd& u,
                 std::span<const int> qubits) {
  const int k = static_cast<int>(qubits.size());
  const auto local_dim = std::int64_t{1} << k;
  if (u.rows() != local_dim || u.cols() != local_dim) {
    throw InvalidArgument("local matrix size does not match its support");
  }
  std::uint64_t mask = 0;
  for (int q : qubits) mask |= std::uint64_t{1} << q;
  const auto dim = static_cast<std::uint64_t>(psi.size());
  std::vector<std::uint64_t> offsets(static_cast<std::size_t>(local_dim));
  for (std::int64_t m = 0; m < local_dim; ++m) {
    std::uint64_t off = 0;
    for (int b = 0; b < k; ++b) {
      if ((m >> b) & 1) off |= std::uint64_t{1} << qubits[static_cast<std::size_t>(b)];
    }
    offsets[static_cast<std::size_t>(m)] = off;
  }
  Eigen::VectorXcd local(local_dim);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::int64_t m = 0; m < local_dim; ++m) local(m) = psi(static_cast<Eigen::Index>(base | offsets[static_cast<std::size_t>(m)]));
    const Eigen::VectorXcd out = u * local;
    for (std::int64_t m = 0; m < local_dim; ++m) psi(static_cast<Eigen::Index>(base | offsets[static_cast<std::size_t>(m)])) = out(m);
  }
}

StateVector random_state(int num_qubits, RandomStateMode mode,
                         std::uint64_t seed) {
  if (num_qubits < 1 || num_qubits > 40) {
    throw InvalidArgument("random_state qubit count out of range");
  }
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << num_qubits);
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  if (mode.kind == RandomStateMode::Kind::gaussian_haar) {
    StateVector psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) psi(i) = {gauss(rng), gauss(rng)};
    psi.normalize();
    return psi;
  }
  if (mode.depth < 0) throw InvalidArgument("scrambling depth must be >= 0");
  StateVector psi = StateVector::Ones(1);
  for (int q = 0; q < num_qubits; ++q) {
    Eigen::Vector2cd single(cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng)));
    single.normalize();
    // qubit q is the next most significant bit
    StateVector next(psi.size() * 2);
    next.head(psi.size()) = single(0) * psi;
    next.tail(psi.size()) = single(1) * psi;
    psi = std::move(next);
  }
  for (int layer = 0; layer < mode.depth; ++layer) {
    for (int q = layer % 2; q + 1 < num_qubits; q += 2) {
      const int pair[2] = {q, q + 1};
      apply_local(psi, haar_unitary(4, derive_seed(seed, layer + 1, q)), pair);
    }
  }
  return psi;
}

GibbsEnsemble gibbs_ensemble(const SpectrumDecomposition& spectrum,
                             double beta, const Rescaling& rescaling) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  const Eigen::VectorXd& e = spectrum.eigenvalues;
  const Eigen::Index d = e.size();
  GibbsEnsemble g;
  g.beta = beta;
  g.weights.resize(d);
  if (std::isinf(beta)) {
    const double tol = 1e-9 * std::max({1.0, std::abs(e(0)), rescaling.e_width});
    for (Eigen::Index i = 0; i < d; ++i) g.weights(i) = (e(i) - e(0) <= tol) ? 1.0 : 0.0;
  } else {
    for (Eigen::Index i = 0; i < d; ++i) g.weights(i) = std::exp(-beta * (e(i) - e(0)));
  }
  g.weights /= g.weights.sum();
  const Eigen::VectorXd eps = spectrum.rescaled(rescaling);
  g.eps_star = g.weights.dot(eps);
  const double var = g.weights.dot((eps.array() - g.eps_star).square().matrix());
  g.sigma_eps = std::sqrt(std::max(0.0, var));
  return g;
}

ExactThermo exact_thermo(const SpectrumDecomposition& spectrum, double beta) {
  const Eigen::VectorXd& e = spectrum.eigenvalues;
  ExactThermo t;
  if (beta == 0.0) {
    t.log_z = std::log(static_cast<double>(e.size()));
    t.energy = e.mean();
    t.free_energy = std::numeric_limits<double>::quiet_NaN();
    t.entropy = t.log_z;
    return t;
  }
  const Eigen::ArrayXd w = (-beta * (e.array() - e(0))).exp();
  const double sum = w.sum();
  t.log_z = -beta * e(0) + std::log(sum);
  t.energy = (w * e.array()).sum() / sum;
  t.free_energy = -t.log_z / beta;
  t.entropy = beta * t.energy + t.log_z;
  return t;
}

ThermalPureSample thermal_pure_sample(const SpectrumDecomposition& spectrum,
                                      double beta, std::uint64_t seed) {
  if (!(beta >= 0.0) || std::isinf(beta)) {
    throw InvalidArgument("thermal pure state needs finite beta >= 0");
  }
  const int L = std::countr_zero(spectrum.dimension());
  const StateVector r = random_state(L, RandomStateMode::haar(), seed);
  Eigen::VectorXcd coeffs = spectrum.eigenvectors.adjoint() * r;
  const Eigen::VectorXd& e = spectrum.eigenvalues;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    coeffs(i) *= std::exp(-0.5 * beta * (e(i) - e(0)));
  }
  ThermalPureSample out;
  const double norm = coeffs.norm();
  out.log_norm = std::log(norm) - 0.5 * beta * e(0);
  out.state = spectrum.eigenvectors * (coeffs / norm);
  return out;
}

ThermalPureSample thermal_pure_sample(const RescaledOperator& hamiltonian,
                                      double beta, std::uint64_t seed) {
  if (!(beta >= 0.0) || std::isinf(beta)) {
    throw InvalidArgument("thermal pure state needs finite beta >= 0");
  }
  const SparseOperator& h = hamiltonian.op;
  const StateVector r = random_state(h.num_qubits(), RandomStateMode::haar(), seed);
  // exp(-beta H / 2) = exp(-beta offset / 2) exp(-b Hr), b = beta W / 2, and
  // exp(-b x) = sum_k (2 - delta_k0) (-1)^k e^{-a} I_k(a) T_k(2x - 1), a = b/2.
  const double a = 0.25 * beta * hamiltonian.rescaling.width();
  if (a > 700.0) {
    throw RangeError("beta * E_w too large for the thermal filter (beta = " +
                     std::to_string(beta) + ")");
  }
  std::vector<cplx> coeffs;
  constexpr int kMaxTerms = 20000;
  for (int k = 0;; ++k) {
    if (k >= kMaxTerms) throw ConvergenceError("thermal filter did not converge");
    const double ik = (a == 0.0) ? (k == 0 ? 1.0 : 0.0)
                                 : std::cyl_bessel_i(static_cast<double>(k), a) * std::exp(-a);
    coeffs.emplace_back((k == 0 ? 1.0 : 2.0) * ((k % 2) ? -ik : ik), 0.0);
    if (k > a && ik < 1e-17) break;
  }
  StateVector psi = r;
  chebyshev_apply(psi, h, coeffs);
  ThermalPureSample out;
  const double norm = psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw RangeError("thermal filter underflowed");
  }
  out.log_norm = std::log(norm) - 0.5 * beta * hamiltonian.rescaling.offset();
  out.state = psi / norm;
  return out;
}

double expectation(const SparseOperator& op, const StateVector& psi) {
  StateVector out(psi.size());
  op.apply({psi.data(), static_cast<std::size_t>(psi.size())},
           {out.data(), static_cast<std::size_t>(out.size())});
  return psi.dot(out).real();
}

}  // namespace qkfe

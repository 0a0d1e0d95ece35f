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

#include "qkfe/trotter.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qkfe/engine.hpp"
#include "qkfe/errors.hpp"

namespace qkfe {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_distinct(int control, int q1, int q2) {
  if (control < 0 || q1 < 0 || q2 < 0) throw InvalidArgument("negative qubit index");
  if (control == q1 || control == q2 || q1 == q2) {
    throw InvalidArgument("controlled two-body gate needs three distinct qubits");
  }
}

int max_qubit(const std::vector<Gate>& gates) {
  int m = -1;
  for (const auto& g : gates) {
    for (int q : g.qubits) m = std::max(m, q);
  }
  return m + 1;
}

}  // namespace

std::int64_t Circuit::two_qubit_count() const {
  std::int64_t c = 0;
  for (const auto& g : gates) c += g.two_qubit() ? 1 : 0;
  return c;
}

std::int64_t Circuit::single_qubit_count() const {
  return static_cast<std::int64_t>(gates.size()) - two_qubit_count();
}

void append_controlled_pauli_rotation(std::vector<Gate>& out, const PauliTerm& term,
                                      double theta, int control) {
  for (const auto& f : term.factors) {
    if (f.site == control) throw InvalidArgument("control qubit inside the Pauli string");
  }
  if (term.factors.empty()) {
    // exp(-i theta) on the |1> branch only
    out.push_back(gates::phase(control, -theta));
    return;
  }
  // exp(-i theta P (1 - Zc)/2) = exp(-i theta/2 P) exp(+i theta/2 Zc P)
  append_pauli_rotation(out, term, 0.5 * theta);
  PauliTerm with_control = term;
  with_control.factors.insert(with_control.factors.begin(), PauliFactor{control, Axis::Z});
  append_pauli_rotation(out, with_control, -0.5 * theta);
}

Circuit controlled_zz(double theta, int control, int q1, int q2) {
  check_distinct(control, q1, q2);
  Circuit c;
  append_controlled_pauli_rotation(c.gates, PauliTerm{1.0, {{q1, Axis::Z}, {q2, Axis::Z}}},
                                   theta, control);
  c.num_qubits = max_qubit(c.gates);
  return c;
}

Circuit controlled_xx_yy(double theta, PairAxis axis, int control, int q1, int q2) {
  check_distinct(control, q1, q2);
  if (axis == PairAxis::ZZ) return controlled_zz(theta, control, q1, q2);
  const Axis a = axis == PairAxis::XX ? Axis::X : Axis::Y;
  Circuit c;
  append_controlled_pauli_rotation(c.gates, PauliTerm{1.0, {{q1, a}, {q2, a}}}, theta,
                                   control);
  c.num_qubits = max_qubit(c.gates);
  return c;
}

std::int64_t trotter_steps(int n, double dt) {
  if (n < 1) throw InvalidArgument("moment index n must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("Trotter step must be positive");
  const double exact = n * kPi / dt;
  // Tolerate round-off so divisible inputs hit the exact integer.
  return static_cast<std::int64_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
}

Circuit trotterized_controlled_evolution(const HamiltonianTerms& hamiltonian,
                                         const Rescaling& rescaling, int n, double dt) {
  const std::int64_t steps = trotter_steps(n, dt);
  const double step = n * kPi / static_cast<double>(steps);
  const int L = hamiltonian.num_qubits();
  const double w = rescaling.width();
  // Hr = (H - offset)/w, so the offset is one more identity term.
  std::vector<PauliTerm> terms(hamiltonian.terms().begin(), hamiltonian.terms().end());
  terms.push_back(PauliTerm{-rescaling.offset(), {}});

  Circuit c;
  c.num_qubits = L + 1;
  for (std::int64_t s = 0; s < steps; ++s) {
    double identity_angle = 0.0;
    for (const auto& t : terms) {
      if (t.is_identity()) {
        identity_angle += step * t.coefficient / w;
        continue;
      }
      append_controlled_pauli_rotation(c.gates, t, step * t.coefficient / w, L);
    }
    if (identity_angle != 0.0) c.gates.push_back(gates::phase(L, -identity_angle));
  }
  return c;
}

std::int64_t gate_count(int length, int n, double dt) {
  if (length < 2) throw InvalidArgument("gate count needs L >= 2");
  return 15 * static_cast<std::int64_t>(length - 1) * trotter_steps(n, dt);
}

Eigen::MatrixXcd exact_controlled_evolution(const SparseOperator& rescaled_h, double theta) {
  const auto spec = eigendecompose(rescaled_h, 12);
  const Eigen::Index d = spec.eigenvalues.size();
  Eigen::VectorXcd phases(d);
  for (Eigen::Index i = 0; i < d; ++i) phases(i) = std::exp(cplx(0.0, -theta * spec.eigenvalues(i)));
  const Eigen::MatrixXcd u = spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  out.topLeftCorner(d, d).setIdentity();
  out.bottomRightCorner(d, d) = u;
  return out;
}

double operator_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("operator distance needs equal shapes");
  }
  const Eigen::MatrixXcd m = b.adjoint() * a;
  const auto id = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  const bool unitary = a.rows() == a.cols() && (m.adjoint() * m - id).norm() < 1e-9 &&
                       (b.adjoint() * b - id).norm() < 1e-9;
  if (unitary) {
    // ||a - e^{i phi} b|| = max_k |lambda_k - e^{i phi}| over the eigenphases
    // of b^dag a; the best phase sits mid-way across the smallest arc that
    // holds them all.
    const Eigen::VectorXcd lambda = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m, false).eigenvalues();
    std::vector<double> angles(static_cast<std::size_t>(lambda.size()));
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      angles[static_cast<std::size_t>(k)] = std::arg(lambda(k));
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2.0 * kPi - angles.back();
    for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
    const double span = 2.0 * kPi - gap;
    return 2.0 * std::sin(span / 4.0);
  }
  const cplx overlap = m.trace();
  const cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx{1.0};
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a - phase * b);
  return svd.singularValues()(0);
}

}  // namespace qkfe

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

#include "qkfe/prep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qkfe/errors.hpp"

namespace qkfe {

double disturbance_bound(const HamiltonianTerms& hamiltonian, const Gate& gate) {
  for (int q : gate.qubits) {
    if (q < 0 || q >= hamiltonian.num_qubits()) {
      throw InvalidArgument("gate support outside the Hamiltonian's qubits");
    }
  }
  double bound = 0.0;
  for (const auto& term : hamiltonian.terms()) {
    const bool meets = std::any_of(gate.qubits.begin(), gate.qubits.end(),
                                   [&](int q) { return term.acts_on(q); });
    if (meets) bound += std::ldexp(std::abs(term.coefficient), static_cast<int>(term.weight()) + 1);
  }
  return bound;
}

EnergyTrajectory trajectory(const StateVector& initial, std::span<const Gate> gate_list,
                            const HamiltonianTerms& hamiltonian) {
  const SparseOperator h = to_sparse(hamiltonian);
  if (static_cast<std::uint64_t>(initial.size()) != h.dimension()) {
    throw InvalidArgument("initial state and Hamiltonian dimensions differ");
  }
  EnergyTrajectory traj;
  StateVector psi = initial;
  traj.energies.push_back(expectation(h, psi));
  for (std::size_t p = 0; p < gate_list.size(); ++p) {
    const double bound = disturbance_bound(hamiltonian, gate_list[p]);
    apply_gate(psi, gate_list[p]);
    const double e = expectation(h, psi);
    const double delta = std::abs(e - traj.energies.back());
    if (delta > bound * (1.0 + 1e-12) + 1e-12) {
      throw std::logic_error("energy disturbance bound violated at gate " +
                             std::to_string(p + 1) + ": |dE| = " + std::to_string(delta) +
                             " > " + std::to_string(bound));
    }
    traj.bounds.push_back(bound);
    traj.energies.push_back(e);
  }
  return traj;
}

int select_step(const EnergyTrajectory& traj, double target_energy) {
  if (traj.energies.empty()) throw InvalidArgument("empty trajectory");
  const auto [lo, hi] = std::minmax_element(traj.energies.begin(), traj.energies.end());
  if (target_energy < *lo || target_energy > *hi) {
    throw RangeError("target energy " + std::to_string(target_energy) +
                     " outside the trajectory range [" + std::to_string(*lo) + ", " +
                     std::to_string(*hi) + "]");
  }
  std::size_t best = 0;
  for (std::size_t p = 1; p < traj.energies.size(); ++p) {
    if (std::abs(traj.energies[p] - target_energy) <
        std::abs(traj.energies[best] - target_energy)) {
      best = p;
    }
  }
  return static_cast<int>(best);
}

std::vector<Gate> default_ramp_sequence(const HamiltonianTerms& hamiltonian, int steps,
                                        double dt) {
  if (steps < 0) throw InvalidArgument("ramp steps must be >= 0");
  if (!(dt > 0.0)) throw InvalidArgument("ramp dt must be positive");
  std::vector<Gate> out;
  const int L = hamiltonian.num_qubits();
  for (int k = 0; k < steps; ++k) {
    const double lambda = (k + 1.0) / steps;
    // exp(-i dt (1 - lambda)(-X)) = RX(-2 dt (1 - lambda))
    if (lambda < 1.0) {
      for (int q = 0; q < L; ++q) out.push_back(gates::rx(q, -2.0 * dt * (1.0 - lambda)));
    }
    for (const auto& term : hamiltonian.terms()) {
      append_pauli_rotation(out, term, dt * lambda * term.coefficient);
    }
  }
  return out;
}

StateVector plus_state(int num_qubits) {
  const auto dim = Eigen::Index{1} << num_qubits;
  return StateVector::Constant(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

}  // namespace qkfe

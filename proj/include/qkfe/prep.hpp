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


#pragma once

#include <span>
#include <vector>

#include "qkfe/engine.hpp"
#include "qkfe/gates.hpp"
#include "qkfe/model.hpp"

namespace qkfe {

/// Upper bound on |E_p - E_{p-1}| for one gate: the sum over terms whose
/// support meets the gate of 2^{|h_l| + 1} |J_l|.
double disturbance_bound(const HamiltonianTerms& hamiltonian, const Gate& gate);

struct EnergyTrajectory {
  std::vector<double> energies;  // E_0 .. E_P
  std::vector<double> bounds;    // bound for gate p, p = 1..P (index p - 1)
};

/// Applies the gates in order, recording energies. A step that exceeds its
/// bound throws std::logic_error: the bound is a theorem, so a violation is
/// a bug.
EnergyTrajectory trajectory(const StateVector& initial, std::span<const Gate> gates,
                            const HamiltonianTerms& hamiltonian);

/// Index p with E_p closest to the target. RangeError outside the range.
int select_step(const EnergyTrajectory& trajectory, double target_energy);

inline constexpr double kDefaultRampDt = 0.3;

/// First-order Trotterized ramp H(lambda) = (1 - lambda) sum_j (-X_j) +
/// lambda H, lambda stepping linearly to 1. Starts from |+>^L.
std::vector<Gate> default_ramp_sequence(const HamiltonianTerms& hamiltonian, int steps,
                                        double dt = kDefaultRampDt);

/// |+>^L, the ground state of the ramp's initial Hamiltonian.
StateVector plus_state(int num_qubits);

}  // namespace qkfe

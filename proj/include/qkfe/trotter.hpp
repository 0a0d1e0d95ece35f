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

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qkfe/gates.hpp"
#include "qkfe/model.hpp"

namespace qkfe {

/// Gate list on L system qubits plus ancilla (index L by convention for the
/// Trotter circuits).
struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;

  std::int64_t two_qubit_count() const;
  std::int64_t single_qubit_count() const;
};

enum class PairAxis { XX, YY, ZZ };

/// |0><0| (x) I + |1><1| (x) exp(-i theta P1 P2) for P = Z: one RZZ plus a
/// CNOT ladder through the control around an RZ (five two-qubit gates).
Circuit controlled_zz(double theta, int control, int q1, int q2);

/// controlled_zz conjugated by basis rotations on q1 and q2.
Circuit controlled_xx_yy(double theta, PairAxis axis, int control, int q1, int q2);

/// Controlled exp(-i theta P) for an arbitrary Pauli string P. The
/// identity term becomes a phase gate on the control.
void append_controlled_pauli_rotation(std::vector<Gate>& out, const PauliTerm& term,
                                      double theta, int control);

/// Number of Trotter steps for total phase n pi and step dt (rounded up).
std::int64_t trotter_steps(int n, double dt);

/// First-order Trotter circuit for |0><0| (x) I + |1><1| (x) exp(-i n pi Hr)
/// with Hr = (H - offset)/width. Ancilla is qubit L.
Circuit trotterized_controlled_evolution(const HamiltonianTerms& hamiltonian,
                                         const Rescaling& rescaling, int n, double dt);

/// Closed-form two-qubit gate count of the 1D-XXZ circuit: 15 (L - 1)
/// two-qubit gates per Trotter step.
std::int64_t gate_count(int length, int n, double dt);

/// Exact controlled evolution, ancilla as the most significant qubit.
Eigen::MatrixXcd exact_controlled_evolution(const SparseOperator& rescaled_h, double theta);

/// Spectral-norm distance minimized over a global phase. Exact for unitary
/// pairs; other inputs are aligned by the trace phase.
double operator_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace qkfe

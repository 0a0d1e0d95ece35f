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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkfe/engine.hpp"
#include "qkfe/model.hpp"

namespace qkfe {

/// One- or two-qubit gate. Local matrix index bit m refers to qubits[m].
struct Gate {
  std::string name;
  std::vector<int> qubits;
  std::vector<double> params;
  Eigen::MatrixXcd matrix;

  bool two_qubit() const { return qubits.size() == 2; }
};

namespace gates {

/// Rotations follow exp(-i angle P / 2).
Gate rx(int q, double angle);
Gate ry(int q, double angle);
Gate rz(int q, double angle);
Gate h(int q);
/// diag(1, e^{i phi}).
Gate phase(int q, double phi);
Gate cnot(int control, int target);
Gate rxx(int q1, int q2, double angle);
Gate ryy(int q1, int q2, double angle);
Gate rzz(int q1, int q2, double angle);
/// Arbitrary unitary on one or two qubits; params store (re, im) pairs
/// column-major so the gate round-trips through text.
Gate unitary(std::vector<int> qubits, const Eigen::MatrixXcd& matrix);

/// Rebuilds a gate from its serialized fields.
Gate from_fields(const std::string& name, std::vector<int> qubits,
                 std::vector<double> params);

}  // namespace gates

void apply_gate(StateVector& psi, const Gate& gate);

/// Max-entry deviation of U^dag U from the identity.
double unitarity_error(const Gate& gate);

/// Appends gates realizing exp(-i angle P) for the Pauli string of `term`
/// (its coefficient is ignored). Weight-two strings use one native two-qubit
/// rotation; longer strings use a CNOT ladder.
void append_pauli_rotation(std::vector<Gate>& out, const PauliTerm& term, double angle);

/// "name q1 [q2] ; p1 p2 ..." per line.
void write_gates(std::ostream& out, std::span<const Gate> gates);
std::vector<Gate> read_gates(std::istream& in);

/// Dense unitary of a gate list on `num_qubits` qubits.
Eigen::MatrixXcd circuit_unitary(int num_qubits, std::span<const Gate> gates);

}  // namespace qkfe

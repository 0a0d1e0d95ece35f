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

#include "qkfe/gates.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qkfe/errors.hpp"
#include "qkfe/table.hpp"

namespace qkfe {

namespace {

using Mat = Eigen::MatrixXcd;
constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};

Mat pauli(Axis axis) {
  Mat m(2, 2);
  switch (axis) {
    case Axis::X:
      m << 0, 1, 1, 0;
      break;
    case Axis::Y:
      m << 0, -kI, kI, 0;
      break;
    case Axis::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

// Local index bit 0 is the first qubit, so it is the less significant factor.
Mat kron(const Mat& high, const Mat& low) {
  Mat out(high.rows() * low.rows(), high.cols() * low.cols());
  for (Eigen::Index i = 0; i < high.rows(); ++i) {
    for (Eigen::Index j = 0; j < high.cols(); ++j) {
      out.block(i * low.rows(), j * low.cols(), low.rows(), low.cols()) = high(i, j) * low;
    }
  }
  return out;
}

Gate make(std::string name, std::vector<int> qubits, std::vector<double> params, Mat m) {
  if (qubits.empty() || qubits.size() > 2) {
    throw InvalidArgument("gates act on one or two qubits");
  }
  for (int q : qubits) {
    if (q < 0) throw InvalidArgument("negative qubit index");
  }
  if (qubits.size() == 2 && qubits[0] == qubits[1]) {
    throw InvalidArgument("two-qubit gate on coincident qubits");
  }
  return {std::move(name), std::move(qubits), std::move(params), std::move(m)};
}

// exp(-i angle/2 P) for an involutory P
Mat rotation(const Mat& p, double angle) {
  return std::cos(angle / 2) * Mat::Identity(p.rows(), p.cols()) -
         kI * std::sin(angle / 2) * p;
}

Axis axis_of(char c) {
  switch (c) {
    case 'x':
      return Axis::X;
    case 'y':
      return Axis::Y;
    case 'z':
      return Axis::Z;
    default:
      throw InvalidArgument(std::string("unknown rotation axis '") + c + "'");
  }
}

}  // namespace

namespace gates {

Gate rx(int q, double angle) { return make("rx", {q}, {angle}, rotation(pauli(Axis::X), angle)); }
Gate ry(int q, double angle) { return make("ry", {q}, {angle}, rotation(pauli(Axis::Y), angle)); }
Gate rz(int q, double angle) { return make("rz", {q}, {angle}, rotation(pauli(Axis::Z), angle)); }

Gate h(int q) {
  Mat m(2, 2);
  m << 1, 1, 1, -1;
  return make("h", {q}, {}, m / std::sqrt(2.0));
}

Gate phase(int q, double phi) {
  Mat m = Mat::Identity(2, 2);
  m(1, 1) = std::exp(kI * phi);
  return make("phase", {q}, {phi}, m);
}

Gate cnot(int control, int target) {
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = m(2, 2) = 1.0;  // control (bit 0) clear
  m(3, 1) = m(1, 3) = 1.0;
  return make("cnot", {control, target}, {}, m);
}

Gate rxx(int q1, int q2, double angle) {
  return make("rxx", {q1, q2}, {angle}, rotation(kron(pauli(Axis::X), pauli(Axis::X)), angle));
}
Gate ryy(int q1, int q2, double angle) {
  return make("ryy", {q1, q2}, {angle}, rotation(kron(pauli(Axis::Y), pauli(Axis::Y)), angle));
}
Gate rzz(int q1, int q2, double angle) {
  return make("rzz", {q1, q2}, {angle}, rotation(kron(pauli(Axis::Z), pauli(Axis::Z)), angle));
}

Gate unitary(std::vector<int> qubits, const Eigen::MatrixXcd& matrix) {
  const auto dim = Eigen::Index{1} << qubits.size();
  if (matrix.rows() != dim || matrix.cols() != dim) {
    throw InvalidArgument("unitary size does not match its support");
  }
  std::vector<double> params;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      params.push_back(matrix(i, j).real());
      params.push_back(matrix(i, j).imag());
    }
  }
  return make(qubits.size() == 1 ? "u1" : "u2", std::move(qubits), std::move(params), matrix);
}

Gate from_fields(const std::string& name, std::vector<int> qubits,
                 std::vector<double> params) {
  auto need = [&](std::size_t nq, std::size_t np) {
    if (qubits.size() != nq || params.size() != np) {
      throw InvalidArgument("gate '" + name + "' has the wrong number of fields");
    }
  };
  if (name == "h") {
    need(1, 0);
    return h(qubits[0]);
  }
  if (name == "cnot") {
    need(2, 0);
    return cnot(qubits[0], qubits[1]);
  }
  if (name == "phase") {
    need(1, 1);
    return phase(qubits[0], params[0]);
  }
  if (name.size() == 2 && name[0] == 'r') {
    need(1, 1);
    return make(name, qubits, params, rotation(pauli(axis_of(name[1])), params[0]));
  }
  if (name.size() == 3 && name[0] == 'r' && name[1] == name[2]) {
    need(2, 1);
    const Mat p = pauli(axis_of(name[1]));
    return make(name, qubits, params, rotation(kron(p, p), params[0]));
  }
  if (name == "u1" || name == "u2") {
    const std::size_t nq = name == "u1" ? 1 : 2;
    const auto dim = Eigen::Index{1} << nq;
    need(nq, static_cast<std::size_t>(2 * dim * dim));
    Mat m(dim, dim);
    std::size_t k = 0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      for (Eigen::Index i = 0; i < dim; ++i, k += 2) m(i, j) = {params[k], params[k + 1]};
    }
    return unitary(std::move(qubits), m);
  }
  throw InvalidArgument("unknown gate '" + name + "'");
}

}  // namespace gates

void apply_gate(StateVector& psi, const Gate& gate) {
  for (int q : gate.qubits) {
    if ((std::int64_t{1} << q) >= psi.size()) {
      throw InvalidArgument("gate qubit " + std::to_string(q) + " outside the register");
    }
  }
  apply_local(psi, gate.matrix, gate.qubits);
}

double unitarity_error(const Gate& gate) {
  const Mat d = gate.matrix.adjoint() * gate.matrix -
                Mat::Identity(gate.matrix.rows(), gate.matrix.cols());
  return d.cwiseAbs().maxCoeff();
}

void append_pauli_rotation(std::vector<Gate>& out, const PauliTerm& term, double angle) {
  const auto& f = term.factors;
  if (f.empty()) return;  // global phase
  if (f.size() == 1) {
    switch (f[0].axis) {
      case Axis::X:
        out.push_back(gates::rx(f[0].site, 2 * angle));
        break;
      case Axis::Y:
        out.push_back(gates::ry(f[0].site, 2 * angle));
        break;
      case Axis::Z:
        out.push_back(gates::rz(f[0].site, 2 * angle));
        break;
    }
    return;
  }
  if (f.size() == 2 && f[0].axis == f[1].axis) {
    const int a = f[0].site;
    const int b = f[1].site;
    switch (f[0].axis) {
      case Axis::X:
        out.push_back(gates::rxx(a, b, 2 * angle));
        break;
      case Axis::Y:
        out.push_back(gates::ryy(a, b, 2 * angle));
        break;
      case Axis::Z:
        out.push_back(gates::rzz(a, b, 2 * angle));
        break;
    }
    return;
  }
  // Rotate every factor to Z: H Z H = X and RX(-pi/2) Z RX(pi/2) = Y.
  auto to_z = [&](bool forward) {
    for (const auto& p : f) {
      if (p.axis == Axis::X) out.push_back(gates::h(p.site));
      if (p.axis == Axis::Y) out.push_back(gates::rx(p.site, forward ? kPi / 2 : -kPi / 2));
    }
  };
  to_z(true);
  if (f.size() == 2) {
    out.push_back(gates::rzz(f[0].site, f[1].site, 2 * angle));
  } else {
    for (std::size_t k = 0; k + 1 < f.size(); ++k) out.push_back(gates::cnot(f[k].site, f[k + 1].site));
    out.push_back(gates::rz(f.back().site, 2 * angle));
    for (std::size_t k = f.size() - 1; k-- > 0;) out.push_back(gates::cnot(f[k].site, f[k + 1].site));
  }
  to_z(false);
}

void write_gates(std::ostream& out, std::span<const Gate> list) {
  for (const auto& g : list) {
    out << g.name;
    for (int q : g.qubits) out << ' ' << q;
    out << " ;";
    for (double p : g.params) out << ' ' << format_number(p);
    out << '\n';
  }
}

std::vector<Gate> read_gates(std::istream& in) {
  std::vector<Gate> list;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto sep = line.find(';');
    if (sep == std::string::npos) throw InvalidArgument("gate line without ';': " + line);
    std::istringstream head(line.substr(0, sep));
    std::istringstream tail(line.substr(sep + 1));
    std::string name;
    head >> name;
    std::vector<int> qubits;
    for (std::string q; head >> q;) {
      const double v = parse_number(q);
      if (v != std::floor(v) || v < 0 || v > 63) throw InvalidArgument("bad qubit index '" + q + "'");
      qubits.push_back(static_cast<int>(v));
    }
    std::vector<double> params;
    for (std::string p; tail >> p;) params.push_back(parse_number(p));
    list.push_back(gates::from_fields(name, std::move(qubits), std::move(params)));
  }
  return list;
}

Eigen::MatrixXcd circuit_unitary(int num_qubits, std::span<const Gate> list) {
  if (num_qubits < 1 || num_qubits > 14) {
    throw CapacityError("dense circuit unitary limited to 14 qubits");
  }
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  Mat u(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    StateVector col = StateVector::Zero(dim);
    col(c) = 1.0;
    for (const auto& g : list) apply_gate(col, g);
    u.col(c) = col;
  }
  return u;
}

}  // namespace qkfe

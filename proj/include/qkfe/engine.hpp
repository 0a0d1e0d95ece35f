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
#include <limits>
#include <span>

#include <Eigen/Dense>

#include "qkfe/model.hpp"

namespace qkfe {

/// Complex amplitudes in the computational basis; bit j of the index is
/// qubit j.
using StateVector = Eigen::VectorXcd;

/// Full spectrum of an operator in energy units, eigenvalues ascending.
struct SpectrumDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  std::uint64_t fingerprint = 0;

  std::uint64_t dimension() const {
    return static_cast<std::uint64_t>(eigenvalues.size());
  }
  /// Eigenvalues mapped through `rescaling`.
  Eigen::VectorXd rescaled(const Rescaling& rescaling) const;
};

/// Dense diagonalization. Throws CapacityError above `max_qubits`.
SpectrumDecomposition eigendecompose(const SparseOperator& hamiltonian,
                                     int max_qubits = kDefaultOracleMaxQubits);

inline constexpr double kDefaultEvolveTol = 1e-9;

/// e^{-i theta H} psi for H with spectrum in [0, 1]. Chebyshev-Bessel
/// expansion in substeps of at most pi/2.
StateVector evolve(const StateVector& psi, const SparseOperator& hamiltonian,
                   double theta, double tol = kDefaultEvolveTol);

/// In-place variant reusing caller-provided scratch space.
void evolve_inplace(StateVector& psi, const SparseOperator& hamiltonian,
                    double theta, double tol = kDefaultEvolveTol);

struct RandomStateMode {
  enum class Kind { gaussian_haar, product_scrambled };
  Kind kind = Kind::gaussian_haar;
  int depth = 0;  // brickwork layers for product_scrambled

  static RandomStateMode haar() { return {}; }
  static RandomStateMode scrambled(int depth) {
    return {Kind::product_scrambled, depth};
  }
};

StateVector random_state(int num_qubits, RandomStateMode mode,
                         std::uint64_t seed);

/// Haar-random 2x2 or 4x4 unitary (QR of a complex Ginibre matrix).
Eigen::MatrixXcd haar_unitary(int dimension, std::uint64_t seed);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// Derived stream seed; distinct index tuples give independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0);

struct GibbsEnsemble {
  double beta = 0.0;
  Eigen::VectorXd weights;
  double eps_star = 0.0;   // mean rescaled energy
  double sigma_eps = 0.0;  // rescaled energy standard deviation
};

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

/// Boltzmann weights via max-shifted exponentials. beta = infinity spreads
/// the weight uniformly over the (numerically) degenerate ground manifold.
GibbsEnsemble gibbs_ensemble(const SpectrumDecomposition& spectrum,
                             double beta, const Rescaling& rescaling);

/// Exact canonical thermodynamics from a spectrum, in energy units.
struct ExactThermo {
  double log_z = 0.0;
  double energy = 0.0;
  double free_energy = 0.0;
  double entropy = 0.0;
};
ExactThermo exact_thermo(const SpectrumDecomposition& spectrum, double beta);

/// exp(-beta H / 2)|r> with |r> gaussian-Haar, normalized. `log_norm` is the
/// log of the norm before normalization, up to a beta-dependent constant
/// shared by every sample at the same beta.
struct ThermalPureSample {
  StateVector state;
  double log_norm = 0.0;
};

ThermalPureSample thermal_pure_sample(const SpectrumDecomposition& spectrum,
                                      double beta, std::uint64_t seed);
ThermalPureSample thermal_pure_sample(const RescaledOperator& hamiltonian,
                                      double beta, std::uint64_t seed);

inline StateVector thermal_pure_state(const SpectrumDecomposition& spectrum,
                                      double beta, std::uint64_t seed) {
  return thermal_pure_sample(spectrum, beta, seed).state;
}
inline StateVector thermal_pure_state(const RescaledOperator& hamiltonian,
                                      double beta, std::uint64_t seed) {
  return thermal_pure_sample(hamiltonian, beta, seed).state;
}

/// Applies a 2^k x 2^k matrix to the listed qubits. Local basis index bit m
/// corresponds to qubits[m].
void apply_local(StateVector& psi, const Eigen::MatrixXcd& u,
                 std::span<const int> qubits);

/// <psi| A |psi>, real part.
double expectation(const SparseOperator& op, const StateVector& psi);

}  // namespace qkfe

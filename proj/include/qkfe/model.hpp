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

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qkfe {

using cplx = std::complex<double>;

enum class Axis : std::uint8_t { X, Y, Z };

char axis_name(Axis axis);

struct PauliFactor {
  int site = 0;
  Axis axis = Axis::Z;

  friend bool operator==(const PauliFactor&, const PauliFactor&) = default;
};

/// coefficient * sigma_{site_1}^{axis_1} ... sigma_{site_k}^{axis_k}.
/// An empty factor list is the identity offset.
struct PauliTerm {
  double coefficient = 0.0;
  std::vector<PauliFactor> factors;

  bool is_identity() const { return factors.empty(); }
  std::size_t weight() const { return factors.size(); }
  bool acts_on(int site) const;
};

struct Geometry {
  enum class Kind { chain, square };
  Kind kind = Kind::chain;
  int lx = 0;
  int ly = 1;
};

/// Weighted Pauli-string sum on `num_qubits` qubits.
class HamiltonianTerms {
 public:
  HamiltonianTerms() = default;
  HamiltonianTerms(int num_qubits, Geometry geometry);

  /// Validates the term (distinct sites, finite nonzero coefficient, sites in
  /// range) before appending it.
  void add(PauliTerm term);

  int num_qubits() const { return num_qubits_; }
  const Geometry& geometry() const { return geometry_; }
  std::span<const PauliTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Sum of |coefficient|, an upper bound on the operator norm.
  double coefficient_norm() const;

  /// True when every term is a product of Z factors.
  bool is_diagonal() const;

 private:
  int num_qubits_ = 0;
  Geometry geometry_;
  std::vector<PauliTerm> terms_;
};

/// Open-boundary spin-1/2 XXZ chain, (1/2)(XX + YY + delta ZZ) per bond.
HamiltonianTerms build_1d_xxz(int length, double delta);

/// Open-boundary XXZ model on an lx-by-ly grid, (XX + YY + delta ZZ) per bond.
HamiltonianTerms build_2d_xxz(int lx, int ly, double delta);

/// Spinless-fermion t-V model on an lx-by-ly grid, mapped to qubits with a
/// Jordan-Wigner string over the row-major site order site = y * lx + x.
HamiltonianTerms build_tv(int lx, int ly, double interaction);

/// Row-major site index used by the grid models.
inline int grid_site(int x, int y, int lx) { return y * lx + x; }

/// Nearest-neighbour bonds of an open lx-by-ly grid, horizontal bonds first.
std::vector<std::pair<int, int>> grid_bonds(int lx, int ly);

/// sigma^z_i sigma^z_j as a one-term Pauli sum.
HamiltonianTerms zz_correlator(int num_qubits, int i, int j);

/// Sum over pairs of n_i n_j with n = (1 - Z) / 2.
HamiltonianTerms density_correlator(int num_qubits,
                                    std::span<const std::pair<int, int>> pairs);

struct ModelSpec {
  enum class Kind { xxz1d, xxz2d, tv2d };
  Kind kind = Kind::xxz1d;
  int length = 0;  // xxz1d
  int lx = 0;
  int ly = 0;
  double delta = -0.9;
  double delta_prime = -0.5;
  double interaction = 2.0;

  int num_qubits() const;
  std::string describe() const;
};

HamiltonianTerms build_model(const ModelSpec& spec);

/// Row-compressed complex matrix of dimension 2^L. Every row stores its
/// diagonal entry, so affine shifts keep the layout.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::uint64_t dimension, std::vector<std::uint64_t> row_ptr,
                 std::vector<std::uint64_t> col_idx, std::vector<cplx> values);

  std::uint64_t dimension() const { return dimension_; }
  int num_qubits() const { return num_qubits_; }
  std::size_t nonzeros() const { return values_.size(); }
  bool hermitian() const { return hermitian_; }
  bool real() const { return real_; }

  /// out = A * in.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

  /// scale * A + shift * I.
  SparseOperator affine(double scale, double shift) const;

  Eigen::MatrixXcd to_dense() const;
  Eigen::VectorXcd diagonal() const;

  std::span<const std::uint64_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint64_t> col_idx() const { return col_idx_; }
  std::span<const cplx> values() const { return values_; }

  /// Hash of the stored entries; identifies the operator a spectrum came from.
  std::uint64_t fingerprint() const;

 private:
  bool check_hermitian() const;

  std::uint64_t dimension_ = 0;
  int num_qubits_ = 0;
  std::vector<std::uint64_t> row_ptr_;
  std::vector<std::uint64_t> col_idx_;
  std::vector<cplx> values_;
  bool hermitian_ = false;
  bool real_ = false;
};

inline constexpr int kDefaultSparseMaxQubits = 24;

SparseOperator to_sparse(const HamiltonianTerms& hamiltonian,
                         int max_qubits = kDefaultSparseMaxQubits);

/// Affine map E -> eps = (E - e_min + margin) / (e_width + 2 margin).
struct Rescaling {
  double e_min = 0.0;
  double e_max = 0.0;
  double e_width = 0.0;
  double margin = 0.0;
  std::uint64_t dimension = 1;

  double width() const { return e_width + 2.0 * margin; }
  double offset() const { return e_min - margin; }
  double to_rescaled(double energy) const {
    return (energy - offset()) / width();
  }
  double to_energy(double eps) const { return offset() + eps * width(); }
};

inline constexpr double kDefaultMarginFraction = 0.01;
inline constexpr int kDefaultOracleMaxQubits = 12;

struct SpectralBounds {
  double e_min = 0.0;
  double e_max = 0.0;
  bool exact = false;
};

/// Exact extremal eigenvalues up to `oracle_max_qubits`, otherwise a Lanczos
/// estimate widened by 5% of the bracket on each side.
SpectralBounds spectral_bounds(const SparseOperator& hamiltonian,
                               int oracle_max_qubits = kDefaultOracleMaxQubits);

struct RescaledOperator {
  SparseOperator op;
  Rescaling rescaling;
};

RescaledOperator rescale(const SparseOperator& hamiltonian,
                         std::optional<std::pair<double, double>> bounds,
                         double margin_fraction = kDefaultMarginFraction,
                         int oracle_max_qubits = kDefaultOracleMaxQubits);

}  // namespace qkfe

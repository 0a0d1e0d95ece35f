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

#include "qkfe/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "qkfe/errors.hpp"

namespace qkfe {

char axis_name(Axis axis) {
  switch (axis) {
    case Axis::X:
      return 'X';
    case Axis::Y:
      return 'Y';
    case Axis::Z:
      return 'Z';
  }
  return '?';
}

bool PauliTerm::acts_on(int site) const {
  return std::any_of(factors.begin(), factors.end(),
                     [site](const PauliFactor& f) { return f.site == site; });
}

HamiltonianTerms::HamiltonianTerms(int num_qubits, Geometry geometry)
    : num_qubits_(num_qubits), geometry_(geometry) {
  if (num_qubits < 1) throw InvalidArgument("qubit count must be positive");
}

void HamiltonianTerms::add(PauliTerm term) {
  if (!std::isfinite(term.coefficient) || term.coefficient == 0.0) {
    throw InvalidArgument("Pauli term coefficient must be finite and nonzero");
  }
  std::set<int> seen;
  for (const auto& f : term.factors) {
    if (f.site < 0 || f.site >= num_qubits_) {
      throw InvalidArgument("Pauli factor site " + std::to_string(f.site) +
                            " outside [0, " + std::to_string(num_qubits_) +
                            ")");
    }
    if (!seen.insert(f.site).second) {
      throw InvalidArgument("repeated site " + std::to_string(f.site) +
                            " within one Pauli term");
    }
  }
  terms_.push_back(std::move(term));
}

double HamiltonianTerms::coefficient_norm() const {
  double total = 0.0;
  for (const auto& t : terms_) total += std::abs(t.coefficient);
  return total;
}

bool HamiltonianTerms::is_diagonal() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const PauliTerm& t) {
    return std::all_of(t.factors.begin(), t.factors.end(),
                       [](const PauliFactor& f) { return f.axis == Axis::Z; });
  });
}

namespace {

PauliTerm two_body(double coefficient, int i, int j, Axis axis) {
  return PauliTerm{coefficient, {{i, axis}, {j, axis}}};
}

void add_xxz_bond(HamiltonianTerms& h, int i, int j, double scale,
                  double delta) {
  h.add(two_body(scale, i, j, Axis::X));
  h.add(two_body(scale, i, j, Axis::Y));
  if (delta != 0.0) h.add(two_body(scale * delta, i, j, Axis::Z));
}

}  // namespace

HamiltonianTerms build_1d_xxz(int length, double delta) {
  if (length < 2) throw InvalidArgument("1D XXZ chain needs L >= 2");
  HamiltonianTerms h(length, Geometry{Geometry::Kind::chain, length, 1});
  for (int j = 0; j + 1 < length; ++j) add_xxz_bond(h, j, j + 1, 0.5, delta);
  return h;
}

std::vector<std::pair<int, int>> grid_bonds(int lx, int ly) {
  std::vector<std::pair<int, int>> bonds;
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x + 1 < lx; ++x) {
      bonds.emplace_back(grid_site(x, y, lx), grid_site(x + 1, y, lx));
    }
  }
  for (int y = 0; y + 1 < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      bonds.emplace_back(grid_site(x, y, lx), grid_site(x, y + 1, lx));
    }
  }
  return bonds;
}

HamiltonianTerms build_2d_xxz(int lx, int ly, double delta) {
  if (lx < 2 || ly < 2) {
    throw InvalidArgument("2D XXZ grid needs Lx, Ly >= 2");
  }
  HamiltonianTerms h(lx * ly, Geometry{Geometry::Kind::square, lx, ly});
  for (auto [i, j] : grid_bonds(lx, ly)) add_xxz_bond(h, i, j, 1.0, delta);
  return h;
}

HamiltonianTerms build_tv(int lx, int ly, double interaction) {
  if (lx < 1 || ly < 1 || lx * ly < 2) {
    throw InvalidArgument("t-V lattice needs at least two sites");
  }
  HamiltonianTerms h(lx * ly, Geometry{Geometry::Kind::square, lx, ly});
  for (auto [i, j] : grid_bonds(lx, ly)) {
    // -(c_i^dag c_j + h.c.) = -(1/2)(X_i S X_j + Y_i S Y_j), S = Z string
    // strictly between i and j in the fermion order.
    for (Axis axis : {Axis::X, Axis::Y}) {
      PauliTerm hop{-0.5, {{i, axis}}};
      for (int k = i + 1; k < j; ++k) hop.factors.push_back({k, Axis::Z});
      hop.factors.push_back({j, axis});
      h.add(std::move(hop));
    }
    if (interaction != 0.0) {
      // V n_i n_j = (V/4)(1 - Z_i - Z_j + Z_i Z_j)
      const double q = 0.25 * interaction;
      h.add(PauliTerm{q, {}});
      h.add(PauliTerm{-q, {{i, Axis::Z}}});
      h.add(PauliTerm{-q, {{j, Axis::Z}}});
      h.add(two_body(q, i, j, Axis::Z));
    }
  }
  return h;
}

HamiltonianTerms zz_correlator(int num_qubits, int i, int j) {
  HamiltonianTerms h(num_qubits, Geometry{Geometry::Kind::chain, num_qubits, 1});
  h.add(two_body(1.0, i, j, Axis::Z));
  return h;
}

HamiltonianTerms density_correlator(
    int num_qubits, std::span<const std::pair<int, int>> pairs) {
  HamiltonianTerms h(num_qubits, Geometry{Geometry::Kind::chain, num_qubits, 1});
  for (auto [i, j] : pairs) {
    h.add(PauliTerm{0.25, {}});
    h.add(PauliTerm{-0.25, {{i, Axis::Z}}});
    h.add(PauliTerm{-0.25, {{j, Axis::Z}}});
    h.add(two_body(0.25, i, j, Axis::Z));
  }
  return h;
}

int ModelSpec::num_qubits() const {
  return kind == Kind::xxz1d ? length : lx * ly;
}

std::string ModelSpec::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::xxz1d:
      out << "xxz1d L=" << length << " delta=" << delta;
      break;
    case Kind::xxz2d:
      out << "xxz2d " << lx << "x" << ly << " delta_prime=" << delta_prime;
      break;
    case Kind::tv2d:
      out << "tv2d " << lx << "x" << ly << " v=" << interaction;
      break;
  }
  return out.str();
}

HamiltonianTerms build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelSpec::Kind::xxz1d:
      return build_1d_xxz(spec.length, spec.delta);
    case ModelSpec::Kind::xxz2d:
      return build_2d_xxz(spec.lx, spec.ly, spec.delta_prime);
    case ModelSpec::Kind::tv2d:
      return build_tv(spec.lx, spec.ly, spec.interaction);
  }
  throw InvalidArgument("unknown model kind");
}

// ---------------------------------------------------------------------------
// SparseOperator

SparseOperator::SparseOperator(std::uint64_t dimension,
                               std::vector<std::uint64_t> row_ptr,
                               std::vector<std::uint64_t> col_idx,
                               std::vector<cplx> values)
    : dimension_(dimension),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (dimension_ == 0 || !std::has_single_bit(dimension_)) {
    throw InvalidArgument("operator dimension must be a power of two");
  }
  if (row_ptr_.size() != dimension_ + 1 || row_ptr_.back() != values_.size() ||
      col_idx_.size() != values_.size()) {
    throw InvalidArgument("inconsistent row-compressed layout");
  }
  num_qubits_ = std::countr_zero(dimension_);
  real_ = std::all_of(values_.begin(), values_.end(),
                      [](const cplx& v) { return v.imag() == 0.0; });
  hermitian_ = check_hermitian();
}

bool SparseOperator::check_hermitian() const {
  for (std::uint64_t r = 0; r < dimension_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto c = col_idx_[k];
      const auto begin = col_idx_.begin() + static_cast<long>(row_ptr_[c]);
      const auto end = col_idx_.begin() + static_cast<long>(row_ptr_[c + 1]);
      const auto it = std::lower_bound(begin, end, r);
      const cplx mirror =
          (it != end && *it == r) ? values_[static_cast<std::size_t>(it - col_idx_.begin())]
                                  : cplx{};
      if (values_[k] != std::conj(mirror)) return false;
    }
  }
  return true;
}

void SparseOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const auto n = static_cast<std::int64_t>(dimension_);
#pragma omp parallel for schedule(static) if (n >= 4096)
  for (std::int64_t r = 0; r < n; ++r) {
    cplx acc{};
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[k] * in[col_idx_[k]];
    }
    out[r] = acc;
  }
}

SparseOperator SparseOperator::affine(double scale, double shift) const {
  std::vector<cplx> values(values_.size());
  for (std::uint64_t r = 0; r < dimension_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      values[k] = scale * values_[k] + (col_idx_[k] == r ? shift : 0.0);
    }
  }
  return SparseOperator(dimension_, row_ptr_, col_idx_, std::move(values));
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dimension_);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::uint64_t r = 0; r < dimension_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[k])) =
          values_[k];
    }
  }
  return m;
}

Eigen::VectorXcd SparseOperator::diagonal() const {
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension_));
  for (std::uint64_t r = 0; r < dimension_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] == r) d(static_cast<Eigen::Index>(r)) = values_[k];
    }
  }
  return d;
}

std::uint64_t SparseOperator::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(dimension_);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    mix(col_idx_[k]);
    mix(std::bit_cast<std::uint64_t>(values_[k].real()));
    mix(std::bit_cast<std::uint64_t>(values_[k].imag()));
  }
  return h;
}

namespace {

struct MaskedTerm {
  std::uint64_t flip = 0;   // X or Y factors
  std::uint64_t parity = 0; // Y or Z factors
  cplx weight;              // coefficient * i^{#Y}
};

}  // namespace

SparseOperator to_sparse(const HamiltonianTerms& hamiltonian, int max_qubits) {
  const int L = hamiltonian.num_qubits();
  if (L > max_qubits || L > 62) {
    throw CapacityError("operator on " + std::to_string(L) +
                        " qubits exceeds the cap of " +
                        std::to_string(max_qubits));
  }
  const std::uint64_t dim = std::uint64_t{1} << L;

  // Group terms by flip mask: each group contributes one column per row.
  std::map<std::uint64_t, std::vector<MaskedTerm>> groups;
  groups[0];  // diagonal slot always present
  for (const auto& term : hamiltonian.terms()) {
    MaskedTerm m;
    int num_y = 0;
    for (const auto& f : term.factors) {
      const std::uint64_t bit = std::uint64_t{1} << f.site;
      if (f.axis != Axis::Z) m.flip |= bit;
      if (f.axis != Axis::X) m.parity |= bit;
      if (f.axis == Axis::Y) ++num_y;
    }
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    m.weight = term.coefficient * kIPow[num_y % 4];
    groups[m.flip].push_back(m);
  }

  std::vector<std::uint64_t> row_ptr(dim + 1, 0);
  std::vector<std::uint64_t> col_idx;
  std::vector<cplx> values;
  col_idx.reserve(dim * groups.size());
  values.reserve(dim * groups.size());
  std::vector<std::pair<std::uint64_t, cplx>> row;
  for (std::uint64_t r = 0; r < dim; ++r) {
    row.clear();
    for (const auto& [flip, terms] : groups) {
      // <r| P |c> with c = r ^ flip; P|c> = weight * (-1)^{|c & parity|} |r>.
      const std::uint64_t c = r ^ flip;
      cplx v{};
      for (const auto& t : terms) {
        v += (std::popcount(c & t.parity) & 1) ? -t.weight : t.weight;
      }
      if (flip == 0 || std::abs(v) > 0.0) row.emplace_back(c, v);
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [c, v] : row) {
      col_idx.push_back(c);
      values.push_back(v);
    }
    row_ptr[r + 1] = values.size();
  }
  return SparseOperator(dim, std::move(row_ptr), std::move(col_idx),
                        std::move(values));
}

// ---------------------------------------------------------------------------
// Spectral bounds and rescaling

namespace {

SpectralBounds lanczos_bounds(const SparseOperator& h) {
  const auto dim = h.dimension();
  const std::size_t steps = static_cast<std::size_t>(std::min<std::uint64_t>(dim, 160));
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss;

  std::vector<Eigen::VectorXcd> basis;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = {gauss(rng), gauss(rng)};
  v.normalize();
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXcd w(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < steps; ++j) {
    basis.push_back(v);
    h.apply({v.data(), dim}, {w.data(), dim});
    alpha.push_back(v.dot(w).real());
    for (const auto& b : basis) w -= b * b.dot(w);  // full reorthogonalization
    const double norm = w.norm();
    if (norm < 1e-12 || j + 1 == steps) break;
    beta.push_back(norm);
    v = w / norm;
  }
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) {
      t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues()(0);
  const double hi = solver.eigenvalues()(m - 1);
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, false};
}

}  // namespace

SpectralBounds spectral_bounds(const SparseOperator& hamiltonian,
                               int oracle_max_qubits) {
  if (!hamiltonian.hermitian()) {
    throw InvalidArgument("spectral bounds need a hermitian operator");
  }
  if (hamiltonian.num_qubits() > oracle_max_qubits) {
    return lanczos_bounds(hamiltonian);
  }
  const Eigen::MatrixXcd dense = hamiltonian.to_dense();
  Eigen::VectorXd evals;
  if (hamiltonian.real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense.real(),
                                                          Eigen::EigenvaluesOnly);
    evals = solver.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense,
                                                           Eigen::EigenvaluesOnly);
    evals = solver.eigenvalues();
  }
  return {evals(0), evals(evals.size() - 1), true};
}

RescaledOperator rescale(const SparseOperator& hamiltonian,
                         std::optional<std::pair<double, double>> bounds,
                         double margin_fraction, int oracle_max_qubits) {
  if (!hamiltonian.hermitian()) {
    throw InvalidArgument("rescale needs a hermitian operator");
  }
  if (!(margin_fraction >= 0.0) || !std::isfinite(margin_fraction)) {
    throw InvalidArgument("margin_fraction must be a nonnegative number");
  }
  double lo = 0.0;
  double hi = 0.0;
  if (bounds) {
    std::tie(lo, hi) = *bounds;
  } else {
    const auto b = spectral_bounds(hamiltonian, oracle_max_qubits);
    lo = b.e_min;
    hi = b.e_max;
  }
  const double width = hi - lo;
  if (!(width > 1e-12 * std::max(1.0, std::abs(lo)))) {
    throw InvalidArgument("spectral width is zero (scalar Hamiltonian)");
  }
  Rescaling r{lo, hi, width, margin_fraction * width, hamiltonian.dimension()};
  return {hamiltonian.affine(1.0 / r.width(), -r.offset() / r.width()), r};
}

}  // namespace qkfe

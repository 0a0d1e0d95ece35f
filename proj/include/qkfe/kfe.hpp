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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkfe/engine.hpp"
#include "qkfe/model.hpp"
#include "qkfe/table.hpp"

namespace qkfe {

struct Provenance {
  enum class Kind { exact, stochastic, shot };
  Kind kind = Kind::exact;
  int samples = 0;          // R
  std::int64_t shots = 0;   // K per state and moment (shot mode)
  std::uint64_t seed = 0;

  std::string label() const;
};

/// Fourier moments n = 0..N-1 of the DOS (no observable) or of an
/// observable-weighted density.
struct MomentVector {
  std::vector<double> values;
  std::vector<double> stderrs;
  Provenance provenance;
  std::optional<std::string> observable;

  int cutoff() const { return static_cast<int>(values.size()); }
};

/// Truncated cosine series F(eps) = c0 + 2 sum_{n>=1} c_n cos(n pi eps).
struct SpectralSeries {
  enum class Kind { dos, weighted };
  std::vector<double> coeffs;
  Kind kind = Kind::dos;
  bool kernel_applied = true;

  int cutoff() const { return static_cast<int>(coeffs.size()); }
  double evaluate(double eps) const;
  std::vector<double> evaluate(std::span<const double> grid) const;
};

/// (1/D) sum_i <i|A|i> cos(n pi eps_i); A = identity when `observable` is
/// null. `observable` is in the computational basis.
double moment_exact(const SpectrumDecomposition& spectrum,
                    const Rescaling& rescaling, int n,
                    const SparseOperator* observable = nullptr);

MomentVector moments_exact(const SpectrumDecomposition& spectrum,
                           const Rescaling& rescaling, int cutoff,
                           const SparseOperator* observable = nullptr,
                           std::optional<std::string> label = std::nullopt);

struct StochasticOptions {
  int samples = 20;  // R
  std::uint64_t seed = 0;
  RandomStateMode mode = RandomStateMode::haar();
  double tol = kDefaultEvolveTol;
};

struct NamedObservable {
  std::string name;
  const SparseOperator* op = nullptr;
};

/// DOS moments plus one weighted moment vector per observable, all from the
/// same random states. Each state r is drawn from derive_seed(seed, r) and
/// shared across n, which keeps moment errors correlated the way a hardware
/// run with fixed input states would.
struct StochasticMoments {
  MomentVector dos;
  std::vector<MomentVector> observables;
};

StochasticMoments moments_stochastic(const SparseOperator& rescaled_h,
                                     int cutoff,
                                     const StochasticOptions& options,
                                     std::span<const NamedObservable> observables = {});

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

Estimate moment_stochastic(const SparseOperator& rescaled_h, int n,
                           const StochasticOptions& options,
                           const SparseOperator* observable = nullptr);

struct ShotPlan {
  int cutoff = 0;
  std::vector<std::int64_t> shots;  // K_n
  std::int64_t total() const;
};

ShotPlan shot_plan_cubic(int cutoff, double kappa = 1.0);
ShotPlan shot_plan_fixed(int cutoff, std::int64_t shots);

/// Simulated Hadamard-test measurements for one state: K ancilla sigma_x
/// outcomes (jointly with the observable's eigenvalue if given). Returns the
/// shot average.
double sample_shots(const StateVector& psi, const StateVector& evolved,
                    std::int64_t shots, std::uint64_t seed,
                    const SparseOperator* observable = nullptr);

/// Shot-sampled moment averaged over R random states with K shots each.
Estimate moment_shot(const SparseOperator& rescaled_h, int n,
                     const StochasticOptions& options, std::int64_t shots,
                     const SparseOperator* observable = nullptr);

MomentVector moments_shot(const SparseOperator& rescaled_h,
                          const ShotPlan& plan,
                          const StochasticOptions& options,
                          const SparseOperator* observable = nullptr,
                          std::optional<std::string> label = std::nullopt);

double jackson_kernel(int n, int cutoff);

SpectralSeries reconstruct(const MomentVector& moments, bool apply_kernel = true);
SpectralSeries reconstruct(std::span<const double> moments, SpectralSeries::Kind kind,
                           bool apply_kernel = true);

/// Moment table with columns n, value, stderr, provenance, N, R, K, seed
/// and an optional exact column.
Table moment_table(const MomentVector& moments, const std::vector<double>* exact = nullptr);

/// Plain-text moment table: commented metadata followed by columns
/// n, value, stderr, provenance, N, R, K, seed [, exact].
void write_moment_table(std::ostream& out, const MomentVector& moments,
                        const std::vector<std::string>& metadata,
                        const std::vector<double>* exact = nullptr);
MomentVector read_moment_table(std::istream& in);

}  // namespace qkfe

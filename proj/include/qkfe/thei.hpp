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
#include <optional>
#include <string>
#include <vector>

#include "qkfe/engine.hpp"
#include "qkfe/kfe.hpp"
#include "qkfe/table.hpp"

namespace qkfe {

/// Fourier moments of a canonical ensemble, with its mean and spread in
/// rescaled energy.
struct CanonicalMoments {
  std::vector<double> values;
  double eps_star = 0.0;
  double sigma_eps = 0.0;
  std::string provenance;
};

CanonicalMoments canonical_moments(const GibbsEnsemble& ensemble,
                                   const SpectrumDecomposition& spectrum,
                                   const Rescaling& rescaling, int cutoff);

/// Norm-weighted average over R thermal pure states at `beta`.
CanonicalMoments canonical_moments_tpq(const RescaledOperator& hamiltonian,
                                       double beta, int samples,
                                       std::uint64_t seed, int cutoff,
                                       double tol = kDefaultEvolveTol);

/// Energy distribution G(eps) of the ensemble.
SpectralSeries reconstruct_G(const CanonicalMoments& moments, bool apply_kernel = true);

enum class KernelMode {
  jackson,
  raw,
  /// Raw moments unless either G dips to zero on the window, then Jackson
  /// for that step.
  automatic
};

struct Window {
  double lo = 0.0;
  double hi = 0.0;
  int points = 512;

  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
  std::vector<double> grid() const;
};

/// Intersection of [eps1 +- sigma1] and [eps2 +- sigma2], clipped to (0, 1).
/// Throws WindowError when empty.
Window overlap_window(double eps1, double sigma1, double eps2, double sigma2,
                      int points = 512);

struct BetaBracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct BetaStep {
  double beta = 0.0;
  double residual = 0.0;    // attained value of 1 - <I>^2 / <I^2>
  double logz_ratio = 0.0;  // log <I>, rescaled convention
};

/// 1 - <I>^2/<I^2> over the window grid for a trial beta_next; `width` is
/// the margin-inflated energy width.
double constancy_objective(const SpectralSeries& g_prev, const SpectralSeries& g_next,
                           double beta_prev, double beta_next, const Window& window,
                           double width);

/// Minimizes the constancy objective over beta_next. The default bracket is
/// [beta_prev - g, beta_prev + 4 g] with g = 1/(sigma width); it is widened
/// geometrically when the minimum sits on an edge, then BracketError.
BetaStep infer_beta_step(const SpectralSeries& g_prev, const SpectralSeries& g_next,
                         double beta_prev, double center, double half_width,
                         double width, std::optional<BetaBracket> bracket = std::nullopt,
                         int points = 512);

/// log of the window average of I at beta_next.
double logz_ratio(const SpectralSeries& g_prev, const SpectralSeries& g_next,
                  double beta_prev, double beta_next, const Window& window,
                  double width);

/// Supplies canonical ensembles at requested mean energies.
class EnsembleSource {
 public:
  virtual ~EnsembleSource() = default;
  virtual CanonicalMoments infinite_temperature(int cutoff) = 0;
  /// Ensemble whose mean rescaled energy is `eps_target`.
  virtual CanonicalMoments prepare(double eps_target, int cutoff) = 0;
  /// Lowest mean energy this source can reach.
  virtual double min_eps() const = 0;
  virtual std::string name() const = 0;
};

/// Exact Gibbs states from a full spectrum; beta found by bisection.
class GibbsSource : public EnsembleSource {
 public:
  GibbsSource(const SpectrumDecomposition& spectrum, const Rescaling& rescaling);

  CanonicalMoments infinite_temperature(int cutoff) override;
  CanonicalMoments prepare(double eps_target, int cutoff) override;
  double min_eps() const override;
  std::string name() const override { return "gibbs"; }

  /// Inverse temperature whose Gibbs mean energy equals eps_target.
  double beta_for(double eps_target) const;

 private:
  const SpectrumDecomposition& spectrum_;
  Rescaling rescaling_;
};

/// Thermal pure states built by Chebyshev filtering; no spectrum needed.
class TpqSource : public EnsembleSource {
 public:
  TpqSource(const RescaledOperator& hamiltonian, int samples, std::uint64_t seed,
            double tol = kDefaultEvolveTol);

  CanonicalMoments infinite_temperature(int cutoff) override;
  CanonicalMoments prepare(double eps_target, int cutoff) override;
  double min_eps() const override;
  std::string name() const override { return "tpq"; }

 private:
  double mean_eps(double beta) const;

  const RescaledOperator& hamiltonian_;
  int samples_;
  std::uint64_t seed_;
  double tol_;
};

/// Uniform mixture of eigenstates in an energy shell. Not a Gibbs state, so
/// the constancy residual should flag it.
class MicrocanonicalSource : public EnsembleSource {
 public:
  MicrocanonicalSource(const SpectrumDecomposition& spectrum,
                       const Rescaling& rescaling, double shell_half_width = 0.03);

  CanonicalMoments infinite_temperature(int cutoff) override;
  CanonicalMoments prepare(double eps_target, int cutoff) override;
  double min_eps() const override;
  std::string name() const override { return "microcanonical"; }

 private:
  CanonicalMoments from_weights(const Eigen::VectorXd& weights, int cutoff) const;

  const SpectrumDecomposition& spectrum_;
  Rescaling rescaling_;
  Eigen::VectorXd eps_;
  double shell_;
};

struct TheiOptions {
  int cutoff = 100;
  std::optional<double> beta_max;
  std::optional<double> eps_min;
  double c_step = 0.3;
  double residual_threshold = 1e-3;
  KernelMode kernel = KernelMode::automatic;
  int max_halvings = 3;
  int window_points = 512;
  int max_steps = 100000;
};

struct TheiRow {
  int step = 0;
  double eps_star = 0.0;
  double sigma_eps = 0.0;
  double beta = 0.0;
  double log_z = 0.0;  // absolute convention
  double energy = 0.0;
  double free_energy = 0.0;
  double entropy = 0.0;
  double residual = 0.0;
  bool jackson = false;
  bool verified = true;
};

struct TheiTrace {
  std::vector<TheiRow> rows;
  bool complete = true;
  std::string diagnostic;

  int steps() const { return static_cast<int>(rows.size()) - 1; }
  /// Columns step, eps_star, beta, T, logZ, E, F, S, residual, sigma_eps,
  /// kernel, verified.
  Table to_table() const;
};

/// Iterates from infinite temperature toward low energy. Window failures are
/// retried with a halved step; after `max_halvings` the run stops and the
/// partial trace is returned with complete = false.
TheiTrace thei_run(EnsembleSource& source, const Rescaling& rescaling,
                   const TheiOptions& options);

}  // namespace qkfe

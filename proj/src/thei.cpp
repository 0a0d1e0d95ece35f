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

#include "qkfe/thei.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qkfe/errors.hpp"

namespace qkfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kScanPoints = 64;
constexpr int kMaxExpansions = 8;

struct WindowValues {
  std::vector<double> eps;
  std::vector<double> log_ratio;  // log G_prev - log G_next
};

WindowValues window_values(const SpectralSeries& g_prev, const SpectralSeries& g_next,
                           const Window& window) {
  WindowValues w;
  w.eps = window.grid();
  w.log_ratio.resize(w.eps.size());
  for (std::size_t j = 0; j < w.eps.size(); ++j) {
    const double gp = g_prev.evaluate(w.eps[j]);
    const double gn = g_next.evaluate(w.eps[j]);
    if (!(gp > 0.0) || !(gn > 0.0)) {
      throw WindowError("energy distribution non-positive at eps = " +
                        std::to_string(w.eps[j]));
    }
    w.log_ratio[j] = std::log(gp) - std::log(gn);
  }
  return w;
}

struct Constancy {
  double objective = 0.0;
  double log_mean = 0.0;
};

Constancy constancy(const WindowValues& w, double dbeta_width) {
  // log I = log G_prev - log G_next - (beta_next - beta_prev) width eps
  const std::size_t m = w.eps.size();
  std::vector<double> log_i(m);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    log_i[j] = w.log_ratio[j] - dbeta_width * w.eps[j];
    top = std::max(top, log_i[j]);
  }
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double v = std::exp(log_i[j] - top);
    s1 += v;
    s2 += v * v;
  }
  s1 /= static_cast<double>(m);
  s2 /= static_cast<double>(m);
  return {std::max(0.0, 1.0 - s1 * s1 / s2), top + std::log(s1)};
}

CanonicalMoments weighted_moments(const Eigen::VectorXd& weights,
                                  const Eigen::VectorXd& eps, int cutoff) {
  if (cutoff < 2) throw InvalidArgument("canonical moments need N >= 2");
  CanonicalMoments m;
  m.eps_star = weights.dot(eps);
  m.sigma_eps = std::sqrt(std::max(0.0, weights.dot((eps.array() - m.eps_star).square().matrix())));
  m.values.resize(static_cast<std::size_t>(cutoff));
  for (int n = 0; n < cutoff; ++n) {
    m.values[static_cast<std::size_t>(n)] =
        weights.dot((n * kPi * eps.array()).cos().matrix());
  }
  m.values[0] = 1.0;
  return m;
}

}  // namespace

CanonicalMoments canonical_moments(const GibbsEnsemble& ensemble,
                                   const SpectrumDecomposition& spectrum,
                                   const Rescaling& rescaling, int cutoff) {
  auto m = weighted_moments(ensemble.weights, spectrum.rescaled(rescaling), cutoff);
  m.provenance = "gibbs-exact";
  return m;
}

CanonicalMoments canonical_moments_tpq(const RescaledOperator& hamiltonian,
                                       double beta, int samples,
                                       std::uint64_t seed, int cutoff, double tol) {
  if (cutoff < 2) throw InvalidArgument("canonical moments need N >= 2");
  if (samples < 1) throw InvalidArgument("TPQ moments need R >= 1");
  const auto R = static_cast<std::size_t>(samples);
  const auto N = static_cast<std::size_t>(cutoff);
  const SparseOperator& h = hamiltonian.op;
  std::vector<double> log_w(R);
  std::vector<double> e1(R);
  std::vector<double> e2(R);
  std::vector<std::vector<double>> c(R, std::vector<double>(N));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < samples; ++r) {
    const auto i = static_cast<std::size_t>(r);
    const auto sample = thermal_pure_sample(hamiltonian, beta, derive_seed(seed, i));
    const StateVector& psi = sample.state;
    log_w[i] = 2.0 * sample.log_norm;
    StateVector hpsi(psi.size());
    h.apply({psi.data(), static_cast<std::size_t>(psi.size())},
            {hpsi.data(), static_cast<std::size_t>(hpsi.size())});
    e1[i] = psi.dot(hpsi).real();
    e2[i] = hpsi.squaredNorm();
    StateVector phi = psi;
    for (std::size_t n = 0; n < N; ++n) {
      if (n > 0) evolve_inplace(phi, h, kPi, tol);
      c[i][n] = psi.dot(phi).real();
    }
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  double wsum = 0.0;
  std::vector<double> w(R);
  for (std::size_t i = 0; i < R; ++i) {
    w[i] = std::exp(log_w[i] - top);
    wsum += w[i];
  }
  CanonicalMoments m;
  m.values.assign(N, 0.0);
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < R; ++i) {
    const double wi = w[i] / wsum;
    for (std::size_t n = 0; n < N; ++n) m.values[n] += wi * c[i][n];
    m1 += wi * e1[i];
    m2 += wi * e2[i];
  }
  m.values[0] = 1.0;
  m.eps_star = m1;
  m.sigma_eps = std::sqrt(std::max(0.0, m2 - m1 * m1));
  m.provenance = "tpq(R=" + std::to_string(samples) + ",seed=" + std::to_string(seed) + ")";
  return m;
}

SpectralSeries reconstruct_G(const CanonicalMoments& moments, bool apply_kernel) {
  if (moments.values.size() < 2) throw InvalidArgument("G reconstruction needs N >= 2");
  return reconstruct(moments.values, SpectralSeries::Kind::dos, apply_kernel);
}

std::vector<double> Window::grid() const {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    g[static_cast<std::size_t>(j)] = points == 1 ? center() : lo + (hi - lo) * j / (points - 1);
  }
  return g;
}

Window overlap_window(double eps1, double sigma1, double eps2, double sigma2,
                      int points) {
  if (points < 2) throw InvalidArgument("window needs at least two grid points");
  constexpr double kEdge = 1e-9;
  Window w;
  w.lo = std::max({eps1 - sigma1, eps2 - sigma2, kEdge});
  w.hi = std::min({eps1 + sigma1, eps2 + sigma2, 1.0 - kEdge});
  w.points = points;
  if (!(w.hi > w.lo)) {
    throw WindowError("ensemble windows do not overlap");
  }
  return w;
}

double constancy_objective(const SpectralSeries& g_prev, const SpectralSeries& g_next,
                           double beta_prev, double beta_next, const Window& window,
                           double width) {
  const auto w = window_values(g_prev, g_next, window);
  return constancy(w, (beta_next - beta_prev) * width).objective;
}

double logz_ratio(const SpectralSeries& g_prev, const SpectralSeries& g_next,
                  double beta_prev, double beta_next, const Window& window,
                  double width) {
  const auto w = window_values(g_prev, g_next, window);
  return constancy(w, (beta_next - beta_prev) * width).log_mean;
}

BetaStep infer_beta_step(const SpectralSeries& g_prev, const SpectralSeries& g_next,
                         double beta_prev, double center, double half_width,
                         double width, std::optional<BetaBracket> bracket,
                         int points) {
  if (!(half_width > 0.0) || !(width > 0.0)) {
    throw InvalidArgument("window half-width and energy width must be positive");
  }
  const Window window{center - half_width, center + half_width, points};
  const auto w = window_values(g_prev, g_next, window);
  auto f = [&](double beta) { return constancy(w, (beta - beta_prev) * width).objective; };

  double lo = 0.0;
  double hi = 0.0;
  if (bracket) {
    lo = bracket->lo;
    hi = bracket->hi;
  } else {
    const double g = 1.0 / (half_width * width);
    lo = beta_prev - g;
    hi = beta_prev + 4.0 * g;
  }
  if (!(hi > lo)) throw InvalidArgument("empty beta bracket");

  // Coarse scan, widening the bracket while the minimum sits on an edge.
  double a = lo;
  double b = hi;
  for (int expansion = 0;; ++expansion) {
    std::vector<double> xs(kScanPoints);
    std::vector<double> fs(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) {
      xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (kScanPoints - 1);
      fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
    }
    const auto best = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    if (best > 0 && best < kScanPoints - 1) {
      a = xs[static_cast<std::size_t>(best - 1)];
      b = xs[static_cast<std::size_t>(best + 1)];
      break;
    }
    if (expansion == kMaxExpansions) {
      throw BracketError("beta minimizer stuck at bracket edge [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
    }
    const double span = hi - lo;
    if (best == 0) lo -= span;
    else hi += span;
  }

  // Golden-section refinement.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  BetaStep step;
  step.beta = 0.5 * (a + b);
  const auto at = constancy(w, (step.beta - beta_prev) * width);
  step.residual = at.objective;
  step.logz_ratio = at.log_mean;
  return step;
}

// ---------------------------------------------------------------------------
// Ensemble sources

GibbsSource::GibbsSource(const SpectrumDecomposition& spectrum, const Rescaling& rescaling)
    : spectrum_(spectrum), rescaling_(rescaling) {}

CanonicalMoments GibbsSource::infinite_temperature(int cutoff) {
  return canonical_moments(gibbs_ensemble(spectrum_, 0.0, rescaling_), spectrum_,
                           rescaling_, cutoff);
}

double GibbsSource::min_eps() const {
  return rescaling_.to_rescaled(spectrum_.eigenvalues(0));
}

double GibbsSource::beta_for(double eps_target) const {
  auto mean = [&](double beta) { return gibbs_ensemble(spectrum_, beta, rescaling_).eps_star; };
  if (eps_target >= mean(0.0)) return 0.0;
  if (eps_target <= min_eps()) return kInfiniteBeta;
  double lo = 0.0;
  double hi = 1.0;
  while (mean(hi) > eps_target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return kInfiniteBeta;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean(mid) > eps_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CanonicalMoments GibbsSource::prepare(double eps_target, int cutoff) {
  return canonical_moments(gibbs_ensemble(spectrum_, beta_for(eps_target), rescaling_),
                           spectrum_, rescaling_, cutoff);
}

TpqSource::TpqSource(const RescaledOperator& hamiltonian, int samples,
                     std::uint64_t seed, double tol)
    : hamiltonian_(hamiltonian), samples_(samples), seed_(seed), tol_(tol) {
  if (samples < 1) throw InvalidArgument("TPQ source needs R >= 1");
}

double TpqSource::mean_eps(double beta) const {
  std::vector<double> log_w(static_cast<std::size_t>(samples_));
  std::vector<double> e(static_cast<std::size_t>(samples_));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < samples_; ++r) {
    const auto i = static_cast<std::size_t>(r);
    const auto s = thermal_pure_sample(hamiltonian_, beta, derive_seed(seed_, i));
    log_w[i] = 2.0 * s.log_norm;
    e[i] = expectation(hamiltonian_.op, s.state);
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double w = std::exp(log_w[i] - top);
    num += w * e[i];
    den += w;
  }
  return num / den;
}

CanonicalMoments TpqSource::infinite_temperature(int cutoff) {
  return canonical_moments_tpq(hamiltonian_, 0.0, samples_, seed_, cutoff, tol_);
}

double TpqSource::min_eps() const {
  return hamiltonian_.rescaling.to_rescaled(hamiltonian_.rescaling.e_min);
}

CanonicalMoments TpqSource::prepare(double eps_target, int cutoff) {
  // The filter is capped by the representable exponent range.
  const double beta_cap = 2800.0 / hamiltonian_.rescaling.width();
  double lo = 0.0;
  double hi = std::min(1.0, beta_cap);
  while (mean_eps(hi) > eps_target) {
    if (hi >= beta_cap) {
      throw RangeError("TPQ source cannot reach eps = " + std::to_string(eps_target));
    }
    lo = hi;
    hi = std::min(2.0 * hi, beta_cap);
  }
  for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_eps(mid) > eps_target ? lo : hi) = mid;
  }
  return canonical_moments_tpq(hamiltonian_, 0.5 * (lo + hi), samples_, seed_, cutoff, tol_);
}

MicrocanonicalSource::MicrocanonicalSource(const SpectrumDecomposition& spectrum,
                                           const Rescaling& rescaling,
                                           double shell_half_width)
    : spectrum_(spectrum),
      rescaling_(rescaling),
      eps_(spectrum.rescaled(rescaling)),
      shell_(shell_half_width) {
  if (!(shell_half_width > 0.0)) throw InvalidArgument("shell width must be positive");
}

CanonicalMoments MicrocanonicalSource::from_weights(const Eigen::VectorXd& weights,
                                                    int cutoff) const {
  auto m = weighted_moments(weights / weights.sum(), eps_, cutoff);
  m.provenance = "microcanonical";
  return m;
}

CanonicalMoments MicrocanonicalSource::infinite_temperature(int cutoff) {
  return from_weights(Eigen::VectorXd::Ones(eps_.size()), cutoff);
}

double MicrocanonicalSource::min_eps() const { return eps_(0); }

CanonicalMoments MicrocanonicalSource::prepare(double eps_target, int cutoff) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(eps_.size());
  for (Eigen::Index i = 0; i < eps_.size(); ++i) {
    if (std::abs(eps_(i) - eps_target) <= shell_) w(i) = 1.0;
  }
  if (w.sum() == 0.0) {
    Eigen::Index nearest = 0;
    (eps_.array() - eps_target).abs().minCoeff(&nearest);
    w(nearest) = 1.0;
  }
  return from_weights(w, cutoff);
}

// ---------------------------------------------------------------------------
// Iteration

namespace {

struct ChosenSeries {
  SpectralSeries prev;
  SpectralSeries next;
  bool jackson = false;
};

bool positive_on(const SpectralSeries& s, const Window& w) {
  for (double x : w.grid()) {
    if (!(s.evaluate(x) > 0.0)) return false;
  }
  return true;
}

ChosenSeries choose_series(const CanonicalMoments& prev, const CanonicalMoments& next,
                           const Window& window, KernelMode mode) {
  if (mode != KernelMode::jackson) {
    ChosenSeries raw{reconstruct_G(prev, false), reconstruct_G(next, false), false};
    if (mode == KernelMode::raw ||
        (positive_on(raw.prev, window) && positive_on(raw.next, window))) {
      return raw;
    }
  }
  return {reconstruct_G(prev, true), reconstruct_G(next, true), true};
}

}  // namespace

TheiTrace thei_run(EnsembleSource& source, const Rescaling& rescaling,
                   const TheiOptions& options) {
  if (options.cutoff < 16) throw InvalidArgument("THEI needs N >= 16");
  if (!(options.c_step > 0.0)) throw InvalidArgument("c_step must be positive");
  if (!options.beta_max && !options.eps_min) {
    throw InvalidArgument("THEI needs a target: beta_max or eps_min");
  }
  const double width = rescaling.width();
  const double log_d = std::log(static_cast<double>(rescaling.dimension));

  TheiTrace trace;
  CanonicalMoments current = source.infinite_temperature(options.cutoff);
  double beta = 0.0;
  double log_z = log_d;
  {
    TheiRow row;
    row.eps_star = current.eps_star;
    row.sigma_eps = current.sigma_eps;
    row.log_z = log_z;
    row.energy = rescaling.to_energy(current.eps_star);
    row.free_energy = std::numeric_limits<double>::quiet_NaN();
    row.entropy = log_d;
    trace.rows.push_back(row);
  }

  auto stop = [&](std::string why) {
    trace.complete = false;
    trace.diagnostic = std::move(why);
    return trace;
  };

  for (int step = 1; step <= options.max_steps; ++step) {
    if (options.beta_max && beta >= *options.beta_max) return trace;
    if (options.eps_min && current.eps_star <= *options.eps_min) return trace;

    double c = options.c_step;
    std::optional<BetaStep> accepted;
    CanonicalMoments next;
    bool used_jackson = false;
    for (int attempt = 0; attempt <= options.max_halvings; ++attempt, c *= 0.5) {
      const double target = current.eps_star - c * current.sigma_eps;
      if (target <= source.min_eps() + 1e-12) {
        trace.diagnostic = "reached the lowest energy the ensemble source can prepare";
        return trace;
      }
      try {
        next = source.prepare(target, options.cutoff);
        const Window window = overlap_window(current.eps_star, current.sigma_eps,
                                             next.eps_star, next.sigma_eps,
                                             options.window_points);
        const ChosenSeries g = choose_series(current, next, window, options.kernel);
        const double d_eps = current.eps_star - next.eps_star;
        const double sigma2 = current.sigma_eps * current.sigma_eps;
        const double guess = d_eps > 0.0 && sigma2 > 0.0
                                 ? d_eps / (sigma2 * width)
                                 : 1.0 / (window.half_width() * width);
        accepted = infer_beta_step(g.prev, g.next, beta, window.center(),
                                   window.half_width(), width,
                                   BetaBracket{beta - guess, beta + 4.0 * guess},
                                   options.window_points);
        used_jackson = g.jackson;
        break;
      } catch (const WindowError& e) {
        if (attempt == options.max_halvings) {
          return stop(std::string("window error after ") +
                      std::to_string(options.max_halvings) + " step halvings: " + e.what());
        }
      } catch (const BracketError& e) {
        return stop(e.what());
      } catch (const RangeError& e) {
        return stop(e.what());
      }
    }

    if (!(accepted->beta > beta)) {
      return stop("inferred beta did not increase (" + std::to_string(accepted->beta) +
                  " <= " + std::to_string(beta) + ")");
    }
    log_z += accepted->logz_ratio - (accepted->beta - beta) * rescaling.offset();
    beta = accepted->beta;
    current = std::move(next);

    TheiRow row;
    row.step = step;
    row.eps_star = current.eps_star;
    row.sigma_eps = current.sigma_eps;
    row.beta = beta;
    row.log_z = log_z;
    row.energy = rescaling.to_energy(current.eps_star);
    row.free_energy = -log_z / beta;
    row.entropy = beta * row.energy + log_z;
    row.residual = accepted->residual;
    row.jackson = used_jackson;
    row.verified = accepted->residual <= options.residual_threshold;
    trace.rows.push_back(row);
  }
  return stop("step budget exhausted");
}

Table TheiTrace::to_table() const {
  Table t({"step", "eps_star", "beta", "T", "logZ", "E", "F", "S", "residual",
           "sigma_eps", "kernel", "verified"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.step), format_number(r.eps_star), format_number(r.beta),
               format_number(r.beta > 0 ? 1.0 / r.beta : std::numeric_limits<double>::infinity()),
               format_number(r.log_z), format_number(r.energy), format_number(r.free_energy),
               format_number(r.entropy), format_number(r.residual),
               format_number(r.sigma_eps), r.step == 0 ? "-" : (r.jackson ? "jackson" : "raw"),
               r.verified ? "1" : "0"});
  }
  return t;
}

}  // namespace qkfe

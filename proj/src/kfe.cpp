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

#include "qkfe/kfe.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "qkfe/errors.hpp"
#include "qkfe/table.hpp"

namespace qkfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kShotStream = 0x5407;

void check_cutoff(int cutoff) {
  if (cutoff < 1) throw InvalidArgument("expansion cutoff N must be >= 1");
}

void check_observable(const SparseOperator& h, const SparseOperator* obs) {
  if (obs == nullptr) return;
  if (obs->dimension() != h.dimension()) {
    throw InvalidArgument("observable and Hamiltonian dimensions differ");
  }
  if (!obs->hermitian()) throw InvalidArgument("observable must be hermitian");
  for (const cplx& v : obs->values()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument("observable has non-finite entries");
    }
  }
}

StateVector apply_op(const SparseOperator& op, const StateVector& psi) {
  StateVector out(psi.size());
  op.apply({psi.data(), static_cast<std::size_t>(psi.size())},
           {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

Estimate mean_and_error(const std::vector<double>& xs) {
  Estimate e;
  const auto r = static_cast<double>(xs.size());
  for (double x : xs) e.value += x;
  e.value /= r;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.value) * (x - e.value);
    e.std_error = std::sqrt(ss / (r - 1.0) / r);
  }
  return e;
}

StateVector sample_state(int num_qubits, const StochasticOptions& options, int r) {
  return random_state(num_qubits, options.mode,
                      derive_seed(options.seed, static_cast<std::uint64_t>(r)));
}

// Projective measurement model for sigma_x (ancilla) times A (system).
struct ObservableBasis {
  bool diagonal = true;
  Eigen::VectorXd eigenvalues;  // diag(A) when diagonal
  Eigen::MatrixXcd eigenvectors;
};

ObservableBasis make_basis(const SparseOperator& obs) {
  ObservableBasis b;
  b.diagonal = obs.nonzeros() == obs.dimension();
  if (b.diagonal) {
    b.eigenvalues = obs.diagonal().real();
  } else {
    const auto spec = eigendecompose(obs);
    b.eigenvalues = spec.eigenvalues;
    b.eigenvectors = spec.eigenvectors;
  }
  return b;
}

struct ShotStats {
  double mean = 0.0;
  double second = 0.0;
};

ShotStats shots_plain(const StateVector& psi, const StateVector& evolved,
                      std::int64_t shots, std::uint64_t seed) {
  const double p = std::clamp(0.5 * (1.0 + psi.dot(evolved).real()), 0.0, 1.0);
  std::mt19937_64 rng(mix64(seed));
  std::binomial_distribution<std::int64_t> binom(shots, p);
  const auto plus = binom(rng);
  return {static_cast<double>(2 * plus - shots) / static_cast<double>(shots), 1.0};
}

ShotStats shots_joint(const StateVector& psi, const StateVector& evolved,
                      std::int64_t shots, std::uint64_t seed,
                      const ObservableBasis& basis) {
  // Post-measurement system amplitudes for ancilla outcome s: (psi + s U psi)/2.
  StateVector plus = 0.5 * (psi + evolved);
  StateVector minus = 0.5 * (psi - evolved);
  if (!basis.diagonal) {
    plus = basis.eigenvectors.adjoint() * plus;
    minus = basis.eigenvectors.adjoint() * minus;
  }
  std::map<double, double> outcome_prob;
  for (Eigen::Index z = 0; z < psi.size(); ++z) {
    const double a = basis.eigenvalues(z);
    outcome_prob[a] += std::norm(plus(z));
    outcome_prob[-a] += std::norm(minus(z));
  }
  std::vector<double> values;
  std::vector<double> probs;
  for (const auto& [v, p] : outcome_prob) {
    values.push_back(v);
    probs.push_back(p);
  }
  std::mt19937_64 rng(mix64(seed));
  std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
  ShotStats s;
  for (std::int64_t k = 0; k < shots; ++k) {
    const double v = values[dist(rng)];
    s.mean += v;
    s.second += v * v;
  }
  s.mean /= static_cast<double>(shots);
  s.second /= static_cast<double>(shots);
  return s;
}

}  // namespace

std::string Provenance::label() const {
  switch (kind) {
    case Kind::exact:
      return "exact";
    case Kind::stochastic:
      return "stochastic";
    case Kind::shot:
      return "shot";
  }
  return "unknown";
}

double SpectralSeries::evaluate(double eps) const {
  // Clenshaw recurrence on sum_n b_n T_n(x), x = cos(pi eps).
  const double x = std::cos(kPi * eps);
  double b1 = 0.0;
  double b2 = 0.0;
  for (int n = cutoff() - 1; n >= 1; --n) {
    const double b0 = 2.0 * coeffs[static_cast<std::size_t>(n)] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs.empty() ? 0.0 : coeffs[0] + x * b1 - b2;
}

std::vector<double> SpectralSeries::evaluate(std::span<const double> grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = evaluate(grid[i]);
  return out;
}

double moment_exact(const SpectrumDecomposition& spectrum,
                    const Rescaling& rescaling, int n,
                    const SparseOperator* observable) {
  if (n < 0) throw InvalidArgument("moment index must be >= 0");
  const auto m = moments_exact(spectrum, rescaling, n + 1, observable);
  return m.values.back();
}

MomentVector moments_exact(const SpectrumDecomposition& spectrum,
                           const Rescaling& rescaling, int cutoff,
                           const SparseOperator* observable,
                           std::optional<std::string> label) {
  check_cutoff(cutoff);
  const Eigen::VectorXd eps = spectrum.rescaled(rescaling);
  const Eigen::Index d = eps.size();
  Eigen::VectorXd weight = Eigen::VectorXd::Ones(d);
  if (observable != nullptr) {
    if (observable->dimension() != spectrum.dimension()) {
      throw InvalidArgument("observable and spectrum dimensions differ");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      const StateVector v = spectrum.eigenvectors.col(i);
      weight(i) = expectation(*observable, v);
    }
  }
  MomentVector out;
  out.values.resize(static_cast<std::size_t>(cutoff));
  out.stderrs.assign(static_cast<std::size_t>(cutoff), 0.0);
  out.provenance.kind = Provenance::Kind::exact;
  out.observable = std::move(label);
  if (observable != nullptr && !out.observable) out.observable = "observable";
  for (int n = 0; n < cutoff; ++n) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) acc += weight(i) * std::cos(n * kPi * eps(i));
    out.values[static_cast<std::size_t>(n)] = acc / static_cast<double>(d);
  }
  if (observable == nullptr) out.values[0] = 1.0;
  return out;
}

StochasticMoments moments_stochastic(const SparseOperator& rescaled_h,
                                     int cutoff,
                                     const StochasticOptions& options,
                                     std::span<const NamedObservable> observables) {
  check_cutoff(cutoff);
  if (options.samples < 2) throw InvalidArgument("stochastic moments need R >= 2");
  for (const auto& o : observables) check_observable(rescaled_h, o.op);
  const int R = options.samples;
  const std::size_t N = static_cast<std::size_t>(cutoff);
  const std::size_t K = observables.size();
  // samples[k][r][n], k = 0 is the DOS
  std::vector<std::vector<std::vector<double>>> samples(
      K + 1, std::vector<std::vector<double>>(static_cast<std::size_t>(R),
                                              std::vector<double>(N)));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < R; ++r) {
    const StateVector psi = sample_state(rescaled_h.num_qubits(), options, r);
    std::vector<StateVector> weighted;
    for (const auto& o : observables) weighted.push_back(apply_op(*o.op, psi));
    StateVector phi = psi;
    for (std::size_t n = 0; n < N; ++n) {
      if (n > 0) evolve_inplace(phi, rescaled_h, kPi, options.tol);
      samples[0][static_cast<std::size_t>(r)][n] = psi.dot(phi).real();
      for (std::size_t k = 0; k < K; ++k) {
        samples[k + 1][static_cast<std::size_t>(r)][n] = weighted[k].dot(phi).real();
      }
    }
  }
  auto collect = [&](std::size_t k, std::optional<std::string> name) {
    MomentVector mv;
    mv.provenance = {Provenance::Kind::stochastic, R, 0, options.seed};
    mv.observable = std::move(name);
    std::vector<double> column(static_cast<std::size_t>(R));
    for (std::size_t n = 0; n < N; ++n) {
      for (int r = 0; r < R; ++r) column[static_cast<std::size_t>(r)] = samples[k][static_cast<std::size_t>(r)][n];
      const Estimate e = mean_and_error(column);
      mv.values.push_back(e.value);
      mv.stderrs.push_back(e.std_error);
    }
    return mv;
  };
  StochasticMoments out;
  out.dos = collect(0, std::nullopt);
  for (std::size_t k = 0; k < K; ++k) {
    out.observables.push_back(collect(k + 1, observables[k].name));
  }
  return out;
}

Estimate moment_stochastic(const SparseOperator& rescaled_h, int n,
                           const StochasticOptions& options,
                           const SparseOperator* observable) {
  if (n < 0) throw InvalidArgument("moment index must be >= 0");
  if (options.samples < 2) throw InvalidArgument("stochastic moments need R >= 2");
  check_observable(rescaled_h, observable);
  std::vector<double> xs(static_cast<std::size_t>(options.samples));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < options.samples; ++r) {
    const StateVector psi = sample_state(rescaled_h.num_qubits(), options, r);
    const StateVector phi = evolve(psi, rescaled_h, n * kPi, options.tol);
    const StateVector bra = observable ? apply_op(*observable, psi) : psi;
    xs[static_cast<std::size_t>(r)] = bra.dot(phi).real();
  }
  return mean_and_error(xs);
}

std::int64_t ShotPlan::total() const {
  std::int64_t t = 0;
  for (auto k : shots) t += k;
  return t;
}

ShotPlan shot_plan_cubic(int cutoff, double kappa) {
  check_cutoff(cutoff);
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const double n = cutoff;
  const auto k = std::max<std::int64_t>(1, std::llround(kappa * n * n * n));
  return {cutoff, std::vector<std::int64_t>(static_cast<std::size_t>(cutoff), k)};
}

ShotPlan shot_plan_fixed(int cutoff, std::int64_t shots) {
  check_cutoff(cutoff);
  if (shots < 1) throw InvalidArgument("shot count K must be >= 1");
  return {cutoff, std::vector<std::int64_t>(static_cast<std::size_t>(cutoff), shots)};
}

double sample_shots(const StateVector& psi, const StateVector& evolved,
                    std::int64_t shots, std::uint64_t seed,
                    const SparseOperator* observable) {
  if (shots < 1) throw InvalidArgument("shot count K must be >= 1");
  if (observable == nullptr) return shots_plain(psi, evolved, shots, seed).mean;
  return shots_joint(psi, evolved, shots, seed, make_basis(*observable)).mean;
}

namespace {

MomentVector shot_moments_impl(const SparseOperator& h, const ShotPlan& plan,
                               const StochasticOptions& options,
                               const SparseOperator* observable,
                               int first_n, bool single_n) {
  check_observable(h, observable);
  if (options.samples < 1) throw InvalidArgument("shot moments need R >= 1");
  for (auto k : plan.shots) {
    if (k < 1) throw InvalidArgument("shot count K must be >= 1");
  }
  std::optional<ObservableBasis> basis;
  if (observable) basis = make_basis(*observable);
  const int R = options.samples;
  const int count = single_n ? 1 : plan.cutoff;
  std::vector<std::vector<ShotStats>> stats(
      static_cast<std::size_t>(R), std::vector<ShotStats>(static_cast<std::size_t>(count)));
  const std::uint64_t shot_seed = derive_seed(options.seed, kShotStream);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < R; ++r) {
    const StateVector psi = sample_state(h.num_qubits(), options, r);
    StateVector phi = psi;
    if (single_n) evolve_inplace(phi, h, first_n * kPi, options.tol);
    for (int i = 0; i < count; ++i) {
      const int n = first_n + i;
      if (!single_n && i > 0) evolve_inplace(phi, h, kPi, options.tol);
      const auto K = plan.shots[static_cast<std::size_t>(single_n ? 0 : i)];
      const auto seed = derive_seed(shot_seed, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(r));
      stats[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] =
          basis ? shots_joint(psi, phi, K, seed, *basis) : shots_plain(psi, phi, K, seed);
    }
  }
  MomentVector mv;
  mv.provenance = {Provenance::Kind::shot, R, plan.shots.empty() ? 0 : plan.shots[0],
                   options.seed};
  std::vector<double> column(static_cast<std::size_t>(R));
  for (int i = 0; i < count; ++i) {
    for (int r = 0; r < R; ++r) column[static_cast<std::size_t>(r)] = stats[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)].mean;
    Estimate e = mean_and_error(column);
    if (R == 1) {
      const auto& s = stats[0][static_cast<std::size_t>(i)];
      const auto K = static_cast<double>(plan.shots[static_cast<std::size_t>(single_n ? 0 : i)]);
      e.std_error = std::sqrt(std::max(0.0, s.second - s.mean * s.mean) / K);
    }
    mv.values.push_back(e.value);
    mv.stderrs.push_back(e.std_error);
  }
  return mv;
}

}  // namespace

Estimate moment_shot(const SparseOperator& rescaled_h, int n,
                     const StochasticOptions& options, std::int64_t shots,
                     const SparseOperator* observable) {
  if (n < 0) throw InvalidArgument("moment index must be >= 0");
  const ShotPlan plan = shot_plan_fixed(1, shots);
  const auto mv = shot_moments_impl(rescaled_h, plan, options, observable, n, true);
  return {mv.values[0], mv.stderrs[0]};
}

MomentVector moments_shot(const SparseOperator& rescaled_h, const ShotPlan& plan,
                          const StochasticOptions& options,
                          const SparseOperator* observable,
                          std::optional<std::string> label) {
  check_cutoff(plan.cutoff);
  auto mv = shot_moments_impl(rescaled_h, plan, options, observable, 0, false);
  mv.observable = std::move(label);
  if (observable != nullptr && !mv.observable) mv.observable = "observable";
  return mv;
}

double jackson_kernel(int n, int cutoff) {
  if (cutoff < 1 || n < 0 || n >= cutoff) {
    throw InvalidArgument("Jackson kernel index out of range: n = " +
                          std::to_string(n) + ", N = " + std::to_string(cutoff));
  }
  const double np1 = cutoff + 1.0;
  const double q = kPi / np1;
  return ((np1 - n) * std::cos(q * n) + std::sin(q * n) / std::tan(q)) / np1;
}

SpectralSeries reconstruct(std::span<const double> moments,
                           SpectralSeries::Kind kind, bool apply_kernel) {
  if (moments.empty()) throw InvalidArgument("cannot reconstruct from zero moments");
  SpectralSeries s;
  s.kind = kind;
  s.kernel_applied = apply_kernel;
  const int N = static_cast<int>(moments.size());
  s.coeffs.resize(moments.size());
  for (int n = 0; n < N; ++n) {
    s.coeffs[static_cast<std::size_t>(n)] =
        moments[static_cast<std::size_t>(n)] * (apply_kernel ? jackson_kernel(n, N) : 1.0);
  }
  return s;
}

SpectralSeries reconstruct(const MomentVector& moments, bool apply_kernel) {
  return reconstruct(moments.values,
                     moments.observable ? SpectralSeries::Kind::weighted
                                        : SpectralSeries::Kind::dos,
                     apply_kernel);
}

Table moment_table(const MomentVector& moments, const std::vector<double>* exact) {
  std::vector<std::string> columns = {"n", "value", "stderr", "provenance",
                                      "N", "R", "K", "seed"};
  if (exact) columns.push_back("exact");
  Table table(columns);
  const auto& p = moments.provenance;
  for (int n = 0; n < moments.cutoff(); ++n) {
    std::vector<std::string> row = {
        std::to_string(n),
        format_number(moments.values[static_cast<std::size_t>(n)]),
        format_number(moments.stderrs[static_cast<std::size_t>(n)]),
        p.label(),
        std::to_string(moments.cutoff()),
        std::to_string(p.samples),
        std::to_string(p.shots),
        std::to_string(p.seed)};
    if (exact) row.push_back(format_number((*exact)[static_cast<std::size_t>(n)]));
    table.add_row(std::move(row));
  }
  return table;
}

void write_moment_table(std::ostream& out, const MomentVector& moments,
                        const std::vector<std::string>& metadata,
                        const std::vector<double>* exact) {
  std::vector<std::string> meta = metadata;
  if (moments.observable) meta.push_back("observable: " + *moments.observable);
  moment_table(moments, exact).write_text(out, meta);
}

MomentVector read_moment_table(std::istream& in) {
  MomentVector mv;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# observable: ";
      if (line.rfind(key, 0) == 0) mv.observable = line.substr(key.size());
      continue;
    }
    if (!header_seen) {
      if (line.rfind("n\tvalue\tstderr\tprovenance", 0) != 0) {
        throw InvalidArgument("moment table header not recognized");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    int n = 0;
    std::string value, err, prov;
    int cutoff = 0, R = 0;
    std::int64_t K = 0;
    std::uint64_t seed = 0;
    if (!(row >> n >> value >> err >> prov >> cutoff >> R >> K >> seed)) {
      throw InvalidArgument("malformed moment table row: " + line);
    }
    if (n != mv.cutoff()) throw InvalidArgument("moment table rows out of order");
    mv.values.push_back(parse_number(value));
    mv.stderrs.push_back(parse_number(err));
    if (prov == "exact") mv.provenance.kind = Provenance::Kind::exact;
    else if (prov == "stochastic") mv.provenance.kind = Provenance::Kind::stochastic;
    else if (prov == "shot") mv.provenance.kind = Provenance::Kind::shot;
    else throw InvalidArgument("unknown provenance '" + prov + "'");
    mv.provenance.samples = R;
    mv.provenance.shots = K;
    mv.provenance.seed = seed;
  }
  if (!header_seen || mv.values.empty()) throw InvalidArgument("empty moment table");
  return mv;
}

}  // namespace qkfe

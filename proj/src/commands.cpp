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

#include "qkfe/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "qkfe/engine.hpp"
#include "qkfe/errors.hpp"
#include "qkfe/kfe.hpp"
#include "qkfe/prep.hpp"
#include "qkfe/table.hpp"
#include "qkfe/thei.hpp"
#include "qkfe/thermo.hpp"
#include "qkfe/trotter.hpp"

namespace qkfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> metadata(const std::string& command, const RunConfig& config,
                                  const std::string& provenance) {
  std::vector<std::string> meta = {
      std::string("qkfe ") + QKFE_VERSION,
      "command: " + command,
      "model: " + config.model.describe(),
      "provenance: " + provenance,
      "seed: " + std::to_string(config.seed),
      "config:"};
  std::istringstream yaml(config.to_yaml());
  for (std::string line; std::getline(yaml, line);) meta.push_back("  " + line);
  return meta;
}

void save(const CommandContext& ctx, const std::string& stem, const Table& table,
          const std::vector<std::string>& meta) {
  namespace fs = std::filesystem;
  fs::create_directories(ctx.output_dir);
  {
    std::ofstream f(fs::path(ctx.output_dir) / (stem + ".tsv"), std::ios::binary);
    table.write_text(f, meta);
  }
  if (ctx.json) {
    std::ofstream f(fs::path(ctx.output_dir) / (stem + ".json"), std::ios::binary);
    table.write_json(f, meta);
  }
}

void say(const CommandContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

// Everything a command needs about the model.
struct Setup {
  HamiltonianTerms terms;
  SparseOperator h;
  RescaledOperator rescaled;
  std::optional<SpectrumDecomposition> spectrum;
  std::vector<std::unique_ptr<SparseOperator>> observable_ops;
  std::string observable_name;

  const SparseOperator* observable() const {
    return observable_ops.empty() ? nullptr : observable_ops.front().get();
  }
};

Setup make_setup(const RunConfig& config, double margin_fraction) {
  Setup s;
  s.terms = build_model(config.model);
  s.h = to_sparse(s.terms);
  const int L = s.terms.num_qubits();
  if (L <= config.oracle_max_qubits) {
    s.spectrum = eigendecompose(s.h, config.oracle_max_qubits);
    const auto& e = s.spectrum->eigenvalues;
    s.rescaled = rescale(s.h, std::make_pair(e(0), e(e.size() - 1)), margin_fraction);
  } else {
    s.rescaled = rescale(s.h, std::nullopt, margin_fraction, config.oracle_max_qubits);
  }
  const auto& obs = config.observable;
  if (obs.kind != ObservableConfig::Kind::none) {
    const auto terms = obs.kind == ObservableConfig::Kind::zz
                           ? zz_correlator(L, obs.pairs[0].first, obs.pairs[0].second)
                           : density_correlator(L, obs.pairs);
    s.observable_ops.push_back(std::make_unique<SparseOperator>(to_sparse(terms)));
    s.observable_name = obs.describe();
  }
  return s;
}

StochasticOptions stochastic_options(const RunConfig& config, int L) {
  StochasticOptions o;
  o.samples = config.moments.samples;
  o.seed = config.seed;
  if (config.moments.random_state == "scrambled") {
    o.mode = RandomStateMode::scrambled(config.moments.depth < 0 ? 2 * L : config.moments.depth);
  }
  return o;
}

struct Moments {
  MomentVector dos;
  std::optional<MomentVector> weighted;
};

Moments compute_moments(const RunConfig& config, const Setup& s) {
  const int N = config.cutoff;
  const auto* obs = s.observable();
  Moments m;
  switch (config.moments.mode) {
    case MomentConfig::Mode::exact: {
      if (!s.spectrum) {
        throw CapacityError("exact moments need the eigen-oracle; raise oracle_max_qubits "
                            "or use stochastic mode");
      }
      m.dos = moments_exact(*s.spectrum, s.rescaled.rescaling, N);
      if (obs) m.weighted = moments_exact(*s.spectrum, s.rescaled.rescaling, N, obs, s.observable_name);
      break;
    }
    case MomentConfig::Mode::stochastic: {
      std::vector<NamedObservable> named;
      if (obs) named.push_back({s.observable_name, obs});
      auto st = moments_stochastic(s.rescaled.op, N,
                                   stochastic_options(config, s.terms.num_qubits()), named);
      m.dos = std::move(st.dos);
      if (obs) m.weighted = std::move(st.observables.front());
      break;
    }
    case MomentConfig::Mode::shot: {
      const ShotPlan plan = config.moments.shot_rule == "fixed"
                                ? shot_plan_fixed(N, config.moments.shots)
                                : shot_plan_cubic(N, config.moments.kappa);
      const auto opts = stochastic_options(config, s.terms.num_qubits());
      m.dos = moments_shot(s.rescaled.op, plan, opts);
      if (obs) m.weighted = moments_shot(s.rescaled.op, plan, opts, obs, s.observable_name);
      break;
    }
  }
  return m;
}

std::string provenance_text(const MomentVector& m) {
  const auto& p = m.provenance;
  std::string s = p.label();
  if (p.kind != Provenance::Kind::exact) s += " R=" + std::to_string(p.samples);
  if (p.kind == Provenance::Kind::shot) s += " K=" + std::to_string(p.shots);
  return s + " N=" + std::to_string(m.cutoff());
}

int cmd_moments(const RunConfig& config, const CommandContext& ctx) {
  const Setup s = make_setup(config, config.margin_fraction);
  const Moments m = compute_moments(config, s);
  auto write = [&](const MomentVector& mv, const SparseOperator* obs, const std::string& stem) {
    std::optional<std::vector<double>> exact;
    if (s.spectrum) exact = moments_exact(*s.spectrum, s.rescaled.rescaling, config.cutoff, obs).values;
    auto meta = metadata("moments", config, provenance_text(mv));
    if (mv.observable) meta.push_back("observable: " + *mv.observable);
    save(ctx, stem, moment_table(mv, exact ? &*exact : nullptr), meta);
  };
  write(m.dos, nullptr, "moments");
  if (m.weighted) write(*m.weighted, s.observable(), "moments_observable");
  say(ctx, "moments: N=" + std::to_string(config.cutoff) + " " + provenance_text(m.dos) +
               " c0=" + format_number(m.dos.values[0]));
  return kExitOk;
}

int cmd_dos(const RunConfig& config, const CommandContext& ctx) {
  const Setup s = make_setup(config, config.margin_fraction);
  const Moments m = compute_moments(config, s);
  const SpectralSeries with = reconstruct(m.dos, true);
  const SpectralSeries without = reconstruct(m.dos, false);
  const auto& r = s.rescaled.rescaling;
  Table t({"eps", "E", "rho_jackson", "rho_raw"});
  const int P = config.dos_points;
  for (int i = 0; i < P; ++i) {
    const double eps = (i + 0.5) / P;
    t.add_numeric_row({eps, r.to_energy(eps), with.evaluate(eps), without.evaluate(eps)});
  }
  save(ctx, "dos", t, metadata("dos", config, provenance_text(m.dos)));
  say(ctx, "dos: " + std::to_string(P) + " points written");
  return kExitOk;
}

int cmd_thermo(const RunConfig& config, const CommandContext& ctx) {
  const auto betas = config.beta_grid();
  if (betas.empty()) throw InvalidArgument("thermo needs a nonempty T or beta grid");
  const Setup s = make_setup(config, config.margin_fraction);
  const Moments m = compute_moments(config, s);
  const SpectralSeries rho = reconstruct(m.dos, true);
  std::optional<SpectralSeries> a;
  if (m.weighted) a = reconstruct(*m.weighted, true);
  const ThermoCurve curve = thermo_curve(rho, betas, s.rescaled.rescaling, a ? &*a : nullptr);

  Table base = curve.to_table();
  std::vector<std::string> cols = base.columns();
  if (s.spectrum) {
    for (const char* c : {"Z_ratio", "E_exact", "S_exact", "A_exact"}) cols.emplace_back(c);
  }
  Table t(cols);
  double worst_z = 0.0;
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    std::vector<std::string> cells = base.rows()[i];
    if (s.spectrum) {
      const auto& row = curve.rows[i];
      const auto exact = exact_thermo(*s.spectrum, row.beta);
      double a_exact = kNaN;
      if (s.observable()) {
        const auto g = gibbs_ensemble(*s.spectrum, row.beta, s.rescaled.rescaling);
        a_exact = 0.0;
        for (Eigen::Index k = 0; k < g.weights.size(); ++k) {
          a_exact += g.weights(k) * expectation(*s.observable(), s.spectrum->eigenvectors.col(k));
        }
      }
      const double ratio = std::exp(row.log_z_absolute - exact.log_z);
      worst_z = std::max(worst_z, std::abs(ratio - 1.0));
      for (double v : {ratio, exact.energy, exact.entropy, a_exact}) cells.push_back(format_number(v));
    }
    t.add_row(cells);
  }
  save(ctx, "thermo", t, metadata("thermo", config, provenance_text(m.dos)));
  std::string summary = "thermo: " + std::to_string(curve.rows.size()) + " rows";
  if (s.spectrum) summary += ", max |Z/Z_exact - 1| = " + format_number(worst_z);
  say(ctx, summary);
  return kExitOk;
}

int cmd_thei(const RunConfig& config, const CommandContext& ctx) {
  const Setup s = make_setup(config, config.thei.margin_fraction);
  const auto& r = s.rescaled.rescaling;
  std::unique_ptr<EnsembleSource> source;
  if (config.thei.ensemble == "tpq") {
    source = std::make_unique<TpqSource>(s.rescaled, config.thei.samples, config.seed);
  } else {
    if (!s.spectrum) {
      throw CapacityError("the " + config.thei.ensemble +
                          " ensemble source needs the eigen-oracle; use ensemble: tpq");
    }
    if (config.thei.ensemble == "gibbs") source = std::make_unique<GibbsSource>(*s.spectrum, r);
    else source = std::make_unique<MicrocanonicalSource>(*s.spectrum, r, config.thei.shell);
  }
  TheiOptions opts;
  opts.cutoff = config.cutoff;
  opts.beta_max = config.thei.beta_max;
  opts.eps_min = config.thei.eps_min;
  if (!opts.beta_max && !opts.eps_min) opts.beta_max = 1.0;
  opts.c_step = config.thei.c_step;
  opts.residual_threshold = config.thei.residual_threshold;
  opts.kernel = config.thei.kernel;
  const TheiTrace trace = thei_run(*source, r, opts);

  Table base = trace.to_table();
  std::vector<std::string> cols = base.columns();
  std::optional<GibbsSource> oracle;
  if (s.spectrum) {
    oracle.emplace(*s.spectrum, r);
    for (const char* c : {"beta_exact", "F_exact", "S_exact"}) cols.emplace_back(c);
  }
  Table t(cols);
  double dev_beta = 0.0, dev_f = 0.0, dev_s = 0.0;
  int unverified = 0;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& row = trace.rows[i];
    if (!row.verified) ++unverified;
    std::vector<std::string> cells = base.rows()[i];
    if (oracle) {
      const double b = oracle->beta_for(row.eps_star);
      const auto ex = exact_thermo(*s.spectrum, b);
      for (double v : {b, ex.free_energy, ex.entropy}) cells.push_back(format_number(v));
      if (i > 0 && std::isfinite(b) && b > 0) {
        dev_beta = std::max(dev_beta, std::abs(row.beta / b - 1.0));
        dev_f = std::max(dev_f, std::abs(row.free_energy / ex.free_energy - 1.0));
        dev_s = std::max(dev_s, std::abs(row.entropy - ex.entropy) /
                                    std::log(static_cast<double>(r.dimension)));
      }
    }
    t.add_row(cells);
  }
  auto meta = metadata("thei", config, source->name() + " N=" + std::to_string(config.cutoff));
  meta.push_back("complete: " + std::string(trace.complete ? "yes" : "no"));
  if (!trace.diagnostic.empty()) meta.push_back("diagnostic: " + trace.diagnostic);
  save(ctx, "thei", t, meta);
  std::string summary = "thei: " + std::to_string(trace.steps()) + " steps, " +
                        std::to_string(unverified) + " above residual threshold";
  if (oracle) {
    summary += ", max rel dev beta " + format_number(dev_beta) + ", F " + format_number(dev_f) +
               ", S/(L log 2) " + format_number(dev_s);
  }
  say(ctx, summary);
  if (!trace.complete) {
    say(ctx, "thei aborted: " + trace.diagnostic);
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_prep(const RunConfig& config, const CommandContext& ctx) {
  const HamiltonianTerms terms = build_model(config.model);
  const int L = terms.num_qubits();
  const auto gate_list = default_ramp_sequence(terms, config.prep.steps, config.prep.dt);
  const auto traj = trajectory(plus_state(L), gate_list, terms);
  Table t({"p", "gate", "E", "bound"});
  for (std::size_t p = 0; p < traj.energies.size(); ++p) {
    t.add_row({std::to_string(p), p == 0 ? "-" : gate_list[p - 1].name,
               format_number(traj.energies[p]),
               p == 0 ? "nan" : format_number(traj.bounds[p - 1])});
  }
  auto meta = metadata("prep", config, "ramp steps=" + std::to_string(config.prep.steps));
  std::string summary = "prep: " + std::to_string(gate_list.size()) + " gates, E0 = " +
                        format_number(traj.energies.front()) + ", E_final = " +
                        format_number(traj.energies.back());
  if (L <= config.oracle_max_qubits) {
    const auto spec = eigendecompose(to_sparse(terms), config.oracle_max_qubits);
    meta.push_back("ground_energy: " + format_number(spec.eigenvalues(0)));
    summary += ", ground = " + format_number(spec.eigenvalues(0));
  }
  if (config.prep.target_energy) {
    const int p = select_step(traj, *config.prep.target_energy);
    meta.push_back("selected_step: " + std::to_string(p));
    summary += ", selected p = " + std::to_string(p);
  }
  save(ctx, "prep", t, meta);
  {
    std::filesystem::create_directories(ctx.output_dir);
    std::ofstream f(std::filesystem::path(ctx.output_dir) / "prep_gates.txt", std::ios::binary);
    write_gates(f, gate_list);
  }
  say(ctx, summary);
  return kExitOk;
}

int cmd_gatecount(const RunConfig& config, const CommandContext& ctx) {
  const auto& g = config.gatecount;
  const double dt = g.dt_over_pi * kPi;
  const std::int64_t formula = gate_count(g.length, g.n, dt);
  const auto terms = build_1d_xxz(g.length, config.model.delta);
  const auto h = to_sparse(terms);
  const Rescaling r = rescale(h, std::nullopt, config.margin_fraction,
                              config.oracle_max_qubits).rescaling;
  const Circuit c = trotterized_controlled_evolution(terms, r, g.n, dt);
  Table t({"L", "n", "dt_over_pi", "trotter_steps", "formula", "constructed", "single_qubit"});
  t.add_row({std::to_string(g.length), std::to_string(g.n), format_number(g.dt_over_pi),
             std::to_string(trotter_steps(g.n, dt)), std::to_string(formula),
             std::to_string(c.two_qubit_count()), std::to_string(c.single_qubit_count())});
  save(ctx, "gatecount", t, metadata("gatecount", config, "closed form and construction"));
  say(ctx, "gatecount: formula " + std::to_string(formula) + ", constructed " +
               std::to_string(c.two_qubit_count()));
  if (formula != c.two_qubit_count()) {
    say(ctx, "gatecount: closed form and construction disagree");
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int exit_code_for(const std::exception& error) {
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    switch (e->category()) {
      case Error::Category::validation:
        return kExitValidation;
      case Error::Category::numerical:
        return kExitNumerical;
      case Error::Category::capacity:
        return kExitCapacity;
    }
  }
  if (dynamic_cast<const std::invalid_argument*>(&error)) return kExitValidation;
  return kExitNumerical;
}

int run_command(const std::string& name, const RunConfig& config,
                const CommandContext& context) {
  if (name == "moments") return cmd_moments(config, context);
  if (name == "dos") return cmd_dos(config, context);
  if (name == "thermo") return cmd_thermo(config, context);
  if (name == "thei") return cmd_thei(config, context);
  if (name == "prep") return cmd_prep(config, context);
  if (name == "gatecount") return cmd_gatecount(config, context);
  throw InvalidArgument("unknown command '" + name + "'");
}

}  // namespace qkfe

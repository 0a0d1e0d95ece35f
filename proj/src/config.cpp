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

#include "qkfe/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qkfe/errors.hpp"
#include "qkfe/table.hpp"

namespace qkfe {

namespace {

void reject_unknown(const YAML::Node& node, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!node) return;
  if (!node.IsMap()) throw InvalidArgument("'" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw InvalidArgument("unknown configuration key '" +
                            (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& key, T fallback, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw InvalidArgument("bad value for '" + (where.empty() ? key : where + "." + key) +
                          "': " + YAML::Dump(v));
  }
}

template <class T>
std::optional<T> get_opt(const YAML::Node& node, const std::string& key, const std::string& where) {
  if (!node[key] || node[key].IsNull()) return std::nullopt;
  return get<T>(node, key, T{}, where);
}

std::vector<double> get_list(const YAML::Node& node, const std::string& key) {
  const YAML::Node v = node[key];
  if (!v) return {};
  try {
    if (v.IsSequence()) return v.as<std::vector<double>>();
    return {v.as<double>()};
  } catch (const YAML::Exception&) {
    throw InvalidArgument("bad value for '" + key + "': expected a number list");
  }
}

ObservableConfig parse_observable(const std::string& text) {
  ObservableConfig o;
  if (text.empty() || text == "none") return o;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "zz") o.kind = ObservableConfig::Kind::zz;
  else if (kind == "density") o.kind = ObservableConfig::Kind::density;
  else throw InvalidArgument("observable must be none, zz:i,j or density:i,j[;k,l...]");
  if (colon == std::string::npos) throw InvalidArgument("observable needs site pairs");
  std::stringstream pairs(text.substr(colon + 1));
  for (std::string item; std::getline(pairs, item, ';');) {
    int i = 0, j = 0;
    char comma = 0;
    std::istringstream p(item);
    if (!(p >> i >> comma >> j) || comma != ',' || i == j) {
      throw InvalidArgument("bad observable site pair '" + item + "'");
    }
    o.pairs.emplace_back(i, j);
  }
  if (o.kind == ObservableConfig::Kind::zz && o.pairs.size() != 1) {
    throw InvalidArgument("zz observable takes exactly one site pair");
  }
  return o;
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidArgument("override must look like key=value: '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  std::vector<std::string> keys;
  std::stringstream ss(path);
  for (std::string k; std::getline(ss, k, '.');) keys.push_back(k);
  // Walk by copying handles; yaml-cpp nodes are reference-like.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    YAML::Node child = chain.back()[keys[i]];
    if (!child.IsDefined() || child.IsNull()) {
      chain.back()[keys[i]] = YAML::Node(YAML::NodeType::Map);
      child = chain.back()[keys[i]];
    }
    chain.push_back(child);
  }
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    throw InvalidArgument("cannot parse override value '" + value + "': " + e.what());
  }
  chain.back()[keys.back()] = parsed;
}

std::string kernel_name(KernelMode k) {
  switch (k) {
    case KernelMode::jackson:
      return "jackson";
    case KernelMode::raw:
      return "raw";
    case KernelMode::automatic:
      return "auto";
  }
  return "auto";
}

}  // namespace

std::string ObservableConfig::describe() const {
  if (kind == Kind::none) return "none";
  std::string s = kind == Kind::zz ? "zz:" : "density:";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    s += (i ? ";" : "") + std::to_string(pairs[i].first) + "," + std::to_string(pairs[i].second);
  }
  return s;
}

std::vector<double> RunConfig::beta_grid() const {
  std::vector<double> grid = betas;
  for (double t : temperatures) grid.push_back(1.0 / t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

RunConfig load_config(const std::string& yaml_text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(std::string("malformed configuration: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw InvalidArgument("configuration must be a mapping");
  for (const auto& o : overrides) apply_override(root, o);

  reject_unknown(root,
                 {"model", "L", "Lx", "Ly", "delta", "delta_prime", "v", "margin_fraction",
                  "seed", "N", "moments", "T", "beta", "observable", "thei", "prep",
                  "gatecount", "oracle_max_qubits", "dos_points", "output"},
                 "");
  RunConfig c;
  const auto model = get<std::string>(root, "model", "xxz1d", "");
  if (model == "xxz1d") c.model.kind = ModelSpec::Kind::xxz1d;
  else if (model == "xxz2d") c.model.kind = ModelSpec::Kind::xxz2d;
  else if (model == "tv2d") c.model.kind = ModelSpec::Kind::tv2d;
  else throw InvalidArgument("model must be one of xxz1d, xxz2d, tv2d (got '" + model + "')");
  c.model.length = get<int>(root, "L", 8, "");
  c.model.lx = get<int>(root, "Lx", 2, "");
  c.model.ly = get<int>(root, "Ly", 2, "");
  c.model.delta = get<double>(root, "delta", -0.9, "");
  c.model.delta_prime = get<double>(root, "delta_prime", -0.5, "");
  c.model.interaction = get<double>(root, "v", 2.0, "");
  c.margin_fraction = get<double>(root, "margin_fraction", c.margin_fraction, "");
  c.seed = get<std::uint64_t>(root, "seed", c.seed, "");
  c.cutoff = get<int>(root, "N", c.cutoff, "");
  c.oracle_max_qubits = get<int>(root, "oracle_max_qubits", c.oracle_max_qubits, "");
  c.dos_points = get<int>(root, "dos_points", c.dos_points, "");
  c.output_dir = get<std::string>(root, "output", c.output_dir, "");
  c.temperatures = get_list(root, "T");
  c.betas = get_list(root, "beta");
  c.observable = parse_observable(get<std::string>(root, "observable", "none", ""));

  if (const YAML::Node m = root["moments"]) {
    reject_unknown(m, {"mode", "R", "shot_rule", "kappa", "K", "random_state", "depth"},
                   "moments");
    const auto mode = get<std::string>(m, "mode", "exact", "moments");
    if (mode == "exact") c.moments.mode = MomentConfig::Mode::exact;
    else if (mode == "stochastic") c.moments.mode = MomentConfig::Mode::stochastic;
    else if (mode == "shot") c.moments.mode = MomentConfig::Mode::shot;
    else throw InvalidArgument("moments.mode must be exact, stochastic or shot");
    c.moments.samples = get<int>(m, "R", c.moments.samples, "moments");
    c.moments.shot_rule = get<std::string>(m, "shot_rule", c.moments.shot_rule, "moments");
    c.moments.kappa = get<double>(m, "kappa", c.moments.kappa, "moments");
    c.moments.shots = get<std::int64_t>(m, "K", c.moments.shots, "moments");
    c.moments.random_state = get<std::string>(m, "random_state", c.moments.random_state, "moments");
    c.moments.depth = get<int>(m, "depth", c.moments.depth, "moments");
  }
  if (const YAML::Node t = root["thei"]) {
    reject_unknown(t, {"c_step", "residual_threshold", "ensemble", "beta_max", "eps_min",
                       "kernel", "margin_fraction", "R", "shell"},
                   "thei");
    c.thei.c_step = get<double>(t, "c_step", c.thei.c_step, "thei");
    c.thei.residual_threshold = get<double>(t, "residual_threshold", c.thei.residual_threshold, "thei");
    c.thei.ensemble = get<std::string>(t, "ensemble", c.thei.ensemble, "thei");
    c.thei.beta_max = get_opt<double>(t, "beta_max", "thei");
    c.thei.eps_min = get_opt<double>(t, "eps_min", "thei");
    const auto kernel = get<std::string>(t, "kernel", "auto", "thei");
    if (kernel == "auto") c.thei.kernel = KernelMode::automatic;
    else if (kernel == "jackson") c.thei.kernel = KernelMode::jackson;
    else if (kernel == "raw") c.thei.kernel = KernelMode::raw;
    else throw InvalidArgument("thei.kernel must be auto, jackson or raw");
    c.thei.margin_fraction = get<double>(t, "margin_fraction", c.thei.margin_fraction, "thei");
    c.thei.samples = get<int>(t, "R", c.thei.samples, "thei");
    c.thei.shell = get<double>(t, "shell", c.thei.shell, "thei");
  }
  if (const YAML::Node p = root["prep"]) {
    reject_unknown(p, {"steps", "dt", "target_energy"}, "prep");
    c.prep.steps = get<int>(p, "steps", c.prep.steps, "prep");
    c.prep.dt = get<double>(p, "dt", c.prep.dt, "prep");
    c.prep.target_energy = get_opt<double>(p, "target_energy", "prep");
  }
  if (const YAML::Node g = root["gatecount"]) {
    reject_unknown(g, {"L", "n", "dt_over_pi"}, "gatecount");
    c.gatecount.length = get<int>(g, "L", c.gatecount.length, "gatecount");
    c.gatecount.n = get<int>(g, "n", c.gatecount.n, "gatecount");
    c.gatecount.dt_over_pi = get<double>(g, "dt_over_pi", c.gatecount.dt_over_pi, "gatecount");
  }

  // Validation up front, before any computation.
  (void)build_model(c.model);
  if (!(c.margin_fraction >= 0.0)) throw InvalidArgument("margin_fraction must be >= 0");
  if (c.cutoff < 1) throw InvalidArgument("N must be >= 1");
  if (c.oracle_max_qubits < 1) throw InvalidArgument("oracle_max_qubits must be >= 1");
  if (c.dos_points < 2) throw InvalidArgument("dos_points must be >= 2");
  for (double t : c.temperatures) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("temperatures must be positive");
  }
  for (double b : c.betas) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidArgument("beta values must be >= 0");
  }
  if (c.moments.mode == MomentConfig::Mode::stochastic && c.moments.samples < 2) {
    throw InvalidArgument("moments.R must be >= 2 in stochastic mode");
  }
  if (c.moments.mode == MomentConfig::Mode::shot) {
    if (c.moments.samples < 1) throw InvalidArgument("moments.R must be >= 1 in shot mode");
    if (c.moments.shot_rule != "cubic" && c.moments.shot_rule != "fixed") {
      throw InvalidArgument("moments.shot_rule must be cubic or fixed");
    }
    if (c.moments.shots < 1) throw InvalidArgument("moments.K must be >= 1");
    if (!(c.moments.kappa > 0.0)) throw InvalidArgument("moments.kappa must be positive");
  }
  if (c.moments.random_state != "haar" && c.moments.random_state != "scrambled") {
    throw InvalidArgument("moments.random_state must be haar or scrambled");
  }
  const int L = c.model.num_qubits();
  for (const auto& [i, j] : c.observable.pairs) {
    if (i < 0 || j < 0 || i >= L || j >= L) {
      throw InvalidArgument("observable site outside [0, " + std::to_string(L) + ")");
    }
  }
  if (!(c.thei.c_step > 0.0)) throw InvalidArgument("thei.c_step must be positive");
  if (!(c.thei.residual_threshold > 0.0)) {
    throw InvalidArgument("thei.residual_threshold must be positive");
  }
  if (c.thei.ensemble != "gibbs" && c.thei.ensemble != "tpq" &&
      c.thei.ensemble != "microcanonical") {
    throw InvalidArgument("thei.ensemble must be gibbs, tpq or microcanonical");
  }
  if (!(c.thei.margin_fraction >= 0.0)) throw InvalidArgument("thei.margin_fraction must be >= 0");
  if (c.thei.samples < 1) throw InvalidArgument("thei.R must be >= 1");
  if (c.prep.steps < 0) throw InvalidArgument("prep.steps must be >= 0");
  if (!(c.prep.dt > 0.0)) throw InvalidArgument("prep.dt must be positive");
  if (c.gatecount.length < 2 || c.gatecount.n < 1 || !(c.gatecount.dt_over_pi > 0.0)) {
    throw InvalidArgument("gatecount needs L >= 2, n >= 1, dt_over_pi > 0");
  }
  return c;
}

std::string RunConfig::to_yaml() const {
  YAML::Emitter out;
  auto num = [](double v) { return format_number(v); };
  auto list = [&](const std::vector<double>& xs) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double x : xs) out << num(x);
    out << YAML::EndSeq;
  };
  auto optional = [&](const std::optional<double>& v) {
    if (v) out << num(*v);
    else out << YAML::Null;
  };
  out << YAML::BeginMap;
  const char* model_name[] = {"xxz1d", "xxz2d", "tv2d"};
  out << YAML::Key << "model" << YAML::Value << model_name[static_cast<int>(model.kind)];
  if (model.kind == ModelSpec::Kind::xxz1d) {
    out << YAML::Key << "L" << YAML::Value << model.length;
    out << YAML::Key << "delta" << YAML::Value << num(model.delta);
  } else {
    out << YAML::Key << "Lx" << YAML::Value << model.lx;
    out << YAML::Key << "Ly" << YAML::Value << model.ly;
    if (model.kind == ModelSpec::Kind::xxz2d) {
      out << YAML::Key << "delta_prime" << YAML::Value << num(model.delta_prime);
    } else {
      out << YAML::Key << "v" << YAML::Value << num(model.interaction);
    }
  }
  out << YAML::Key << "margin_fraction" << YAML::Value << num(margin_fraction);
  out << YAML::Key << "seed" << YAML::Value << seed;
  out << YAML::Key << "N" << YAML::Value << cutoff;
  out << YAML::Key << "moments" << YAML::Value << YAML::BeginMap;
  const char* mode_name[] = {"exact", "stochastic", "shot"};
  out << YAML::Key << "mode" << YAML::Value << mode_name[static_cast<int>(moments.mode)];
  out << YAML::Key << "R" << YAML::Value << moments.samples;
  out << YAML::Key << "shot_rule" << YAML::Value << moments.shot_rule;
  out << YAML::Key << "kappa" << YAML::Value << num(moments.kappa);
  out << YAML::Key << "K" << YAML::Value << moments.shots;
  out << YAML::Key << "random_state" << YAML::Value << moments.random_state;
  out << YAML::Key << "depth" << YAML::Value << moments.depth;
  out << YAML::EndMap;
  out << YAML::Key << "T" << YAML::Value;
  list(temperatures);
  out << YAML::Key << "beta" << YAML::Value;
  list(betas);
  out << YAML::Key << "observable" << YAML::Value << observable.describe();
  out << YAML::Key << "thei" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "c_step" << YAML::Value << num(thei.c_step);
  out << YAML::Key << "residual_threshold" << YAML::Value << num(thei.residual_threshold);
  out << YAML::Key << "ensemble" << YAML::Value << thei.ensemble;
  out << YAML::Key << "beta_max" << YAML::Value;
  optional(thei.beta_max);
  out << YAML::Key << "eps_min" << YAML::Value;
  optional(thei.eps_min);
  out << YAML::Key << "kernel" << YAML::Value << kernel_name(thei.kernel);
  out << YAML::Key << "margin_fraction" << YAML::Value << num(thei.margin_fraction);
  out << YAML::Key << "R" << YAML::Value << thei.samples;
  out << YAML::Key << "shell" << YAML::Value << num(thei.shell);
  out << YAML::EndMap;
  out << YAML::Key << "prep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "steps" << YAML::Value << prep.steps;
  out << YAML::Key << "dt" << YAML::Value << num(prep.dt);
  out << YAML::Key << "target_energy" << YAML::Value;
  optional(prep.target_energy);
  out << YAML::EndMap;
  out << YAML::Key << "gatecount" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "L" << YAML::Value << gatecount.length;
  out << YAML::Key << "n" << YAML::Value << gatecount.n;
  out << YAML::Key << "dt_over_pi" << YAML::Value << num(gatecount.dt_over_pi);
  out << YAML::EndMap;
  out << YAML::Key << "oracle_max_qubits" << YAML::Value << oracle_max_qubits;
  out << YAML::Key << "dos_points" << YAML::Value << dos_points;
  out << YAML::EndMap;
  return out.c_str();
}

}  // namespace qkfe

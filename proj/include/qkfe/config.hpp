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
#include <utility>
#include <vector>

#include "qkfe/model.hpp"
#include "qkfe/thei.hpp"

namespace qkfe {

struct MomentConfig {
  enum class Mode { exact, stochastic, shot };
  Mode mode = Mode::exact;
  int samples = 20;            // R
  std::string shot_rule = "cubic";  // cubic | fixed
  double kappa = 1.0;
  std::int64_t shots = 1000;   // K for the fixed rule
  std::string random_state = "haar";  // haar | scrambled
  int depth = -1;              // scrambled depth, -1 means 2L
};

struct ObservableConfig {
  enum class Kind { none, zz, density };
  Kind kind = Kind::none;
  std::vector<std::pair<int, int>> pairs;
  std::string describe() const;
};

struct TheiConfig {
  double c_step = 0.3;
  double residual_threshold = 1e-3;
  std::string ensemble = "gibbs";  // gibbs | tpq | microcanonical
  std::optional<double> beta_max;
  std::optional<double> eps_min;
  KernelMode kernel = KernelMode::automatic;
  double margin_fraction = 0.15;
  int samples = 50;
  double shell = 0.03;
};

struct PrepConfig {
  int steps = 200;
  double dt = 0.3;
  std::optional<double> target_energy;
};

struct GateCountConfig {
  int length = 4;
  int n = 3;
  double dt_over_pi = 0.2;
};

/// Fully resolved run configuration.
struct RunConfig {
  ModelSpec model;
  double margin_fraction = kDefaultMarginFraction;
  std::uint64_t seed = 1;
  int cutoff = 100;  // N
  MomentConfig moments;
  std::vector<double> temperatures;
  std::vector<double> betas;
  ObservableConfig observable;
  TheiConfig thei;
  PrepConfig prep;
  GateCountConfig gatecount;
  int oracle_max_qubits = kDefaultOracleMaxQubits;
  int dos_points = 512;
  std::string output_dir;  // empty: fall back to QKFE_OUTPUT_DIR, then "."

  /// Beta grid: explicit betas, or 1/T for the temperature grid, ascending.
  std::vector<double> beta_grid() const;
  /// Canonical YAML rendering of every resolved field.
  std::string to_yaml() const;
};

/// Parses YAML text plus "dotted.key=value" overrides (applied last, so they
/// win). Unknown keys and bad values throw InvalidArgument.
RunConfig load_config(const std::string& yaml_text,
                      const std::vector<std::string>& overrides = {});

}  // namespace qkfe

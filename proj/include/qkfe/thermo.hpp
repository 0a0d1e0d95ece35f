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

#include <optional>
#include <span>
#include <vector>

#include "qkfe/kfe.hpp"
#include "qkfe/model.hpp"
#include "qkfe/table.hpp"

namespace qkfe {

/// int_0^1 e^{-a eps} cos(n pi eps) d eps.
double boltzmann_fourier_integral(double a, int n);

/// int_0^1 eps e^{-a eps} cos(n pi eps) d eps.
double boltzmann_fourier_first_moment(double a, int n);

struct PartitionFunction {
  double z_rescaled = 0.0;      // no prefactor
  double log_z_absolute = 0.0;  // log Tr e^{-beta H}
};

/// Throws IllConditionedError when the moment sum cancels below its floor.
PartitionFunction partition_function(const SpectralSeries& rho, double beta,
                                     const Rescaling& rescaling);

/// Mean rescaled energy <eps> at beta.
double mean_rescaled_energy(const SpectralSeries& rho, double beta,
                            const Rescaling& rescaling);

/// Canonical average of the observable whose weighted series is `a_series`.
double thermal_average(const SpectralSeries& a_series, const SpectralSeries& rho,
                       double beta, const Rescaling& rescaling);

struct ThermoRow {
  double beta = 0.0;
  double log_z_rescaled = 0.0;
  double log_z_absolute = 0.0;
  double energy = 0.0;
  double free_energy = 0.0;  // NaN at beta = 0
  double entropy = 0.0;
  std::optional<double> observable;
};

struct ThermoCurve {
  std::vector<ThermoRow> rows;

  /// Columns beta, T, logZ_abs, E, F, S, A.
  Table to_table() const;
};

ThermoCurve thermo_curve(const SpectralSeries& rho, std::span<const double> betas,
                         const Rescaling& rescaling,
                         const SpectralSeries* a_series = nullptr);

}  // namespace qkfe

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

#include "qkfe/thermo.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "qkfe/errors.hpp"

namespace qkfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCancellationFloor = 1e-10;

void check_n(int n) {
  if (n < 0) throw InvalidArgument("Fourier index must be >= 0");
}

double sign_pow(int n) { return (n % 2) ? -1.0 : 1.0; }

struct MomentSum {
  double value = 0.0;
  double magnitude = 0.0;  // sum of |terms|
};

template <class F>
MomentSum moment_sum(const SpectralSeries& s, double a, F integral) {
  MomentSum m;
  for (int n = 0; n < s.cutoff(); ++n) {
    const double term = (n == 0 ? 1.0 : 2.0) * s.coeffs[static_cast<std::size_t>(n)] * integral(a, n);
    m.value += term;
    m.magnitude += std::abs(term);
  }
  return m;
}

double checked_z(const SpectralSeries& rho, double beta, const Rescaling& r) {
  if (rho.kind != SpectralSeries::Kind::dos) {
    throw InvalidArgument("partition function needs a DOS series");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("beta must be finite and nonnegative");
  }
  const MomentSum z = moment_sum(rho, beta * r.width(), boltzmann_fourier_integral);
  if (!(z.value > kCancellationFloor * z.magnitude)) {
    throw IllConditionedError(
        "partition function below its numerical floor at beta = " +
        std::to_string(beta) + " (Z = " + std::to_string(z.value) + ")");
  }
  return z.value;
}

}  // namespace

double boltzmann_fourier_integral(double a, int n) {
  check_n(n);
  if (n == 0) return a == 0.0 ? 1.0 : -std::expm1(-a) / a;
  const double k = n * kPi;
  // 1 - (-1)^n e^{-a}, written to avoid cancellation for even n
  const double g = (n % 2) ? 1.0 + std::exp(-a) : -std::expm1(-a);
  return a * g / (a * a + k * k);
}

double boltzmann_fourier_first_moment(double a, int n) {
  check_n(n);
  if (n == 0) {
    if (std::abs(a) < 0.05) {
      // sum_k (-a)^k / (k! (k + 2))
      double term = 1.0;
      double acc = 0.0;
      for (int j = 0; j < 12; ++j) {
        acc += term / (j + 2);
        term *= -a / (j + 1);
      }
      return acc;
    }
    return (-std::expm1(-a) - a * std::exp(-a)) / (a * a);
  }
  // -(d/da) [a g / (a^2 + k^2)], g = 1 - (-1)^n e^{-a}
  const double k = n * kPi;
  const double e = std::exp(-a);
  const double g = (n % 2) ? 1.0 + e : -std::expm1(-a);
  const double dg = sign_pow(n) * e;
  const double q = a * a + k * k;
  return -((g + a * dg) * q - 2.0 * a * a * g) / (q * q);
}

PartitionFunction partition_function(const SpectralSeries& rho, double beta,
                                     const Rescaling& rescaling) {
  const double z = checked_z(rho, beta, rescaling);
  return {z, std::log(static_cast<double>(rescaling.dimension)) -
                 beta * rescaling.offset() + std::log(z)};
}

double mean_rescaled_energy(const SpectralSeries& rho, double beta,
                            const Rescaling& rescaling) {
  const double z = checked_z(rho, beta, rescaling);
  return moment_sum(rho, beta * rescaling.width(), boltzmann_fourier_first_moment).value / z;
}

double thermal_average(const SpectralSeries& a_series, const SpectralSeries& rho,
                       double beta, const Rescaling& rescaling) {
  if (a_series.kind != SpectralSeries::Kind::weighted) {
    throw InvalidArgument("thermal average needs an observable-weighted series");
  }
  const double z = checked_z(rho, beta, rescaling);
  return moment_sum(a_series, beta * rescaling.width(), boltzmann_fourier_integral).value / z;
}

ThermoCurve thermo_curve(const SpectralSeries& rho, std::span<const double> betas,
                         const Rescaling& rescaling, const SpectralSeries* a_series) {
  if (betas.empty()) throw InvalidArgument("temperature grid is empty");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] >= 0.0) || (i > 0 && !(betas[i] > betas[i - 1]))) {
      throw InvalidArgument("beta grid must be nonnegative and strictly ascending");
    }
  }
  ThermoCurve curve;
  curve.rows.resize(betas.size());
  // Rows are independent; the first failing row's error is rethrown.
  std::vector<std::exception_ptr> failures(betas.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < betas.size(); ++i) {
    try {
      const double beta = betas[i];
      ThermoRow row;
      row.beta = beta;
      const auto z = partition_function(rho, beta, rescaling);
      row.log_z_rescaled = std::log(z.z_rescaled);
      row.log_z_absolute = z.log_z_absolute;
      row.energy = rescaling.to_energy(mean_rescaled_energy(rho, beta, rescaling));
      if (beta == 0.0) {
        row.free_energy = std::numeric_limits<double>::quiet_NaN();
        row.entropy = std::log(static_cast<double>(rescaling.dimension));
      } else {
        row.free_energy = -row.log_z_absolute / beta;
        row.entropy = beta * (row.energy - row.free_energy);
      }
      if (a_series) row.observable = thermal_average(*a_series, rho, beta, rescaling);
      curve.rows[i] = row;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return curve;
}

Table ThermoCurve::to_table() const {
  Table t({"beta", "T", "logZ_abs", "E", "F", "S", "A"});
  for (const auto& r : rows) {
    t.add_numeric_row({r.beta, r.beta > 0 ? 1.0 / r.beta : std::numeric_limits<double>::infinity(),
                       r.log_z_absolute, r.energy, r.free_energy, r.entropy,
                       r.observable.value_or(std::numeric_limits<double>::quiet_NaN())});
  }
  return t;
}

}  // namespace qkfe

// Copyright 2026 The RQU Model Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace rqu {

/// Dimensionless parameters of the full three-wave model in the frame
/// rotating at the drive.
struct FockParams {
  double Delta = 0;
  double omega_b = 1;
  double kappa = 1;
  double gamma = 0.01;
  double g0 = 0;
  std::complex<double> drive = 0;  // abar_in, sqrt(photons per unit time)
  double n_th = 0;
};

struct FockConfig {
  std::size_t N_a = 6;
  std::size_t N_b = 8;
  FockParams params;
  double t_max = 1e7;       // cap on the steady-state integration time
  double dt_obs = 0.05;     // correlation sampling step
  double tau_max = 800;     // correlation window
  bool displaced = true;    // expand the cavity about the linear amplitude
  std::size_t max_entries = 200'000'000;  // cap on (N_a N_b)^2

  void validate(bool allow_small_truncation = false) const;
};

using SpMat = Eigen::SparseMatrix<std::complex<double>>;

/// Lindblad generator acting on column-stacked density matrices of
/// H_a (x) H_b. In the displaced frame a = alpha + d.
struct Generator {
  FockConfig cfg;
  std::size_t dim = 0;  // N_a N_b
  std::complex<double> alpha = 0;
  SpMat H;
  SpMat L;
  SpMat a;  // full cavity operator, alpha I + d
  SpMat d;  // cavity fluctuation operator
  SpMat b;
  double hermiticity_error = 0;
};

Generator build_generator(const FockConfig& cfg,
                          bool allow_small_truncation = false);

struct FockSteadyState {
  Eigen::VectorXcd rho;  // vec(rho), column-stacked
  double residual = 0;   // ||L rho||_2
  double trace_error = 0;  // max |tr rho - 1| over the evolution
  double top_population_a = 0;  // max over observed times
  double top_population_b = 0;
  double t_reached = 0;
  std::size_t steps = 0;
  bool truncation_ok = false;
};

/// Implicit-Euler integration with step-doubling error control and growing
/// steps until ||L rho|| < tol.
FockSteadyState steady_state(const Generator& gen, double tol = 1e-9);

/// Tr(O rho) for an operator on H_a (x) H_b.
std::complex<double> expectation(const SpMat& op, const Eigen::VectorXcd& rho,
                                 std::size_t dim);

struct SpectrumPeak {
  double omega = 0;
  double height = 0;
  double power = 0;  // integral over the peak window / 2 pi
};

struct EmissionSpectrum {
  std::vector<double> omega;
  std::vector<double> S;
  std::vector<SpectrumPeak> peaks;  // lower then upper sideband
  double max_abs = 0;
  double trace_error = 0;
};

/// Spectrum of cavity fluctuations from <da^dag(tau) da(0)> by quantum
/// regression (RK4), evaluated around +/- omega_b.
EmissionSpectrum emission_spectrum(const Generator& gen,
                                   const FockSteadyState& ss);

struct LinearComparison {
  double var_x = 0, var_p = 0;          // oracle, X = (b + b^dag)/sqrt 2
  double var_x_lin = 0, var_p_lin = 0;  // linearized model
  double rel_var_x = 0, rel_var_p = 0;
  double mean_x = 0, mean_x_static = 0;  // <b + b^dag> and its static value
  double rel_mean_x = 0;
  double sideband_rel_err = 0;  // max |omega_peak|/omega_b - 1
  double sideband_power = 0;      // summed peak power of the emission spectrum
  double sideband_power_lin = 0;  // linearized <da^dag da>
  double rel_sideband_power = 0;
};

struct OracleReport {
  std::string name;
  FockConfig cfg;
  double steady_n_a = 0;
  double steady_n_b = 0;
  std::complex<double> mean_a = 0;
  double residual = 0;
  double trace_error = 0;
  double top_population_a = 0;
  double top_population_b = 0;
  bool valid = false;
  std::vector<SpectrumPeak> spectrum_peaks;
  double spectrum_max_abs = 0;
  LinearComparison linearized;
  double wall_seconds = 0;
};

OracleReport run_oracle(const std::string& name, const FockConfig& cfg,
                        bool with_spectrum);

/// Named validation scenarios: thermal, coherent, two_level, static_shift,
/// linearization, linearization_fast_lf.
FockConfig oracle_case(const std::string& name);
std::vector<std::string> oracle_case_names();

}  // namespace rqu

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

#include "rqu/core_model.hpp"

namespace rqu {

/// Symmetrized, double-sided current-imprecision and voltage-backaction
/// densities of the single-tone upconverter.
struct NoiseBudget {
  double S_II = 0;  // A^2/Hz
  double S_VV = 0;  // V^2/Hz
  double S_IV = 0;  // A V/Hz, identically zero here
  double R_noise = 0;
  double omega_eval = 0;
  double n_circ = 0;
};

struct DriveLimits {
  double n_bif = 0;
  double n_max = 0;
  double R_max = 0;
  double Q_min = 0;
  bool finite = true;  // false when Lambda = 0
  bool sql_reachable = false;
};

struct SensitivityReport {
  double epsilon = 0;  // J s
  double epsilon_over_hbar = 0;
  double n_threshold = 0;
  double T_N = 0;  // K
  double n_opt = 0;
};

/// S_II = Phi_ZPF^2 kappa / (16 n g0^2 M^2),
/// S_VV = 16 n g0^2 M^2 omega^2 Q_ZPF^2 / kappa, R_noise = sqrt(S_VV/S_II).
NoiseBudget quantum_noise_densities(const DeviceParams& device, double n_circ,
                                    double omega);

/// S_II + S_VV |Y|^2 + 2 Re(S_IV Y*). omega_admittance must match the
/// frequency the budget was evaluated at.
double total_added_current_noise(const NoiseBudget& budget,
                                 std::complex<double> admittance,
                                 double omega_admittance);

/// On-resonance noise temperature with a real source admittance 1/R_b:
/// 2 k_B T_N = S_VV / R_b + R_b S_II.
double noise_temperature(const DeviceParams& device, double n_circ);

/// hbar omega_b / (2 k_B).
double sql_temperature(const DeviceParams& device);

/// Drive that makes R_noise(omega_b) equal to R_b.
double optimal_drive(const DeviceParams& device);

DriveLimits drive_limits(const DeviceParams& device);

/// omega_b L_b / R_max.
double q_min_from_r_max(double omega_b, double L_b, double R_max);

/// Untuned-input figure of merit epsilon = S_II L_b / 2 and the drive at
/// which it reaches hbar.
SensitivityReport energy_sensitivity(const DeviceParams& device,
                                     double n_circ);

}  // namespace rqu

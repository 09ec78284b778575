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

#include <vector>

#include "rqu/core_model.hpp"

namespace rqu {

/// Two tones at omega_a +/- omega_b with equal amplitude a_drive.
struct TwoToneDrive {
  double a_drive = 0;    // sqrt(photons/s)
  double phi_drive = 0;  // rad
  double detuning = 0;   // rad/s, equals omega_b

  static TwoToneDrive symmetric(double a_drive, const LowFrequencyMode& lf,
                                double phi_drive = 0.0);
};

/// Intracavity amplitude a_max cos(omega_b t + delta).
struct Envelope {
  double a_max = 0;
  double delta = 0;
};

struct QuadratureSpectrum {
  std::vector<double> omega_grid;
  std::vector<double> S_X;
  double n_eq = 0;
  double n_bad = 0;
};

/// a_max = a_drive sqrt(kappa/(kappa^2 + 4 omega_b^2)),
/// delta = atan(kappa/omega_b).
Envelope envelope(const TwoToneDrive& drive, const MicrowaveMode& mw,
                  const LowFrequencyMode& lf);

/// Spurious backaction occupancy on the measured quadrature,
/// (a_max g0)^2 / (16 kappa gamma) (kappa/omega_b)^2.
double spurious_backaction(const Envelope& env, const CouplingSpec& coupling,
                           const MicrowaveMode& mw,
                           const LowFrequencyMode& lf);

/// True when omega_b/kappa is large enough (>= 3) for the resolved-sideband
/// expression to be trusted.
bool sidebands_resolved(const MicrowaveMode& mw, const LowFrequencyMode& lf);

/// S_X(omega) = (gamma/2)/(omega^2 + gamma^2/4) (1 + 2(n_eq + n_bad)).
QuadratureSpectrum measured_quadrature_psd(const std::vector<double>& omega_grid,
                                           double n_eq, double n_bad,
                                           const LowFrequencyMode& lf);

/// Backaction occupancy of the low-frequency mode under a single resonant
/// tone with n_circ photons, from the op-amp budget:
/// S_VV(omega_b) |Y(omega_b)|^2 R_b / (2 hbar omega_b).
double single_tone_backaction(const DeviceParams& device, double n_circ);

/// 10 log10(n_BA_single / n_bad) with the single-tone comparison at equal
/// time-averaged circulating photon number a_max^2/2. +inf when n_bad = 0.
double evasion_factor(const DeviceParams& device, const Envelope& env);

}  // namespace rqu

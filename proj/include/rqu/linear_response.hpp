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

using cdouble = std::complex<double>;

/// Single coherent tone in the frame rotating at omega_d.
struct SingleToneDrive {
  double Delta = 0;     // rad/s, omega_d - omega_a
  cdouble abar_in = 0;  // sqrt(photons/s)
  double omega_d = 0;   // rad/s
};

struct SteadyState {
  cdouble abar = 0;
  double n_circ = 0;
  double Delta = 0;
  bool linearization_valid = false;  // n_circ above the threshold
};

struct TransferPoint {
  double omega = 0;
  cdouble reflection = 0;
  cdouble flux_to_output_gain = 0;  // 1/(Wb sqrt(s))
};

/// abar = sqrt(kappa) abar_in / (i Delta - kappa/2).
SteadyState steady_state_amplitude(const SingleToneDrive& drive,
                                   const MicrowaveMode& mw,
                                   double valid_threshold = 100.0);

/// Steady state for a resonant drive that yields n_circ photons (abar real
/// and positive).
SteadyState resonant_steady_state(double n_circ,
                                  double valid_threshold = 100.0);

/// Output field response at analysis offset omega. Requires Delta = 0.
TransferPoint output_transfer(double omega, const MicrowaveMode& mw,
                              const CouplingSpec& coupling,
                              const SteadyState& ss);

/// Phase quadrature (a_out - a_out^dag) signal per unit flux,
/// 4 i g0 abar / (sqrt(kappa) Phi_ZPF). Valid only for omega well inside the
/// cavity linewidth: |omega| < kappa / bandwidth_factor.
cdouble phase_quadrature_gain(double omega, const MicrowaveMode& mw,
                              const CouplingSpec& coupling,
                              const SteadyState& ss,
                              double bandwidth_factor = 20.0);

/// Input admittance of the low-frequency resonator, Y+ + Y- with the overall
/// sign chosen so that the value at omega_b is +1/R_b.
cdouble lf_admittance(double omega, const LowFrequencyMode& lf);

}  // namespace rqu

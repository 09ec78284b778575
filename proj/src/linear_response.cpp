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

#include "rqu/linear_response.hpp"

#include <cmath>
#include <sstream>

#include "rqu/error.hpp"

namespace rqu {
namespace {
constexpr cdouble kI{0.0, 1.0};
}

SteadyState steady_state_amplitude(const SingleToneDrive& drive,
                                   const MicrowaveMode& mw,
                                   double valid_threshold) {
  require(mw.kappa > 0, "kappa > 0");
  SteadyState ss;
  ss.Delta = drive.Delta;
  ss.abar = std::sqrt(mw.kappa) * drive.abar_in /
            (kI * drive.Delta - mw.kappa / 2);
  ss.n_circ = std::norm(ss.abar);
  ss.linearization_valid = ss.n_circ > valid_threshold;
  return ss;
}

SteadyState resonant_steady_state(double n_circ, double valid_threshold) {
  require(n_circ >= 0, "n_circ >= 0");
  SteadyState ss;
  ss.abar = std::sqrt(n_circ);
  ss.n_circ = n_circ;
  ss.linearization_valid = n_circ > valid_threshold;
  return ss;
}

TransferPoint output_transfer(double omega, const MicrowaveMode& mw,
                              const CouplingSpec& coupling,
                              const SteadyState& ss) {
  require(std::isfinite(omega), "omega must be finite");
  require(mw.kappa > 0, "kappa > 0");
  if (ss.Delta != 0)
    throw UnsupportedRegimeError(
        "output transfer is only defined for a resonant drive (Delta = 0)");
  TransferPoint tp;
  tp.omega = omega;
  cdouble pole = kI * omega + mw.kappa / 2;
  tp.reflection = (kI * omega - mw.kappa / 2) / pole;
  tp.flux_to_output_gain = kI * coupling.g0 * ss.abar * std::sqrt(mw.kappa) /
                           (pole * coupling.Phi_ZPF);
  return tp;
}

cdouble phase_quadrature_gain(double omega, const MicrowaveMode& mw,
                              const CouplingSpec& coupling,
                              const SteadyState& ss,
                              double bandwidth_factor) {
  require(mw.kappa > 0, "kappa > 0");
  require(bandwidth_factor > 0, "bandwidth factor > 0");
  if (!(std::abs(omega) < mw.kappa / bandwidth_factor)) {
    std::ostringstream os;
    os << "phase-quadrature gain assumes omega << kappa/2; |omega| = "
       << std::abs(omega) << " exceeds kappa/" << bandwidth_factor << " = "
       << mw.kappa / bandwidth_factor;
    throw UnsupportedRegimeError(os.str());
  }
  return 4.0 * kI * coupling.g0 * ss.abar /
         (std::sqrt(mw.kappa) * coupling.Phi_ZPF);
}

cdouble lf_admittance(double omega, const LowFrequencyMode& lf) {
  auto branch = [&](double sign) {
    return 1.0 /
           (2.0 * kI * lf.L_b * (kI * (lf.gamma / 2) - omega + sign * lf.omega_b));
  };
  return -(branch(+1) + branch(-1));
}

}  // namespace rqu

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

#include "rqu/bae.hpp"

#include <cmath>
#include <limits>

#include "rqu/error.hpp"
#include "rqu/linear_response.hpp"
#include "rqu/noise_budget.hpp"

namespace rqu {

TwoToneDrive TwoToneDrive::symmetric(double a_drive, const LowFrequencyMode& lf,
                                     double phi_drive) {
  return TwoToneDrive{a_drive, phi_drive, lf.omega_b};
}

Envelope envelope(const TwoToneDrive& drive, const MicrowaveMode& mw,
                  const LowFrequencyMode& lf) {
  require(mw.kappa > 0, "kappa > 0");
  require(lf.omega_b > 0, "omega_b > 0");
  double k = mw.kappa, w = lf.omega_b;
  Envelope e;
  e.a_max = drive.a_drive * std::sqrt(k / (k * k + 4 * w * w));
  e.delta = std::atan(k / w);
  return e;
}

double spurious_backaction(const Envelope& env, const CouplingSpec& coupling,
                           const MicrowaveMode& mw,
                           const LowFrequencyMode& lf) {
  double ag = env.a_max * coupling.g0;
  double r = mw.kappa / lf.omega_b;
  return ag * ag / (16 * mw.kappa * lf.gamma) * r * r;
}

bool sidebands_resolved(const MicrowaveMode& mw, const LowFrequencyMode& lf) {
  return lf.omega_b / mw.kappa >= 3.0;
}

QuadratureSpectrum measured_quadrature_psd(const std::vector<double>& grid,
                                           double n_eq, double n_bad,
                                           const LowFrequencyMode& lf) {
  require(lf.gamma > 0, "gamma > 0");
  QuadratureSpectrum q;
  q.omega_grid = grid;
  q.n_eq = n_eq;
  q.n_bad = n_bad;
  q.S_X.reserve(grid.size());
  double hg = lf.gamma / 2;
  double occ = 1 + 2 * (n_eq + n_bad);
  for (double w : grid) q.S_X.push_back(hg / (w * w + hg * hg) * occ);
  return q;
}

double single_tone_backaction(const DeviceParams& d, double n_circ) {
  NoiseBudget b = quantum_noise_densities(d, n_circ, d.lf.omega_b);
  double Y2 = std::norm(lf_admittance(d.lf.omega_b, d.lf));
  return b.S_VV * Y2 * d.lf.R_b / (2 * d.constants.hbar * d.lf.omega_b);
}

double evasion_factor(const DeviceParams& d, const Envelope& env) {
  double n_bad = spurious_backaction(env, d.coupling, d.mw, d.lf);
  if (n_bad == 0) return std::numeric_limits<double>::infinity();
  double n_equiv = env.a_max * env.a_max / 2;
  return 10 * std::log10(single_tone_backaction(d, n_equiv) / n_bad);
}

}  // namespace rqu

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

#include "rqu/noise_budget.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rqu/error.hpp"

namespace rqu {
namespace {

double coupling_product(const DeviceParams& d) {
  double gm2 = d.coupling.g0 * d.coupling.g0 * d.lf.M * d.lf.M;
  if (!(gm2 > 0))
    throw ParameterError("degenerate design: g0 M = 0, no transduction");
  return gm2;
}

}  // namespace

NoiseBudget quantum_noise_densities(const DeviceParams& d, double n_circ,
                                    double omega) {
  require(n_circ > 0, "n_circ > 0");
  require(omega > 0, "omega > 0");
  double gm2 = coupling_product(d);
  double kappa = d.mw.kappa;
  const CouplingSpec& c = d.coupling;
  NoiseBudget nb;
  nb.n_circ = n_circ;
  nb.omega_eval = omega;
  nb.S_II = c.Phi_ZPF * c.Phi_ZPF * kappa / (16 * n_circ * gm2);
  nb.S_VV = 16 * n_circ * gm2 * omega * omega * c.Q_ZPF * c.Q_ZPF / kappa;
  nb.S_IV = 0;
  nb.R_noise = 16 * n_circ * gm2 * omega * c.Q_ZPF / (kappa * c.Phi_ZPF);
  return nb;
}

double total_added_current_noise(const NoiseBudget& b,
                                 std::complex<double> Y,
                                 double omega_admittance) {
  if (std::abs(omega_admittance - b.omega_eval) >
      1e-12 * std::abs(b.omega_eval)) {
    std::ostringstream os;
    os << "budget evaluated at omega = " << b.omega_eval
       << " but admittance at omega = " << omega_admittance;
    throw ParameterError(os.str());
  }
  return b.S_II + b.S_VV * std::norm(Y) +
         2 * std::real(b.S_IV * std::conj(Y));
}

double noise_temperature(const DeviceParams& d, double n_circ) {
  NoiseBudget b = quantum_noise_densities(d, n_circ, d.lf.omega_b);
  return (b.S_VV / d.lf.R_b + d.lf.R_b * b.S_II) / (2 * d.constants.k_B);
}

double sql_temperature(const DeviceParams& d) {
  return d.constants.hbar * d.lf.omega_b / (2 * d.constants.k_B);
}

double optimal_drive(const DeviceParams& d) {
  double gm2 = coupling_product(d);
  const CouplingSpec& c = d.coupling;
  return d.lf.R_b * d.mw.kappa * c.Phi_ZPF /
         (16 * gm2 * d.lf.omega_b * c.Q_ZPF);
}

double q_min_from_r_max(double omega_b, double L_b, double R_max) {
  require(R_max > 0, "R_max > 0");
  return omega_b * L_b / R_max;
}

DriveLimits drive_limits(const DeviceParams& d) {
  DriveLimits lim;
  if (d.mw.Lambda == 0) {
    double inf = std::numeric_limits<double>::infinity();
    lim.n_bif = lim.n_max = lim.R_max = inf;
    lim.Q_min = 0;
    lim.finite = false;
    lim.sql_reachable = true;
    return lim;
  }
  double gm2 = coupling_product(d);
  const CouplingSpec& c = d.coupling;
  lim.n_bif = d.mw.kappa / (2 * std::sqrt(3.0) * d.mw.Lambda);
  lim.n_max = d.mw.chi * lim.n_bif;
  lim.R_max = 16 * lim.n_max * gm2 * d.lf.omega_b * c.Q_ZPF /
              (d.mw.kappa * c.Phi_ZPF);
  lim.Q_min = q_min_from_r_max(d.lf.omega_b, d.lf.L_b, lim.R_max);
  lim.sql_reachable = lim.R_max > d.lf.R_b;
  return lim;
}

SensitivityReport energy_sensitivity(const DeviceParams& d, double n_circ) {
  NoiseBudget b = quantum_noise_densities(d, n_circ, d.lf.omega_b);
  double gm2 = coupling_product(d);
  SensitivityReport r;
  r.epsilon = b.S_II * d.lf.L_b / 2;
  r.epsilon_over_hbar = r.epsilon / d.constants.hbar;
  r.n_threshold = d.coupling.Phi_ZPF * d.coupling.Phi_ZPF * d.mw.kappa *
                  d.lf.L_b / (32 * d.constants.hbar * gm2);
  r.T_N = noise_temperature(d, n_circ);
  r.n_opt = optimal_drive(d);
  return r;
}

}  // namespace rqu

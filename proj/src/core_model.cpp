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

#include "rqu/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <math.h>  // pchip.hpp in Boost 1.74 calls unqualified isnan

#include <boost/math/interpolators/pchip.hpp>

#include "rqu/error.hpp"

namespace rqu {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDerivedTol = 1e-12;

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Mirrored PCHIP interpolant over the user table; rebuilt per call, tables
// are short.
boost::math::interpolators::pchip<std::vector<double>> mirrored_pchip(
    const JosephsonElement& jj) {
  std::vector<double> x, y;
  x.reserve(2 * jj.table.size());
  y.reserve(2 * jj.table.size());
  for (auto it = jj.table.rbegin(); it != jj.table.rend(); ++it) {
    if (it->first == 0.0) continue;
    x.push_back(-it->first);
    y.push_back(it->second);
  }
  for (const auto& [phi, l] : jj.table) {
    x.push_back(phi);
    y.push_back(l);
  }
  return boost::math::interpolators::pchip<std::vector<double>>(std::move(x),
                                                                std::move(y));
}

void check_table_range(const JosephsonElement& jj, double flux) {
  if (std::abs(flux) > jj.table.back().first) {
    std::ostringstream os;
    os << "flux " << flux << " Wb outside the tabulated L_J range [0, "
       << jj.table.back().first << "]";
    throw ParameterError(os.str());
  }
}

void check_squid_band(const JosephsonElement& jj, double flux,
                      const PhysicalConstants& c) {
  double frac = flux / c.Phi0 - std::floor(flux / c.Phi0);
  if (std::abs(frac - 0.5) < jj.flux_margin) {
    std::ostringstream os;
    os << "flux " << flux << " Wb lies within " << jj.flux_margin
       << " Phi0 of an odd multiple of Phi0/2; L_J diverges there";
    throw SingularityError(os.str());
  }
}

}  // namespace

void PhysicalConstants::validate() const {
  require(hbar > 0 && k_B > 0 && Phi0 > 0,
          "physical constants must be strictly positive (hbar, k_B, Phi0 > 0)");
}

LowFrequencyMode LowFrequencyMode::make(double omega_b, double L_b, double Q_b,
                                        double M, double bath_T,
                                        std::optional<double> n_eq,
                                        const PhysicalConstants& c) {
  LowFrequencyMode lf;
  lf.omega_b = omega_b;
  lf.L_b = L_b;
  lf.Q_b = Q_b;
  lf.M = M;
  lf.bath_T = bath_T;
  require(omega_b > 0, "omega_b > 0");
  require(L_b > 0, "L_b > 0");
  require(Q_b > 0.5, "Q_b > 1/2");
  lf.gamma = omega_b / Q_b;
  lf.R_b = omega_b * L_b / Q_b;
  lf.n_eq = n_eq ? *n_eq : bose_occupancy(omega_b, bath_T, c);
  lf.validate();
  return lf;
}

void LowFrequencyMode::validate() const {
  require(omega_b > 0, "omega_b > 0");
  require(L_b > 0, "L_b > 0");
  require(M > 0, "M > 0");
  require(Q_b > 0.5, "Q_b > 1/2");
  require(n_eq >= 0, "n_eq >= 0");
  require(bath_T >= 0, "bath_T >= 0");
  require(close_rel(gamma, omega_b / Q_b, kDerivedTol),
          "gamma = omega_b / Q_b");
  require(close_rel(R_b, omega_b * L_b / Q_b, kDerivedTol),
          "R_b = omega_b L_b / Q_b");
}

void MicrowaveMode::validate() const {
  require(omega_a0 > 0, "omega_a0 > 0");
  require(kappa > 0, "kappa > 0");
  require(Lambda >= 0, "Lambda >= 0");
  require(chi > 0 && chi <= 1, "0 < chi <= 1");
  require(C_a + C_c > 0 || (C_a == 0 && C_c == 0),
          "C_a + C_c > 0");
}

JosephsonElement JosephsonElement::dc_squid(double I_c,
                                            const PhysicalConstants& c,
                                            double flux_margin) {
  require(I_c > 0, "I_c > 0");
  require(flux_margin >= 0 && flux_margin < 0.5, "0 <= flux_margin < 1/2");
  JosephsonElement jj;
  jj.model = JunctionModel::kDcSquid;
  jj.I_c = I_c;
  jj.flux_margin = flux_margin;
  jj.L_J0 = c.Phi0 / (4 * kPi * I_c);
  return jj;
}

JosephsonElement JosephsonElement::user_table(
    std::vector<std::pair<double, double>> samples) {
  JosephsonElement jj;
  jj.model = JunctionModel::kUserTable;
  std::sort(samples.begin(), samples.end());
  jj.table = std::move(samples);
  jj.validate();
  jj.L_J0 = jj.table.front().first == 0.0
                ? jj.table.front().second
                : mirrored_pchip(jj)(0.0);
  return jj;
}

void JosephsonElement::validate() const {
  if (model == JunctionModel::kDcSquid) {
    require(I_c > 0, "I_c > 0");
    return;
  }
  require(table.size() >= 3, "user L_J table needs at least 3 samples");
  for (size_t i = 0; i < table.size(); ++i) {
    require(table[i].first >= 0,
            "user L_J table is even in flux; give samples at Phi >= 0");
    require(table[i].second > 0, "user L_J samples must be strictly positive");
    if (i > 0)
      require(table[i].first > table[i - 1].first,
              "user L_J table flux samples must be distinct");
  }
}

void DeviceParams::validate() const {
  constants.validate();
  lf.validate();
  mw.validate();
  jj.validate();
  require(coupling.Phi_ZPF > 0 && coupling.Q_ZPF > 0, "Phi_ZPF, Q_ZPF > 0");
  require(close_rel(coupling.Q_ZPF * coupling.Phi_ZPF, constants.hbar / 2,
                    1e-15 * 4),
          "Q_ZPF Phi_ZPF = hbar/2");
  require(close_rel(coupling.g0, coupling.dwa_dPhi * coupling.Phi_ZPF,
                    kDerivedTol) ||
              (coupling.g0 == 0 && coupling.dwa_dPhi == 0),
          "g0 = (d omega_a/d Phi) Phi_ZPF");
}

ZeroPoint derive_zero_point(const PhysicalConstants& c,
                            const LowFrequencyMode& lf) {
  require(lf.omega_b > 0, "omega_b > 0");
  require(lf.L_b > 0, "L_b > 0");
  c.validate();
  ZeroPoint zp;
  zp.Phi_ZPF = std::sqrt(c.hbar * lf.omega_b * lf.L_b / 2);
  zp.Q_ZPF = c.hbar / (2 * zp.Phi_ZPF);
  return zp;
}

double josephson_inductance(const JosephsonElement& jj, double flux,
                            const PhysicalConstants& c) {
  if (jj.model == JunctionModel::kUserTable) {
    check_table_range(jj, flux);
    return mirrored_pchip(jj)(flux);
  }
  check_squid_band(jj, flux, c);
  return jj.L_J0 / std::abs(std::cos(kPi * flux / c.Phi0));
}

double josephson_inductance_slope(const JosephsonElement& jj, double flux,
                                  const PhysicalConstants& c) {
  if (jj.model == JunctionModel::kUserTable) {
    check_table_range(jj, flux);
    return mirrored_pchip(jj).prime(flux);
  }
  check_squid_band(jj, flux, c);
  double x = kPi * flux / c.Phi0;
  return jj.L_J0 / std::abs(std::cos(x)) * (kPi / c.Phi0) * std::tan(x);
}

double microwave_frequency(double L_a, double L_J, double C_total) {
  require(L_a + L_J > 0, "L_a + L_J > 0");
  require(C_total > 0, "C_a + C_c > 0");
  return 1.0 / std::sqrt((L_a + L_J) * C_total);
}

double microwave_frequency(const MicrowaveMode& mw, const JosephsonElement& jj,
                           double flux, const PhysicalConstants& c) {
  return microwave_frequency(mw.L_a, josephson_inductance(jj, flux, c),
                             mw.C_a + mw.C_c);
}

double calibrate_linear_inductance(const MicrowaveMode& mw,
                                   const JosephsonElement& jj,
                                   double flux_bias,
                                   const PhysicalConstants& c) {
  require(mw.omega_a0 > 0, "omega_a0 > 0");
  double C = mw.C_a + mw.C_c;
  require(C > 0, "C_a + C_c > 0");
  double L_total = 1.0 / (mw.omega_a0 * mw.omega_a0 * C);
  double L_a = L_total - josephson_inductance(jj, flux_bias, c);
  if (!(L_a > 0)) {
    std::ostringstream os;
    os << "calibrated L_a = " << L_a
       << " H is not positive; omega_a0 too high for L_J at the bias point";
    throw ParameterError(os.str());
  }
  return L_a;
}

CouplingSpec coupling_strength(const MicrowaveMode& mw,
                               const JosephsonElement& jj,
                               const LowFrequencyMode& lf,
                               const PhysicalConstants& c, double flux_bias) {
  double L_J = josephson_inductance(jj, flux_bias, c);
  double dL_dPhi = josephson_inductance_slope(jj, flux_bias, c);
  double L_sum = mw.L_a + L_J;
  double omega_a = microwave_frequency(mw.L_a, L_J, mw.C_a + mw.C_c);
  double dw_dL = -omega_a / (2 * L_sum);
  ZeroPoint zp = derive_zero_point(c, lf);
  CouplingSpec cs;
  cs.dwa_dPhi = dw_dL * dL_dPhi;
  cs.Phi_ZPF = zp.Phi_ZPF;
  cs.Q_ZPF = zp.Q_ZPF;
  cs.g0 = cs.dwa_dPhi * cs.Phi_ZPF;
  return cs;
}

CouplingSpec coupling_from_g0(double g0, const PhysicalConstants& c,
                              const LowFrequencyMode& lf) {
  ZeroPoint zp = derive_zero_point(c, lf);
  CouplingSpec cs;
  cs.Phi_ZPF = zp.Phi_ZPF;
  cs.Q_ZPF = zp.Q_ZPF;
  cs.g0 = g0;
  cs.dwa_dPhi = g0 / zp.Phi_ZPF;
  return cs;
}

double bose_occupancy(double omega, double T, const PhysicalConstants& c) {
  require(T >= 0, "bath_T >= 0");
  if (T == 0) return 0.0;
  return 1.0 / std::expm1(c.hbar * omega / (c.k_B * T));
}

LowFrequencyMode step_down_transformer(const LowFrequencyMode& lf, double turns,
                                       const PhysicalConstants& c) {
  require(turns > 0, "transformer turns ratio > 0");
  LowFrequencyMode out = LowFrequencyMode::make(
      lf.omega_b, lf.L_b / (turns * turns), lf.Q_b, lf.M / turns, lf.bath_T,
      lf.n_eq, c);
  return out;
}

}  // namespace rqu

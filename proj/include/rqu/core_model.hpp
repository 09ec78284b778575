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

#include <optional>
#include <utility>
#include <vector>

namespace rqu {

/// Fundamental constants. SI by default; set every field to 1 to work in
/// dimensionless simulation units.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;  // J s
  double k_B = 1.380649e-23;      // J/K
  double Phi0 = 2.067833848e-15;  // Wb

  static PhysicalConstants si() { return {}; }
  static PhysicalConstants natural() { return {1.0, 1.0, 1.0}; }
  void validate() const;
};

/// The dc-VHF input resonator. gamma and R_b are derived from omega_b, L_b
/// and Q_b; use make() rather than filling the struct by hand.
struct LowFrequencyMode {
  double omega_b = 0;  // rad/s
  double L_b = 0;      // H
  double Q_b = 0;
  double gamma = 0;    // rad/s, omega_b / Q_b
  double R_b = 0;      // Ohm, omega_b L_b / Q_b
  double M = 0;        // H, effective mutual inductance flux -> current
  double n_eq = 0;     // thermal occupancy of the bath
  double bath_T = 0;   // K

  /// n_eq defaults to the Bose occupancy at bath_T.
  static LowFrequencyMode make(double omega_b, double L_b, double Q_b, double M,
                               double bath_T, std::optional<double> n_eq,
                               const PhysicalConstants& c);
  void validate() const;
};

struct MicrowaveMode {
  double omega_a0 = 0;  // rad/s, resonance at the flux bias point
  double kappa = 0;     // rad/s, energy decay rate
  double L_a = 0;       // H, linear inductance (calibrated)
  double C_a = 0;       // F
  double C_c = 0;       // F
  double Lambda = 0;    // rad/s, Kerr coefficient
  double chi = 1;       // operating fraction of the bifurcation power

  void validate() const;
};

enum class JunctionModel { kDcSquid, kUserTable };

/// Flux-tunable Josephson inductance. The dc SQUID model is
/// L_J(Phi) = Phi0 / (4 pi I_c |cos(pi Phi / Phi0)|). The user table holds
/// samples at non-negative flux; it is mirrored to negative flux and
/// interpolated with a monotone cubic (PCHIP).
struct JosephsonElement {
  JunctionModel model = JunctionModel::kDcSquid;
  double I_c = 0;               // A
  double L_J0 = 0;              // H, inductance at zero flux
  double flux_margin = 0.05;    // fraction of Phi0 kept clear of Phi0/2
  std::vector<std::pair<double, double>> table;  // (Phi, L_J) with Phi >= 0

  static JosephsonElement dc_squid(double I_c, const PhysicalConstants& c,
                                   double flux_margin = 0.05);
  static JosephsonElement user_table(
      std::vector<std::pair<double, double>> samples);
  void validate() const;
};

struct ZeroPoint {
  double Phi_ZPF = 0;  // Wb
  double Q_ZPF = 0;    // C
};

struct CouplingSpec {
  double dwa_dPhi = 0;  // rad/(s Wb)
  double g0 = 0;        // rad/s
  double Phi_ZPF = 0;   // Wb
  double Q_ZPF = 0;     // C
};

struct DeviceParams {
  PhysicalConstants constants;
  LowFrequencyMode lf;
  MicrowaveMode mw;
  JosephsonElement jj;
  CouplingSpec coupling;
  double flux_bias = 0;  // Wb

  double sideband_ratio() const { return lf.omega_b / mw.kappa; }
  void validate() const;
};

/// Phi_ZPF = sqrt(hbar omega_b L_b / 2), Q_ZPF = hbar / (2 Phi_ZPF).
ZeroPoint derive_zero_point(const PhysicalConstants& c,
                            const LowFrequencyMode& lf);

double josephson_inductance(const JosephsonElement& jj, double flux,
                            const PhysicalConstants& c);

/// dL_J/dPhi, analytic for the dc SQUID and from the interpolant otherwise.
double josephson_inductance_slope(const JosephsonElement& jj, double flux,
                                  const PhysicalConstants& c);

/// ((L_a + L_J)(C_a + C_c))^(-1/2).
double microwave_frequency(double L_a, double L_J, double C_total);
double microwave_frequency(const MicrowaveMode& mw, const JosephsonElement& jj,
                           double flux, const PhysicalConstants& c);

/// Linear inductance that puts the resonance at mw.omega_a0 when the
/// junction sits at flux_bias.
double calibrate_linear_inductance(const MicrowaveMode& mw,
                                   const JosephsonElement& jj,
                                   double flux_bias,
                                   const PhysicalConstants& c);

/// Chain-rule coupling d omega_a / d Phi at the bias point and
/// g0 = (d omega_a / d Phi) Phi_ZPF.
CouplingSpec coupling_strength(const MicrowaveMode& mw,
                               const JosephsonElement& jj,
                               const LowFrequencyMode& lf,
                               const PhysicalConstants& c, double flux_bias);

/// Coupling given directly as g0 (dimensionless studies).
CouplingSpec coupling_from_g0(double g0, const PhysicalConstants& c,
                              const LowFrequencyMode& lf);

/// Bose-Einstein occupancy of a mode at omega and temperature T.
double bose_occupancy(double omega, double T, const PhysicalConstants& c);

/// Effective rescaling of an N-turn step-down transformer on the input:
/// M -> M / N, R_b -> R_b / N^2 (L_b -> L_b / N^2 at fixed omega_b, Q_b).
LowFrequencyMode step_down_transformer(const LowFrequencyMode& lf, double turns,
                                       const PhysicalConstants& c);

}  // namespace rqu

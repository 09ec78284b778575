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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rqu/core_model.hpp"
#include "rqu/device_io.hpp"
#include "rqu/error.hpp"

namespace rqu {
namespace {

constexpr double kPi = std::numbers::pi;

LowFrequencyMode lf_unit(double omega_b, double L_b, const PhysicalConstants& c) {
  return LowFrequencyMode::make(omega_b, L_b, 10.0, 1.0, 0.0, 0.0, c);
}

MicrowaveMode si_microwave() {
  MicrowaveMode mw;
  mw.omega_a0 = 2 * kPi * 4.89e9;
  mw.kappa = 2 * kPi * 1e7;
  mw.C_a = 5e-13;
  mw.C_c = 2e-14;
  return mw;
}

TEST(ZeroPoint, IdentityScale) {
  PhysicalConstants c = PhysicalConstants::natural();
  ZeroPoint z = derive_zero_point(c, lf_unit(2.0, 1.0, c));
  EXPECT_DOUBLE_EQ(z.Phi_ZPF, 1.0);
  EXPECT_DOUBLE_EQ(z.Q_ZPF, 0.5);
}

TEST(ZeroPoint, MegahertzResonator) {
  PhysicalConstants c = PhysicalConstants::si();
  ZeroPoint z = derive_zero_point(c, lf_unit(2 * kPi * 1e6, 5e-6, c));
  // Evaluated independently in double precision outside this code base.
  EXPECT_NEAR(z.Phi_ZPF / 4.0700338284650904e-17, 1.0, 1e-12);
}

TEST(ZeroPoint, InductanceScaling) {
  PhysicalConstants c = PhysicalConstants::si();
  ZeroPoint a = derive_zero_point(c, lf_unit(1e6, 1e-6, c));
  ZeroPoint b = derive_zero_point(c, lf_unit(1e6, 4e-6, c));
  EXPECT_NEAR(b.Phi_ZPF / a.Phi_ZPF, 2.0, 1e-14);
  EXPECT_NEAR(b.Q_ZPF / a.Q_ZPF, 0.5, 1e-14);
}

TEST(ZeroPoint, UncertaintyProductProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lg(-3, 3);
  PhysicalConstants c = PhysicalConstants::si();
  for (int i = 0; i < 200; ++i) {
    double w = 1e6 * std::pow(10.0, lg(rng)), L = 1e-6 * std::pow(10.0, lg(rng));
    ZeroPoint z = derive_zero_point(c, lf_unit(w, L, c));
    EXPECT_NEAR(z.Q_ZPF * z.Phi_ZPF / (c.hbar / 2), 1.0, 1e-15);
  }
}

TEST(ZeroPoint, RejectsNonPositive) {
  PhysicalConstants c = PhysicalConstants::natural();
  LowFrequencyMode lf = lf_unit(1.0, 1.0, c);
  lf.L_b = 0;
  EXPECT_THROW(derive_zero_point(c, lf), ParameterError);
}

TEST(LowFrequencyMode, DerivedRatesProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  PhysicalConstants c = PhysicalConstants::si();
  for (int i = 0; i < 200; ++i) {
    double w = 1e3 + 1e8 * u(rng), L = 1e-9 + 1e-5 * u(rng), Q = 0.6 + 1e6 * u(rng);
    auto lf = LowFrequencyMode::make(w, L, Q, 1e-9, 0.01, std::nullopt, c);
    EXPECT_NEAR(lf.gamma * L / lf.R_b, 1.0, 1e-12);
    EXPECT_NEAR(Q * lf.gamma / w, 1.0, 1e-12);
    EXPECT_GE(lf.n_eq, 0.0);
  }
}

TEST(LowFrequencyMode, RejectsLowQuality) {
  PhysicalConstants c = PhysicalConstants::natural();
  try {
    LowFrequencyMode::make(1.0, 1.0, 0.1, 1.0, 0.0, 0.0, c);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("Q_b > 1/2"), std::string::npos);
  }
}

TEST(Josephson, SquidAtZeroFlux) {
  PhysicalConstants c = PhysicalConstants::si();
  auto jj = JosephsonElement::dc_squid(5e-6, c);
  EXPECT_NEAR(josephson_inductance(jj, 0.0, c) / (c.Phi0 / (4 * kPi * 5e-6)), 1.0,
              1e-15);
  EXPECT_DOUBLE_EQ(jj.L_J0, josephson_inductance(jj, 0.0, c));
}

TEST(Josephson, SquidAtThirdFluxQuantum) {
  PhysicalConstants c = PhysicalConstants::si();
  auto jj = JosephsonElement::dc_squid(5e-6, c);
  EXPECT_NEAR(josephson_inductance(jj, c.Phi0 / 3, c) / (c.Phi0 / (2 * kPi * 5e-6)),
              1.0, 1e-14);
}

TEST(Josephson, EvenInFlux) {
  PhysicalConstants c = PhysicalConstants::si();
  auto jj = JosephsonElement::dc_squid(5e-6, c);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.44, 0.44);
  for (int i = 0; i < 1000; ++i) {
    double f = u(rng) * c.Phi0;
    EXPECT_EQ(josephson_inductance(jj, f, c), josephson_inductance(jj, -f, c));
  }
}

TEST(Josephson, SingularBandRejected) {
  PhysicalConstants c = PhysicalConstants::natural();
  auto jj = JosephsonElement::dc_squid(1.0, c);
  EXPECT_THROW(josephson_inductance(jj, 0.48, c), SingularityError);
  EXPECT_THROW(josephson_inductance(jj, 1.52, c), SingularityError);
  EXPECT_NO_THROW(josephson_inductance(jj, 0.44, c));
}

TEST(Josephson, UserTableMirrorsAndInterpolates) {
  std::vector<std::pair<double, double>> t;
  for (int i = 0; i <= 20; ++i) {
    double f = 0.02 * i;
    t.emplace_back(f, 1.0 + f * f);
  }
  auto jj = JosephsonElement::user_table(t);
  PhysicalConstants c = PhysicalConstants::natural();
  EXPECT_NEAR(josephson_inductance(jj, 0.2, c), 1.04, 1e-12);
  EXPECT_EQ(josephson_inductance(jj, 0.13, c), josephson_inductance(jj, -0.13, c));
  EXPECT_NEAR(josephson_inductance(jj, 0.13, c), 1.0169, 1e-4);
}

TEST(Josephson, UserTableRejectsNonPositive) {
  EXPECT_THROW(JosephsonElement::user_table({{0.0, 1.0}, {0.1, -1.0}, {0.2, 1.0}}),
               ParameterError);
}

TEST(MicrowaveFrequency, DirectEvaluation) {
  EXPECT_DOUBLE_EQ(microwave_frequency(1.0, 0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(microwave_frequency(3.0, 1.0, 1.0), 0.5);
}

TEST(MicrowaveFrequency, CalibrationIdentity) {
  PhysicalConstants c = PhysicalConstants::si();
  auto jj = JosephsonElement::dc_squid(5e-6, c);
  MicrowaveMode mw = si_microwave();
  for (double bias : {0.0, 0.25 * c.Phi0}) {
    mw.L_a = calibrate_linear_inductance(mw, jj, bias, c);
    EXPECT_NEAR(microwave_frequency(mw, jj, bias, c) / mw.omega_a0, 1.0, 1e-13);
  }
}

TEST(MicrowaveFrequency, EvenInFlux) {
  PhysicalConstants c = PhysicalConstants::si();
  auto jj = JosephsonElement::dc_squid(5e-6, c);
  MicrowaveMode mw = si_microwave();
  mw.L_a = calibrate_linear_inductance(mw, jj, 0.0, c);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 0.44);
  for (int i = 0; i < 200; ++i) {
    double f = u(rng) * c.Phi0;
    EXPECT_EQ(microwave_frequency(mw, jj, f, c), microwave_frequency(mw, jj, -f, c));
  }
}

LowFrequencyMode fiducial_lf(const PhysicalConstants& c) {
  return LowFrequencyMode::make(6.2e6, 5e-6, 1e5, 1e-10, 0.02, std::nullopt, c);
}

TEST(Coupling, VanishesAtZeroBias) {
  PhysicalConstants c = PhysicalConstants::si();
  auto jj = JosephsonElement::dc_squid(5e-6, c);
  MicrowaveMode mw = si_microwave();
  mw.L_a = calibrate_linear_inductance(mw, jj, 0.0, c);
  CouplingSpec s = coupling_strength(mw, jj, fiducial_lf(c), c, 0.0);
  EXPECT_EQ(s.dwa_dPhi, 0.0);
  EXPECT_EQ(s.g0, 0.0);
}

double finite_difference(const MicrowaveMode& mw, const JosephsonElement& jj,
                         double bias, const PhysicalConstants& c) {
  double h = 1e-6 * c.Phi0;
  return (microwave_frequency(mw, jj, bias + h, c) -
          microwave_frequency(mw, jj, bias - h, c)) /
         (2 * h);
}

TEST(Coupling, QuarterFluxMatchesFiniteDifference) {
  PhysicalConstants c = PhysicalConstants::si();
  auto jj = JosephsonElement::dc_squid(5e-6, c);
  MicrowaveMode mw = si_microwave();
  double bias = 0.25 * c.Phi0;
  mw.L_a = calibrate_linear_inductance(mw, jj, bias, c);
  CouplingSpec s = coupling_strength(mw, jj, fiducial_lf(c), c, bias);
  EXPECT_NEAR(s.dwa_dPhi / finite_difference(mw, jj, bias, c), 1.0, 1e-6);
  EXPECT_NEAR(s.g0, s.dwa_dPhi * s.Phi_ZPF, 1e-12 * std::abs(s.g0));
}

TEST(Coupling, FiniteDifferenceProperty) {
  PhysicalConstants c = PhysicalConstants::si();
  auto jj = JosephsonElement::dc_squid(5e-6, c);
  LowFrequencyMode lf = fiducial_lf(c);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.02, 0.43);
  for (int i = 0; i < 100; ++i) {
    double bias = u(rng) * c.Phi0;
    MicrowaveMode mw = si_microwave();
    mw.L_a = calibrate_linear_inductance(mw, jj, bias, c);
    CouplingSpec s = coupling_strength(mw, jj, lf, c, bias);
    EXPECT_NEAR(s.dwa_dPhi / finite_difference(mw, jj, bias, c), 1.0, 1e-6)
        << "bias/Phi0 = " << bias / c.Phi0;
    // L_J rises on (0, Phi0/2), so the resonance falls.
    EXPECT_LT(s.dwa_dPhi, 0.0);
    EXPECT_GT(josephson_inductance_slope(jj, bias, c), 0.0);
  }
}

TEST(Coupling, FromG0KeepsZeroPointProduct) {
  PhysicalConstants c = PhysicalConstants::natural();
  auto lf = lf_unit(32.0, 1.0, c);
  CouplingSpec s = coupling_from_g0(1.5, c, lf);
  EXPECT_DOUBLE_EQ(s.g0, 1.5);
  EXPECT_NEAR(s.Q_ZPF * s.Phi_ZPF, 0.5, 1e-15);
  EXPECT_NEAR(s.dwa_dPhi * s.Phi_ZPF, 1.5, 1e-14);
}

TEST(Bose, LimitsAndValue) {
  PhysicalConstants c = PhysicalConstants::natural();
  EXPECT_EQ(bose_occupancy(1.0, 0.0, c), 0.0);
  EXPECT_NEAR(bose_occupancy(1.0, 1.0, c), 1.0 / (std::exp(1.0) - 1.0), 1e-15);
  EXPECT_NEAR(bose_occupancy(1e-3, 1.0, c), 1e3 - 0.5, 1e-3);
}

TEST(Transformer, ScalesImpedances) {
  PhysicalConstants c = PhysicalConstants::si();
  auto lf = fiducial_lf(c);
  auto t = step_down_transformer(lf, 10.0, c);
  EXPECT_NEAR(t.M / lf.M, 0.1, 1e-15);
  EXPECT_NEAR(t.R_b / lf.R_b, 0.01, 1e-14);
  EXPECT_DOUBLE_EQ(t.omega_b, lf.omega_b);
}

TEST(DeviceIo, RejectsUnknownKeys) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "constants": "natural",
    "lf": {"omega_b": 1, "L_b": 1, "Q_b": 10, "M": 1, "n_eq": 0, "colour": 3},
    "mw": {"omega_a0": 100, "kappa": 1},
    "jj": {"I_c": 1},
    "coupling": {"g0": 0.1}})");
  EXPECT_THROW(device_from_json(doc), ConfigError);
  doc["lf"].erase("colour");
  DeviceParams d = device_from_json(doc);
  EXPECT_DOUBLE_EQ(d.coupling.g0, 0.1);
  EXPECT_DOUBLE_EQ(d.sideband_ratio(), 1.0);
}

TEST(DeviceIo, RoundTrip) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "constants": "si",
    "lf": {"omega_b": 6.2e6, "L_b": 5e-6, "Q_b": 1e5, "M": 1e-10, "bath_T": 0.02},
    "mw": {"omega_a0": 3.0725e10, "kappa": 6.2832e7, "C_a": 5e-13, "C_c": 2e-14,
           "Lambda": 4000, "chi": 0.5},
    "jj": {"model": "dc_squid", "I_c": 5e-6},
    "coupling": {"flux_bias": 5.1696e-16}})");
  DeviceParams a = device_from_json(doc);
  DeviceParams b = device_from_json(device_to_json(a));
  EXPECT_DOUBLE_EQ(a.coupling.g0, b.coupling.g0);
  EXPECT_DOUBLE_EQ(a.mw.L_a, b.mw.L_a);
  EXPECT_DOUBLE_EQ(a.lf.n_eq, b.lf.n_eq);
}

}  // namespace
}  // namespace rqu

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
#include <limits>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <gtest/gtest.h>

#include "rqu/core_model.hpp"
#include "rqu/error.hpp"
#include "rqu/linear_response.hpp"
#include "rqu/noise_budget.hpp"

namespace rqu {
namespace {

// hbar = 1, omega_b L_b = 8 so that Phi_ZPF = 2 and Q_ZPF = 1/4.
DeviceParams unit_device(double Q_b, double kappa = 8.0, double Lambda = 0.0,
                         double chi = 1.0) {
  DeviceParams d;
  d.constants = PhysicalConstants::natural();
  d.lf = LowFrequencyMode::make(2.0, 4.0, Q_b, 1.0, 0.0, 0.0, d.constants);
  d.mw.omega_a0 = 100;
  d.mw.kappa = kappa;
  d.mw.Lambda = Lambda;
  d.mw.chi = chi;
  d.jj = JosephsonElement::dc_squid(1.0, d.constants);
  d.coupling = coupling_from_g0(1.0, d.constants, d.lf);
  return d;
}

DeviceParams random_device(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lg(-1, 1);
  auto r = [&](double s) { return s * std::pow(10.0, lg(rng)); };
  DeviceParams d;
  d.constants = PhysicalConstants::si();
  d.lf = LowFrequencyMode::make(r(6e6), r(5e-6), r(1e4), r(1e-10), 0.01,
                                std::nullopt, d.constants);
  d.mw.omega_a0 = r(3e10);
  d.mw.kappa = r(6e7);
  d.mw.Lambda = r(4e3);
  d.mw.chi = 0.5;
  d.jj = JosephsonElement::dc_squid(5e-6, d.constants);
  d.coupling = coupling_from_g0(r(1e4), d.constants, d.lf);
  return d;
}

TEST(NoiseDensities, UnitExample) {
  DeviceParams d = unit_device(16.0);
  ASSERT_DOUBLE_EQ(d.coupling.Phi_ZPF, 2.0);
  ASSERT_DOUBLE_EQ(d.coupling.Q_ZPF, 0.25);
  NoiseBudget b = quantum_noise_densities(d, 1.0, 2.0);
  // Phi^2 kappa / (16 n g0^2 M^2) and 16 n g0^2 M^2 w^2 Q^2 / kappa.
  EXPECT_NEAR(b.S_II, 4.0 * 8.0 / 16.0, 1e-15);
  EXPECT_NEAR(b.S_VV, 16.0 * 4.0 / 16.0 / 8.0, 1e-15);
  EXPECT_NEAR(b.R_noise, 0.5, 1e-15);
  EXPECT_EQ(b.S_IV, 0.0);
  EXPECT_NEAR(std::sqrt(b.S_II * b.S_VV), 1.0, 1e-15);
}

TEST(NoiseDensities, DriveScaling) {
  DeviceParams d = unit_device(16.0);
  NoiseBudget a = quantum_noise_densities(d, 3.0, 2.0), b = quantum_noise_densities(d, 6.0, 2.0);
  EXPECT_NEAR(b.S_II / a.S_II, 0.5, 1e-15);
  EXPECT_NEAR(b.S_VV / a.S_VV, 2.0, 1e-15);
  EXPECT_NEAR(b.R_noise / a.R_noise, 2.0, 1e-15);
}

TEST(NoiseDensities, HeisenbergProductProperty) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lg(-3, 3);
  for (int i = 0; i < 100; ++i) {
    DeviceParams d = random_device(rng);
    double n = std::pow(10.0, 3 + lg(rng)), w = d.lf.omega_b * std::pow(10.0, lg(rng) / 3);
    NoiseBudget b = quantum_noise_densities(d, n, w);
    EXPECT_NEAR(std::sqrt(b.S_II * b.S_VV) / (d.constants.hbar * w / 2), 1.0, 1e-9);
    EXPECT_NEAR(b.R_noise / std::sqrt(b.S_VV / b.S_II), 1.0, 1e-12);
    EXPECT_EQ(b.S_IV, 0.0);
  }
}

TEST(NoiseDensities, Domain) {
  DeviceParams d = unit_device(16.0);
  EXPECT_THROW(quantum_noise_densities(d, 0.0, 2.0), ParameterError);
  EXPECT_THROW(quantum_noise_densities(d, 1.0, 0.0), ParameterError);
  d.coupling.g0 = 0;
  EXPECT_THROW(quantum_noise_densities(d, 1.0, 2.0), ParameterError);
}

TEST(TotalNoise, OpenInputAndDirectValue) {
  NoiseBudget b;
  b.S_II = 4;
  b.S_VV = 0.25;
  b.omega_eval = 3;
  EXPECT_DOUBLE_EQ(total_added_current_noise(b, 0.0, 3.0), 4.0);
  EXPECT_DOUBLE_EQ(total_added_current_noise(b, 2.0, 3.0), 5.0);
  EXPECT_THROW(total_added_current_noise(b, 2.0, 3.5), ParameterError);
}

TEST(TotalNoise, NumericMinimumAtMatchedResistance) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    DeviceParams d = random_device(rng);
    const double w = d.lf.omega_b, Y = 1.0 / d.lf.R_b;
    auto f = [&](double logn) {
      return total_added_current_noise(quantum_noise_densities(d, std::exp(logn), w), Y, w);
    };
    double center = std::log(optimal_drive(d));
    auto m = boost::math::tools::brent_find_minima(f, center - 10, center + 7, 52);
    double R = quantum_noise_densities(d, std::exp(m.first), w).R_noise;
    EXPECT_NEAR(R / d.lf.R_b, 1.0, 1e-6);
  }
}

TEST(NoiseTemperature, MatchedUnitExample) {
  DeviceParams d = unit_device(16.0);  // R_b = 1/2 = R_noise(n = 1)
  EXPECT_NEAR(noise_temperature(d, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(sql_temperature(d), 1.0, 1e-15);
}

TEST(NoiseTemperature, MismatchPenalty) {
  DeviceParams d = unit_device(16.0);
  double n = optimal_drive(d) / 4;  // R_b = 4 R_noise
  EXPECT_NEAR(noise_temperature(d, n) / sql_temperature(d), 2.125, 1e-12);
}

TEST(NoiseTemperature, ConvexInLogDrive) {
  DeviceParams d = unit_device(16.0);
  std::vector<double> t;
  for (int k = -40; k <= 40; ++k) t.push_back(noise_temperature(d, std::pow(10.0, k / 10.0)));
  int imin = 0;
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    EXPECT_GT(t[k - 1] + t[k + 1], 2 * t[k]);
    if (t[k] < t[imin]) imin = static_cast<int>(k);
  }
  EXPECT_EQ(imin, 40);  // n = 1
}

TEST(OptimalDrive, UnitExampleAndScaling) {
  DeviceParams d = unit_device(32.0);  // R_b = 1/4
  EXPECT_NEAR(optimal_drive(d), 0.5, 1e-15);
  DeviceParams e = unit_device(8.0);  // R_b = 1
  EXPECT_NEAR(optimal_drive(e) / optimal_drive(d), 4.0, 1e-14);
}

TEST(OptimalDrive, ReachesQuantumLimitProperty) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    DeviceParams d = random_device(rng);
    double n = optimal_drive(d);
    double T = noise_temperature(d, n);
    EXPECT_NEAR(T * d.constants.k_B / (d.constants.hbar * d.lf.omega_b / 2), 1.0, 1e-9);
    EXPECT_NEAR(quantum_noise_densities(d, n, d.lf.omega_b).R_noise / d.lf.R_b, 1.0, 1e-12);
  }
}

TEST(DriveLimits, BifurcationIdentity) {
  DeviceParams d = unit_device(16.0, 2 * std::sqrt(3.0), 1.0, 1.0);
  DriveLimits l = drive_limits(d);
  EXPECT_NEAR(l.n_bif, 1.0, 1e-15);
  EXPECT_NEAR(l.n_max, 1.0, 1e-15);
  EXPECT_TRUE(l.finite);
  // R_max is the noise resistance at n_max.
  EXPECT_NEAR(l.R_max / quantum_noise_densities(d, l.n_max, d.lf.omega_b).R_noise, 1.0, 1e-14);
  EXPECT_NEAR(l.Q_min, d.lf.omega_b * d.lf.L_b / l.R_max, 1e-12);
}

TEST(DriveLimits, FiducialMinimumQuality) {
  EXPECT_NEAR(q_min_from_r_max(6.2e6, 5e-6, 5e-4) / 62000.0, 1.0, 0.01);
}

TEST(DriveLimits, OperatingFractionScaling) {
  DeviceParams a = unit_device(16.0, 8.0, 0.1, 1.0), b = unit_device(16.0, 8.0, 0.1, 0.5);
  DriveLimits la = drive_limits(a), lb = drive_limits(b);
  EXPECT_NEAR(lb.n_max / la.n_max, 0.5, 1e-15);
  EXPECT_NEAR(lb.R_max / la.R_max, 0.5, 1e-15);
  EXPECT_NEAR(lb.Q_min / la.Q_min, 2.0, 1e-14);
}

TEST(DriveLimits, ReachabilityMatchesQuality) {
  for (double Q : {1.0, 10.0, 100.0, 1000.0}) {
    DeviceParams d = unit_device(Q, 8.0, 0.5, 1.0);
    DriveLimits l = drive_limits(d);
    EXPECT_EQ(l.sql_reachable, l.R_max > d.lf.R_b);
    EXPECT_EQ(l.sql_reachable, Q >= l.Q_min);
  }
}

TEST(DriveLimits, NoKerrIsUnbounded) {
  DriveLimits l = drive_limits(unit_device(16.0));
  EXPECT_FALSE(l.finite);
  EXPECT_TRUE(std::isinf(l.n_max));
  EXPECT_TRUE(std::isinf(l.R_max));
  EXPECT_EQ(l.Q_min, 0.0);
  EXPECT_TRUE(l.sql_reachable);
}

TEST(DriveLimits, QminDecreasesWithMaxDrive) {
  double prev = std::numeric_limits<double>::infinity();
  for (double L : {10.0, 3.0, 1.0, 0.3, 0.1}) {
    double q = drive_limits(unit_device(16.0, 8.0, L)).Q_min;
    EXPECT_LT(q, prev);
    prev = q;
  }
}

TEST(EnergySensitivity, ThresholdAndScaling) {
  DeviceParams d = unit_device(16.0);
  SensitivityReport r = energy_sensitivity(d, 1.0);
  NoiseBudget b = quantum_noise_densities(d, 1.0, d.lf.omega_b);
  EXPECT_NEAR(r.epsilon * 2 / d.lf.L_b, b.S_II, 1e-15);
  EXPECT_NEAR(r.epsilon, 4.0, 1e-15);  // S_II = 2, L_b = 4
  // Phi^2 kappa L_b / (32 hbar g0^2 M^2)
  EXPECT_NEAR(r.n_threshold, 4.0 * 8.0 * 4.0 / 32.0, 1e-15);
  EXPECT_NEAR(energy_sensitivity(d, r.n_threshold).epsilon_over_hbar, 1.0, 1e-15);
  double e1 = energy_sensitivity(d, 1.0).epsilon, e2 = energy_sensitivity(d, 1000.0).epsilon;
  EXPECT_NEAR(e1 / e2, 1000.0, 1e-10);
}

TEST(EnergySensitivity, BelowQuantumIffAboveThresholdProperty) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lg(-2, 2);
  for (int i = 0; i < 100; ++i) {
    DeviceParams d = random_device(rng);
    double nt = energy_sensitivity(d, 1.0).n_threshold;
    double n = nt * std::pow(10.0, lg(rng));
    EXPECT_EQ(energy_sensitivity(d, n).epsilon_over_hbar < 1.0, n > nt);
  }
}

}  // namespace
}  // namespace rqu

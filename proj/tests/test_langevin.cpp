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
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "rqu/bae.hpp"
#include "rqu/error.hpp"
#include "rqu/langevin.hpp"
#include "rqu/rng.hpp"
#include "rqu/spectrum.hpp"

namespace rqu {
namespace {

DeviceParams toy_device(double kappa, double omega_b, double gamma, double g0,
                        double n_eq = 0.0) {
  const PhysicalConstants c = PhysicalConstants::natural();
  DeviceParams d;
  d.constants = c;
  d.lf = LowFrequencyMode::make(omega_b, 1, omega_b / gamma, 1, 0, n_eq, c);
  d.mw.kappa = kappa;
  d.mw.omega_a0 = 1e6;
  d.coupling = coupling_from_g0(g0, c, d.lf);
  return d;
}

using M5 = Eigen::Matrix<double, 5, 5>;

M5 augmented_drift(const LinearSde& s) {
  M5 A = M5::Zero();
  A.topLeftCorner<4, 4>() = s.A;
  A.block<1, 4>(4, 0) = s.C;
  return A;
}

TEST(ExactPropagator, MatchesMatrixExponentialAndQuadrature) {
  Xoshiro256 rng(11, 0);
  for (int trial = 0; trial < 3; ++trial) {
    const double kappa = 0.5 + 2 * rng.uniform();
    const double wb = 0.5 + 3 * rng.uniform();
    const double gamma = 0.01 + 0.1 * rng.uniform();
    const double g0 = 0.01 + 0.05 * rng.uniform();
    DeviceParams d = toy_device(kappa, wb, gamma, g0, 0.3 * trial);
    SteadyState ss = resonant_steady_state(50 + 100 * rng.uniform());
    ss.abar *= std::polar(1.0, rng.uniform());
    LinearSde sde = single_tone_sde(d, ss);
    const double dt = 0.05 + 0.2 * rng.uniform();
    ExactPropagator prop(sde, dt);

    M5 A = augmented_drift(sde);
    M5 phi = (A * dt).exp();
    EXPECT_LT((prop.transition() - phi.leftCols<4>()).cwiseAbs().maxCoeff(), 1e-10);

    Eigen::Matrix<double, 5, 4> B;
    B.topRows<4>() = sde.B;
    B.row(4) = sde.D;
    const M5 BB = B * B.transpose();
    M5 q;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        auto f = [&](double s) {
          M5 e = (A * s).exp();
          return (e * BB * e.transpose())(i, j);
        };
        q(i, j) = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, 0.0, dt, 8, 1e-13);
      }
    }
    EXPECT_LT((prop.noise_covariance() - q).cwiseAbs().maxCoeff(), 1e-10) << trial;
    const Eigen::Matrix<double, 5, 5>& L = prop.noise_factor();
    EXPECT_LT((L * L.transpose() - q).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ExactPropagator, StationaryCovarianceIsInvariant) {
  DeviceParams d = toy_device(2.0, 1.0, 0.05, 0.02, 1.5);
  LinearSde sde = single_tone_sde(d, resonant_steady_state(200));
  Eigen::Matrix4d S = stationary_covariance(sde);
  ExactPropagator prop(sde, 0.1);
  Eigen::Matrix4d P = prop.transition().topRows<4>();
  Eigen::Matrix4d next = P * S * P.transpose() + prop.noise_covariance().topLeftCorner<4, 4>();
  EXPECT_LT((next - S).cwiseAbs().maxCoeff(), 1e-12);
  // Thermal bath: (n_eq + 1/2)/2 per LF quadrature in the absence of coupling.
  LinearSde free = single_tone_sde(toy_device(2.0, 1.0, 0.05, 0.0, 1.5),
                                   resonant_steady_state(200));
  Eigen::Matrix4d S0 = stationary_covariance(free);
  EXPECT_NEAR(S0(2, 2), 1.0, 1e-12);
  EXPECT_NEAR(S0(3, 3), 1.0, 1e-12);
  EXPECT_NEAR(S0(0, 0), 0.25, 1e-12);
}

SimConfig short_config(double dt, double duration, std::uint64_t seed) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.duration = duration;
  cfg.seed = seed;
  cfg.welch_segment = 256;
  return cfg;
}

TEST(SingleTone, UncoupledOscillatorSitsInVacuum) {
  DeviceParams d = toy_device(4.0, 1.0, 0.05, 0.0);
  SteadyState ss = resonant_steady_state(0, 0);
  SimConfig cfg = short_config(0.0125, 4000 / 0.05, 2);
  cfg.record_stride = 8;
  Trace tr = simulate_single_tone(d, ss, cfg);
  ASSERT_GT(tr.size(), 1000u);
  double vx = 0, vy = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    vx += tr.x_quad[i] * tr.x_quad[i];
    vy += tr.y_quad[i] * tr.y_quad[i];
  }
  vx /= tr.size();
  vy /= tr.size();
  // Correlation time 2/gamma: about duration*gamma/4 independent samples.
  const double sigma = 0.5 * std::sqrt(2.0 / (cfg.duration * 0.05 / 4));
  EXPECT_NEAR(vx, 0.5, 3 * sigma);
  EXPECT_NEAR(vy, 0.5, 3 * sigma);
}

TEST(SingleTone, QuadraturesAreTheRotatingFrameOfB) {
  DeviceParams d = toy_device(4.0, 1.3, 0.05, 0.01);
  SteadyState ss = resonant_steady_state(100);
  SimConfig cfg = short_config(0.01, 1000, 3);
  cfg.record_stride = 7;
  Trace tr = simulate_single_tone(d, ss, cfg);
  for (std::size_t i = 0; i < tr.size(); i += 97) {
    std::complex<double> z(tr.x_quad[i], tr.y_quad[i]);
    std::complex<double> ref =
        std::sqrt(2.0) * tr.b[i] * std::polar(1.0, d.lf.omega_b * tr.t[i]);
    EXPECT_LT(std::abs(z - ref), 1e-10);
  }
  EXPECT_NEAR(tr.t[1] - tr.t[0], 7 * cfg.dt, 1e-12);
}

TEST(SingleTone, VacuumOutputIsFlatAtUnitLevel) {
  DeviceParams d = toy_device(4.0, 1.0, 0.05, 0.0);
  SimConfig cfg = short_config(0.01, 1000 / 0.05, 4);
  Trace tr = simulate_single_tone(d, resonant_steady_state(0, 0), cfg);
  SpectrumEstimate s = estimate_psd(tr.output, WelchConfig{1024, 0.5, cfg.dt});
  double mean = 0;
  std::size_t n = 0;
  for (std::size_t k = 1; s.freq[k] < 10; ++k, ++n) mean += s.psd[k];
  mean /= n;
  EXPECT_NEAR(mean, 1.0, 3 * s.ci95 / 1.96 / std::sqrt(double(n)) * 2);
}

// Output PSD of the linear model in the frequency domain:
// |D + C (-i w - A)^{-1} B|^2 summed over the noise inputs.
double transfer_psd(const LinearSde& s, double w) {
  using cd = std::complex<double>;
  Eigen::Matrix4cd M = cd(0, -w) * Eigen::Matrix4cd::Identity() - s.A.cast<cd>();
  Eigen::RowVector4cd h =
      s.D.cast<cd>() + s.C.cast<cd>() * M.inverse() * s.B.cast<cd>();
  return h.squaredNorm();
}

TEST(SingleTone, OutputSpectrumMatchesTransferFunction) {
  DeviceParams d = toy_device(4.0, 1.0, 0.05, 0.01, 0.5);
  SteadyState ss = resonant_steady_state(400);
  SimConfig cfg = short_config(0.01, 4000 / 0.05, 5);
  Trace tr = simulate_single_tone(d, ss, cfg);
  SpectrumEstimate s = estimate_psd(tr.output, WelchConfig{2048, 0.5, cfg.dt});
  LinearSde sde = single_tone_sde(d, ss);
  // Band powers are insensitive to the window's finite resolution.
  const double edges[] = {0.2, 0.6, 1.4, 3.0};
  for (int j = 0; j < 3; ++j) {
    double sim = 0;
    for (std::size_t k = 0; k < s.psd.size(); ++k)
      if (s.freq[k] >= edges[j] && s.freq[k] < edges[j + 1]) sim += s.psd[k] * s.domega;
    const double lo = s.freq[nearest_bin(s, edges[j])] - s.domega / 2;
    const double hi = s.freq[nearest_bin(s, edges[j + 1])] - s.domega / 2;
    double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double w) { return transfer_psd(sde, w); }, lo, hi, 15, 1e-10);
    EXPECT_NEAR(sim / ref, 1.0, 4 * s.ci95 / 1.96) << "band " << j;
  }
}

TEST(SingleTone, DeterministicAcrossThreadCounts) {
  DeviceParams d = toy_device(4.0, 1.0, 0.05, 0.01);
  SteadyState ss = resonant_steady_state(100);
  SimConfig cfg = short_config(0.01, 1000, 6);
  cfg.n_trajectories = 4;
  cfg.welch_segment = 32;
  size_t M = 0;
  cfg.dt = commensurate_dt(1.0, 0.01, &M);
  cfg.threads = 1;
  SpectrumEstimate a = single_tone_spectrum(d, ss, cfg, {}, {1.0, M});
  cfg.threads = 3;
  SpectrumEstimate b = single_tone_spectrum(d, ss, cfg, {}, {1.0, M});
  EXPECT_EQ(a.psd, b.psd);
  EXPECT_EQ(a.n_averages, b.n_averages);

  Trace t1 = simulate_single_tone(d, ss, cfg), t2 = simulate_single_tone(d, ss, cfg);
  EXPECT_EQ(t1.output, t2.output);
  cfg.seed = 7;
  Trace t3 = simulate_single_tone(d, ss, cfg);
  EXPECT_NE(t1.output, t3.output);
}

TEST(SimConfig, RejectsCoarseStepsAndShortRuns) {
  SimConfig cfg = short_config(0.01, 1000, 1);
  EXPECT_NO_THROW(cfg.validate(5.0, 0.05));
  EXPECT_THROW(cfg.validate(10.0, 0.05), ConfigError);
  EXPECT_THROW(cfg.validate(5.0, 0.01), ConfigError);
  cfg.welch_segment = 300;
  EXPECT_THROW(cfg.validate(5.0, 0.05), ConfigError);
  DeviceParams d = toy_device(4.0, 1.0, 0.05, 0.01);
  SimConfig bad = short_config(0.1, 1000, 1);
  EXPECT_THROW(simulate_single_tone(d, resonant_steady_state(10), bad), ConfigError);
}

TEST(TwoTone, NoDriveLeavesVacuum) {
  DeviceParams d = toy_device(1.0, 10.0, 0.05, 1.0);
  SimConfig cfg = short_config(1 / 400.0, 400 / 0.05, 8);
  QuadratureStats q = two_tone_quadrature_stats(
      d, TwoToneDrive::symmetric(0.0, d.lf), cfg, 10 / 0.05);
  EXPECT_NEAR(q.excess_x, 0.0, 4 * q.var_x_err + 0.02);
  EXPECT_NEAR(q.excess_y, 0.0, 0.1);
}

double heating_at(double ratio, double a_max, std::uint64_t seed) {
  const double kappa = 1, wb = ratio * kappa, gamma = 0.05;
  DeviceParams d = toy_device(kappa, wb, gamma, 1.0);
  const double a_drive = a_max / std::sqrt(kappa / (kappa * kappa + 4 * wb * wb));
  TwoToneDrive drive = TwoToneDrive::symmetric(a_drive, d.lf);
  EXPECT_NEAR(envelope(drive, d.mw, d.lf).a_max, a_max, 1e-9 * a_max);
  SimConfig cfg = short_config(1 / (40 * std::max(wb, kappa)), 400 / gamma, seed);
  return two_tone_quadrature_stats(d, drive, cfg, 10 / gamma).excess_x;
}

TEST(TwoTone, UnresolvedSidebandsHeatTheMeasuredQuadrature) {
  const double a_max = std::sqrt(5 * 16 * 0.05 * 100.0);
  const double resolved = heating_at(10, a_max, 9);
  const double unresolved = heating_at(1, a_max, 10);
  EXPECT_GT(unresolved, 0);
  RecordProperty("resolved_excess", std::to_string(resolved));
  RecordProperty("unresolved_excess", std::to_string(unresolved));
  EXPECT_GE(unresolved, 20 * std::max(resolved, 1e-3)) << resolved << " " << unresolved;
}

}  // namespace
}  // namespace rqu

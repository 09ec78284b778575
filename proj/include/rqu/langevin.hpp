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
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rqu/bae.hpp"
#include "rqu/core_model.hpp"
#include "rqu/linear_response.hpp"
#include "rqu/spectrum.hpp"

namespace rqu {

/// Time-domain settings, in the same units as the device rates.
struct SimConfig {
  double dt = 0;
  double duration = 0;
  std::uint64_t seed = 0;
  std::size_t n_trajectories = 1;
  std::size_t welch_segment = 1024;
  double welch_overlap = 0.5;
  std::size_t record_stride = 1;  // keep every k-th sample in a Trace
  unsigned threads = 1;

  /// Throws ConfigError unless dt <= 1/(dt_factor * fastest_rate),
  /// duration >= 50/gamma and the Welch segment is a power of two.
  void validate(double fastest_rate, double gamma,
                double dt_factor = 20.0) const;
};

/// Sampled trajectory. output[n] is the measured phase quadrature of the
/// reflected field averaged over [t[n], t[n] + dt*stride).
struct Trace {
  std::vector<double> t;
  std::vector<std::complex<double>> da;
  std::vector<std::complex<double>> b;
  std::vector<double> x_quad;  // x + i y = sqrt(2) b exp(i omega_b t)
  std::vector<double> y_quad;
  std::vector<double> output;
  std::size_t size() const { return t.size(); }
};

/// Coherent tone beta0 exp(-i omega t) entering through the low-frequency
/// bath port, in the same units as the bath noise (sqrt(quanta/s)).
struct SignalTone {
  double omega = 0;
  std::complex<double> beta0 = 0;
};

struct SingleToneOptions {
  bool lf_bath = true;       // false leaves only the amplifier's added noise
  bool cavity_noise = true;  // microwave input vacuum
  std::optional<SignalTone> signal;
  bool stationary_start = true;  // draw the initial state from the
                                 // stationary covariance
};

/// Linear SDE ds = A s dt + B dW for s = (Re da, Im da, Re b, Im b), with
/// the measured output y dt = C s dt + D dW.
struct LinearSde {
  Eigen::Matrix4d A;
  Eigen::Matrix4d B;
  Eigen::RowVector4d C;
  Eigen::RowVector4d D;
};

LinearSde single_tone_sde(const DeviceParams& device, const SteadyState& ss,
                          const SingleToneOptions& opts = {});

/// Stationary covariance: A S + S A^T + B B^T = 0.
Eigen::Matrix4d stationary_covariance(const LinearSde& sde);

/// Exact one-step discretization of the augmented system (state plus the
/// output integral over the step), obtained with the Van Loan construction.
class ExactPropagator {
 public:
  ExactPropagator(const LinearSde& sde, double dt);

  /// Transition of the augmented state; the output integral starts at zero.
  const Eigen::Matrix<double, 5, 4>& transition() const { return phi_; }
  /// Covariance of the injected noise over one step.
  const Eigen::Matrix<double, 5, 5>& noise_covariance() const { return q_; }
  /// Factor L with L L^T = noise_covariance().
  const Eigen::Matrix<double, 5, 5>& noise_factor() const { return l_; }
  double dt() const { return dt_; }

 private:
  double dt_;
  Eigen::Matrix<double, 5, 4> phi_;
  Eigen::Matrix<double, 5, 5> q_;
  Eigen::Matrix<double, 5, 5> l_;
};

/// One trajectory (index 0 of cfg.seed) of the single-tone linearized
/// dynamics about the steady state ss.
Trace simulate_single_tone(const DeviceParams& device, const SteadyState& ss,
                           const SimConfig& cfg,
                           const SingleToneOptions& opts = {});

/// Baseband demodulation: z = y exp(-i omega t), boxcar-averaged over
/// `decimation` samples.
struct Demodulation {
  double omega = 0;
  std::size_t decimation = 1;
};

/// Welch spectrum of the demodulated output averaged over all trajectories.
/// Trajectories run in parallel; the reduction is in trajectory order.
SpectrumEstimate single_tone_spectrum(const DeviceParams& device,
                                      const SteadyState& ss,
                                      const SimConfig& cfg,
                                      const SingleToneOptions& opts,
                                      const Demodulation& demod);

/// Scale from the measured output quadrature to the flux-equivalent
/// coordinate x = b + b^dag at low frequency: x = -y sqrt(kappa)/(4 g0 |abar|).
double output_to_x_gain(const DeviceParams& device, const SteadyState& ss);

/// Step size that divides the period 2 pi/omega into an integer number of
/// steps no longer than dt_max. Returns the step count per period in *steps.
double commensurate_dt(double omega, double dt_max, std::size_t* steps);

/// Variance statistics of a low-frequency quadrature sampled after burn-in.
struct QuadratureStats {
  double var_x = 0;     // measured quadrature
  double var_y = 0;     // conjugate quadrature
  double var_x_err = 0;  // standard error from batch means
  double excess_x = 0;   // var_x - 1/2 - n_eq
  double excess_y = 0;
  std::size_t samples = 0;
  double dt_used = 0;
};

/// One trajectory of the two-tone dynamics with
/// abar(t) = a_max cos(omega_b t + delta) e^{i phi_drive}. dt is rounded down
/// to an integer division of the modulation period.
Trace simulate_two_tone(const DeviceParams& device, const TwoToneDrive& drive,
                        const SimConfig& cfg);

/// Long-run X_delta = x cos(delta) - y sin(delta) statistics of the two-tone
/// dynamics, averaged over trajectories.
QuadratureStats two_tone_quadrature_stats(const DeviceParams& device,
                                          const TwoToneDrive& drive,
                                          const SimConfig& cfg,
                                          double burn_in);

/// The same statistics for a single resonant tone with n_circ photons.
QuadratureStats single_tone_quadrature_stats(const DeviceParams& device,
                                             double n_circ,
                                             const SimConfig& cfg,
                                             double burn_in);

struct SqlOptions {
  double n_circ = 0;         // 0 selects the optimal drive
  bool signal_on = true;
  double signal_snr = 20;    // tone power over the noise in its bins
  double signal_offset = 1;  // tone at omega_b + offset * gamma
  std::size_t segment = 512;
};

struct SqlReport {
  double n_circ = 0;
  double n_opt = 0;
  double dt_used = 0;
  std::size_t decimation = 0;
  std::size_t n_averages = 0;
  double domega = 0;
  double tone_omega = 0;
  double tone_input_power = 0;
  double tone_output_power = 0;
  double gain_at_tone = 0;
  double gain_at_omega_b = 0;
  double noise_at_omega_b = 0;    // output PSD at omega_b
  double input_referred_quanta = 0;  // total noise referred to the bath port
  double T_N_inferred = 0;
  double T_N_analytic = 0;
  double T_SQL = 0;
  double tone_snr = 0;  // tone-bin excess in units of its scatter
  SpectrumEstimate spectrum;  // demodulated output PSD, offsets from omega_b
};

/// Injects a calibrated tone near omega_b, infers the added noise from the
/// ratio of output noise to tone power, and converts it to a temperature.
SqlReport sql_experiment(const DeviceParams& device, const SimConfig& cfg,
                         const SqlOptions& opts);

}  // namespace rqu

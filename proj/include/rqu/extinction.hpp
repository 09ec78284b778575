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

#include <cstdint>
#include <optional>
#include <vector>

#include "rqu/core_model.hpp"

namespace rqu {

/// Phase-sensitive upconversion sweep: two tones at f_res +/- f_mod, a flux
/// tone at f_mod whose phase is swept against the two-tone envelope.
/// Phases are in degrees relative to the envelope phase.
struct ExtinctionConfig {
  double f_res = 4.89e9;  // Hz
  double f_mod = 2.9e6;   // Hz
  double phase_start = 0;
  double phase_stop = 1080;
  double phase_step = 5;
  double amp_imbalance = 0;  // relative tone-amplitude mismatch
  double phase_error = 0;    // rad, tone-phase asymmetry
  double noise_floor = 0;    // mean additive noise power, relative to P0
  double P0 = 1;
  double phi_env_deg = 0;    // envelope phase in sweep coordinates

  std::vector<double> phase_grid() const;
  /// Leakage plus mean noise: P0 (imb^2/4 + phase_error^2/4) + noise_floor.
  double floor() const;
  void validate() const;
};

struct ExtinctionPoint {
  double phase_deg = 0;
  double power = 0;
};

struct ExtinctionFit {
  double P0 = 0;
  double phi0 = 0;  // rad, folded into (-pi/2, pi/2]
  double floor = 0;
  double extinction_dB = 0;  // +inf when floor = 0
  double residual_rms = 0;   // rms(P - model) / P0
  bool floor_fitted = false;
  bool infinite = false;
};

/// P(phi) = P0 cos^2(phi - phi_env) + P0(imb^2 + pe^2)/4, plus exponentially
/// distributed noise of mean noise_floor (so P >= 0).
std::vector<ExtinctionPoint> simulate_extinction_sweep(
    const DeviceParams& device, const ExtinctionConfig& cfg,
    std::uint64_t seed);

/// Least-squares fit of P0 cos^2(phi - phi0) + floor in log-power space.
/// With floor_known only P0 and phi0 vary. Needs >= 20 points spanning at
/// least 360 degrees.
ExtinctionFit fit_extinction(const std::vector<ExtinctionPoint>& table,
                             std::optional<double> floor_known = std::nullopt);

/// 10 log10((P0 + floor)/floor), +inf for floor = 0.
double extinction_ratio_dB(double P0, double floor);

/// 10 log10(max P / min P) over the sweep.
double numerical_extinction_dB(const std::vector<ExtinctionPoint>& table);

/// Amplitude imbalance whose leakage, together with the given phase error
/// and noise floor, produces target_dB.
double calibrate_imbalance(double target_dB, double phase_error,
                           double noise_floor, double P0 = 1.0);

}  // namespace rqu

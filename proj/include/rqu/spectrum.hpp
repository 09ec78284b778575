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
#include <cstddef>
#include <vector>

namespace rqu {

/// Welch-averaged, symmetrized, double-sided power spectral density.
/// A white sequence of variance 1/dt has density 1, and
/// sum(psd) * domega / (2 pi) over the full two-sided axis is the mean power.
/// Real channels return the non-negative half of the axis (values are still
/// two-sided densities); complex channels return the full axis, ascending.
struct SpectrumEstimate {
  std::vector<double> freq;  // rad/s
  std::vector<double> psd;
  std::size_t n_averages = 0;
  double ci95 = 0;  // relative half-width, 1.96/sqrt(n_averages)
  double domega = 0;
};

struct WelchConfig {
  std::size_t segment = 1024;  // power of two
  double overlap = 0.5;        // fraction in [0, 1)
  double dt = 1.0;             // sample spacing, s
  void validate() const;
};

/// Streaming estimator; samples are pushed one at a time or in blocks.
class WelchAccumulator {
 public:
  WelchAccumulator(const WelchConfig& cfg, bool complex_input);
  ~WelchAccumulator();
  WelchAccumulator(const WelchAccumulator&) = delete;
  WelchAccumulator& operator=(const WelchAccumulator&) = delete;

  void push(std::complex<double> z);
  void push(double x) { push(std::complex<double>(x, 0.0)); }
  std::size_t n_averages() const { return n_avg_; }
  std::size_t samples_seen() const { return seen_; }
  SpectrumEstimate result() const;

  /// Adds another accumulator's periodogram sum (same config).
  void merge(const WelchAccumulator& other);

 private:
  void process_segment();

  WelchConfig cfg_;
  bool complex_;
  std::size_t hop_;
  std::vector<double> window_;
  double window_power_ = 0;
  std::vector<std::complex<double>> buf_;
  std::size_t fill_ = 0;
  std::vector<double> acc_;
  std::size_t n_avg_ = 0;
  std::size_t seen_ = 0;
  void* plan_ = nullptr;
  std::complex<double>* in_ = nullptr;
  std::complex<double>* out_ = nullptr;
};

SpectrumEstimate estimate_psd(const std::vector<double>& channel,
                              const WelchConfig& cfg);
SpectrumEstimate estimate_psd(const std::vector<std::complex<double>>& channel,
                              const WelchConfig& cfg);

/// Linear interpolation of the estimate at omega.
double psd_at(const SpectrumEstimate& s, double omega);

/// Index of the bin nearest omega.
std::size_t nearest_bin(const SpectrumEstimate& s, double omega);

}  // namespace rqu

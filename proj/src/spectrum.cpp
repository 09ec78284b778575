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

#include "rqu/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "rqu/error.hpp"

namespace rqu {
namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

void WelchConfig::validate() const {
  if (segment < 8 || (segment & (segment - 1)) != 0) {
    std::ostringstream os;
    os << "welch_segment must be a power of two >= 8, got " << segment;
    throw ConfigError(os.str());
  }
  if (!(overlap >= 0 && overlap < 1))
    throw ConfigError("welch_overlap must lie in [0, 1)");
  if (!(dt > 0)) throw ConfigError("sample spacing dt > 0");
}

WelchAccumulator::WelchAccumulator(const WelchConfig& cfg, bool complex_input)
    : cfg_(cfg), complex_(complex_input) {
  cfg_.validate();
  std::size_t n = cfg_.segment;
  hop_ = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(n * (1.0 - cfg_.overlap))));
  window_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / n);
    window_power_ += window_[i] * window_[i];
  }
  buf_.assign(n, 0.0);
  acc_.assign(n, 0.0);
  in_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
  out_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
  std::lock_guard<std::mutex> lock(plan_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(n),
                           reinterpret_cast<fftw_complex*>(in_),
                           reinterpret_cast<fftw_complex*>(out_),
                           FFTW_FORWARD, FFTW_ESTIMATE);
}

WelchAccumulator::~WelchAccumulator() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
}

void WelchAccumulator::push(std::complex<double> z) {
  buf_[fill_++] = z;
  ++seen_;
  if (fill_ == cfg_.segment) {
    process_segment();
    std::copy(buf_.begin() + hop_, buf_.end(), buf_.begin());
    fill_ = cfg_.segment - hop_;
  }
}

void WelchAccumulator::process_segment() {
  for (std::size_t i = 0; i < cfg_.segment; ++i) in_[i] = buf_[i] * window_[i];
  fftw_execute(static_cast<fftw_plan>(plan_));
  for (std::size_t i = 0; i < cfg_.segment; ++i) acc_[i] += std::norm(out_[i]);
  ++n_avg_;
}

void WelchAccumulator::merge(const WelchAccumulator& other) {
  if (other.cfg_.segment != cfg_.segment || other.complex_ != complex_)
    throw ParameterError("cannot merge Welch accumulators with different shapes");
  for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += other.acc_[i];
  n_avg_ += other.n_avg_;
  seen_ += other.seen_;
}

SpectrumEstimate WelchAccumulator::result() const {
  if (n_avg_ == 0) {
    std::ostringstream os;
    os << "insufficient samples for a spectrum: " << seen_
       << " samples, segment " << cfg_.segment;
    throw ConfigError(os.str());
  }
  const std::size_t n = cfg_.segment;
  const double scale = cfg_.dt / (window_power_ * n_avg_);
  SpectrumEstimate s;
  s.n_averages = n_avg_;
  s.ci95 = 1.96 / std::sqrt(static_cast<double>(n_avg_));
  s.domega = 2 * std::numbers::pi / (n * cfg_.dt);
  if (complex_) {
    s.freq.resize(n);
    s.psd.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t k = (j + n / 2) % n;  // fftshift
      long m = static_cast<long>(j) - static_cast<long>(n / 2);
      s.freq[j] = m * s.domega;
      s.psd[j] = acc_[k] * scale;
    }
  } else {
    s.freq.resize(n / 2 + 1);
    s.psd.resize(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
      s.freq[k] = k * s.domega;
      // Symmetrize the two halves of a real signal's periodogram.
      double v = (k == 0 || k == n / 2) ? acc_[k]
                                         : 0.5 * (acc_[k] + acc_[n - k]);
      s.psd[k] = v * scale;
    }
  }
  return s;
}

namespace {

template <typename T>
SpectrumEstimate batch(const std::vector<T>& x, const WelchConfig& cfg,
                       bool cplx) {
  cfg.validate();
  if (x.size() < 4 * cfg.segment) {
    std::ostringstream os;
    os << "channel length " << x.size() << " is below 4 x welch_segment ("
       << 4 * cfg.segment << ")";
    throw ConfigError(os.str());
  }
  WelchAccumulator acc(cfg, cplx);
  for (const auto& v : x) acc.push(v);
  return acc.result();
}

}  // namespace

SpectrumEstimate estimate_psd(const std::vector<double>& channel,
                              const WelchConfig& cfg) {
  return batch(channel, cfg, false);
}

SpectrumEstimate estimate_psd(const std::vector<std::complex<double>>& channel,
                              const WelchConfig& cfg) {
  return batch(channel, cfg, true);
}

std::size_t nearest_bin(const SpectrumEstimate& s, double omega) {
  auto it = std::lower_bound(s.freq.begin(), s.freq.end(), omega);
  if (it == s.freq.begin()) return 0;
  if (it == s.freq.end()) return s.freq.size() - 1;
  std::size_t i = it - s.freq.begin();
  return (omega - s.freq[i - 1] < s.freq[i] - omega) ? i - 1 : i;
}

double psd_at(const SpectrumEstimate& s, double omega) {
  auto it = std::lower_bound(s.freq.begin(), s.freq.end(), omega);
  if (it == s.freq.begin()) return s.psd.front();
  if (it == s.freq.end()) return s.psd.back();
  std::size_t i = it - s.freq.begin();
  double t = (omega - s.freq[i - 1]) / (s.freq[i] - s.freq[i - 1]);
  return (1 - t) * s.psd[i - 1] + t * s.psd[i];
}

}  // namespace rqu

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
#include <numbers>

#include "rqu/error.hpp"
#include "rqu/langevin.hpp"
#include "rqu/noise_budget.hpp"

namespace rqu {
namespace {

struct ToneEstimate {
  double excess = 0;    // integrated power above the baseline
  double baseline = 0;  // density under the centre bin
};

// Power in bins k-1..k+1 above a quadratic baseline fitted to bins
// k +/- (2..6). An on-bin tone under a Hann window lands entirely in those
// three bins.
ToneEstimate tone_excess(const SpectrumEstimate& s, std::size_t k) {
  Eigen::Matrix<double, 10, 3> X;
  Eigen::Matrix<double, 10, 1> y;
  int r = 0;
  for (int off = 2; off <= 6; ++off) {
    for (int sg : {-1, 1}) {
      double x = sg * off;
      X.row(r) << 1, x, x * x;
      y(r) = s.psd[k + sg * off];
      ++r;
    }
  }
  Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
  ToneEstimate t;
  t.baseline = c(0);
  for (int off = -1; off <= 1; ++off)
    t.excess += s.psd[k + off] - (c(0) + c(1) * off + c(2) * off * off);
  t.excess *= s.domega / (2 * std::numbers::pi);
  return t;
}

}  // namespace

SqlReport sql_experiment(const DeviceParams& d, const SimConfig& cfg,
                         const SqlOptions& opts) {
  const double wb = d.lf.omega_b, gam = d.lf.gamma;
  const double hbar = d.constants.hbar, kB = d.constants.k_B;
  SqlReport rep;
  rep.n_opt = optimal_drive(d);
  rep.n_circ = opts.n_circ > 0 ? opts.n_circ : rep.n_opt;
  SteadyState ss = resonant_steady_state(rep.n_circ);

  SimConfig run = cfg;
  run.dt = commensurate_dt(wb, cfg.dt, &rep.decimation);
  run.welch_segment = opts.segment;
  rep.dt_used = run.dt;
  rep.domega = wb / static_cast<double>(opts.segment);
  const double L_half = opts.segment / 2.0;
  double bins = std::round(opts.signal_offset * gam / rep.domega);
  const bool placed = bins >= 8 && bins <= L_half - 16;
  // Without a tone the bin only anchors the tone_snr statistic.
  if (!opts.signal_on && !placed) bins = std::floor(L_half / 2);
  if (opts.signal_on && !placed)
    throw ConfigError(
        "signal offset must land at least 8 bins from the demodulation "
        "frequency and inside the analysis band");
  const double Om = bins * rep.domega;
  rep.tone_omega =
      opts.signal_on ? wb + Om : std::numeric_limits<double>::quiet_NaN();

  rep.T_SQL = sql_temperature(d);
  rep.T_N_analytic = noise_temperature(d, rep.n_circ);
  const double hw = gam / 2;
  const double L_ratio = (hw * hw + Om * Om) / (hw * hw);

  SingleToneOptions o;
  o.lf_bath = true;
  if (opts.signal_on) {
    double n_ref = (d.lf.n_eq + 0.5 + rep.T_N_analytic * kB / (hbar * wb)) *
                   L_ratio;
    double p = opts.signal_snr * 1.5 * rep.domega / (2 * std::numbers::pi) *
               n_ref;
    rep.tone_input_power = p;
    o.signal = SignalTone{rep.tone_omega, std::sqrt(p)};
  }
  SpectrumEstimate s = single_tone_spectrum(d, ss, run, o, {wb, rep.decimation});
  rep.n_averages = s.n_averages;

  const std::size_t k0 = nearest_bin(s, 0.0);
  const std::size_t ks = nearest_bin(s, Om);
  ToneEstimate te = tone_excess(s, ks);

  // Scatter of the same statistic where there is no tone.
  std::vector<double> refs;
  const std::size_t n = s.psd.size();
  for (std::size_t k = 8; k + 8 < n; k += 3) {
    if (std::abs(s.freq[k]) < 3 * gam) continue;
    ToneEstimate r = tone_excess(s, k);
    refs.push_back(r.excess / (r.baseline * 3 * rep.domega / (2 * std::numbers::pi)));
  }
  double m = 0, v = 0;
  for (double r : refs) m += r;
  m /= refs.size();
  for (double r : refs) v += (r - m) * (r - m);
  double sd = std::sqrt(v / (refs.size() - 1));
  double r_tone =
      te.excess / (te.baseline * 3 * rep.domega / (2 * std::numbers::pi));
  rep.tone_snr = r_tone / sd;

  rep.noise_at_omega_b = s.psd[k0];
  if (opts.signal_on) {
    rep.tone_output_power = te.excess;
    rep.gain_at_tone = te.excess / rep.tone_input_power;
    rep.gain_at_omega_b = rep.gain_at_tone * L_ratio;
    rep.input_referred_quanta = rep.noise_at_omega_b / rep.gain_at_omega_b;
    rep.T_N_inferred =
        hbar * wb * (rep.input_referred_quanta - d.lf.n_eq - 0.5) / kB;
  } else {
    rep.T_N_inferred = std::numeric_limits<double>::quiet_NaN();
  }
  rep.spectrum = std::move(s);
  return rep;
}

}  // namespace rqu

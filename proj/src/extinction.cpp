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

#include "rqu/extinction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/random/exponential_distribution.hpp>
#include <unsupported/Eigen/NonLinearOptimization>

#include "rqu/error.hpp"
#include "rqu/rng.hpp"

namespace rqu {
namespace {

constexpr double kDeg = std::numbers::pi / 180;

// Residuals of P0 cos^2(phi - phi0) + F against the data, either in log
// power (all data positive) or in linear power. Parameters are
// (P0, phi0[, ln F]).
struct SweepResiduals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>& phi;
  const std::vector<double>& P;
  bool log_space;
  bool fit_floor;
  double fixed_floor;

  int inputs() const { return fit_floor ? 3 : 2; }
  int values() const { return static_cast<int>(phi.size()); }

  double floor(const Eigen::VectorXd& x) const {
    return fit_floor ? std::exp(x(2)) : fixed_floor;
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    double F = floor(x);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      double c = std::cos(phi[i] - x(1));
      double m = x(0) * c * c + F;
      f(i) = log_space ? std::log(P[i]) - std::log(m) : P[i] - m;
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& J) const {
    double F = floor(x);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      double d = phi[i] - x(1);
      double c = std::cos(d);
      double m = x(0) * c * c + F;
      double w = log_space ? -1.0 / m : -1.0;
      J(i, 0) = w * c * c;
      J(i, 1) = w * x(0) * std::sin(2 * d);
      if (fit_floor) J(i, 2) = w * F;
    }
    return 0;
  }
};

double fold_phase(double phi0) {
  // cos^2 has period pi; map into (-pi/2, pi/2].
  double p = std::remainder(phi0, std::numbers::pi);
  if (p <= -std::numbers::pi / 2) p += std::numbers::pi;
  return p;
}

}  // namespace

std::vector<double> ExtinctionConfig::phase_grid() const {
  std::vector<double> g;
  auto n = static_cast<std::size_t>(
      std::floor((phase_stop - phase_start) / phase_step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) g.push_back(phase_start + i * phase_step);
  return g;
}

double ExtinctionConfig::floor() const {
  return P0 * (amp_imbalance * amp_imbalance / 4 +
               phase_error * phase_error / 4) +
         noise_floor;
}

void ExtinctionConfig::validate() const {
  require(f_res > 0 && f_mod > 0, "f_res, f_mod > 0");
  require(phase_step > 0, "phase_step > 0");
  require(phase_stop > phase_start, "phase_stop > phase_start");
  require(amp_imbalance >= 0, "amp_imbalance >= 0");
  require(noise_floor >= 0, "noise_floor >= 0");
  require(P0 > 0, "P0 > 0");
}

std::vector<ExtinctionPoint> simulate_extinction_sweep(
    const DeviceParams& device, const ExtinctionConfig& cfg,
    std::uint64_t seed) {
  device.validate();
  cfg.validate();
  Xoshiro256 rng(seed, 0);
  boost::random::exponential_distribution<double> noise(
      cfg.noise_floor > 0 ? 1.0 / cfg.noise_floor : 1.0);
  const double leak = cfg.floor() - cfg.noise_floor;
  std::vector<ExtinctionPoint> out;
  for (double ph : cfg.phase_grid()) {
    double c = std::cos((ph - cfg.phi_env_deg) * kDeg);
    double p = cfg.P0 * c * c + leak;
    if (cfg.noise_floor > 0) p += noise(rng);
    out.push_back({ph, p});
  }
  return out;
}

double extinction_ratio_dB(double P0, double floor) {
  if (floor <= 0) return std::numeric_limits<double>::infinity();
  return 10 * std::log10((P0 + floor) / floor);
}

double numerical_extinction_dB(const std::vector<ExtinctionPoint>& t) {
  require(!t.empty(), "empty sweep");
  auto [lo, hi] = std::minmax_element(
      t.begin(), t.end(),
      [](const auto& a, const auto& b) { return a.power < b.power; });
  if (lo->power <= 0) return std::numeric_limits<double>::infinity();
  return 10 * std::log10(hi->power / lo->power);
}

double calibrate_imbalance(double target_dB, double phase_error,
                           double noise_floor, double P0) {
  require(target_dB > 0, "target extinction > 0 dB");
  double floor = P0 / (std::pow(10.0, target_dB / 10) - 1);
  double leak = floor - noise_floor - P0 * phase_error * phase_error / 4;
  if (leak < 0)
    throw ParameterError(
        "noise floor and phase error alone exceed the target floor");
  return 2 * std::sqrt(leak / P0);
}

ExtinctionFit fit_extinction(const std::vector<ExtinctionPoint>& table,
                             std::optional<double> floor_known) {
  if (table.size() < 20) {
    std::ostringstream os;
    os << "extinction fit needs >= 20 phase points, got " << table.size();
    throw FitDomainError(os.str());
  }
  std::vector<double> phi, P;
  double lo = table.front().phase_deg, hi = lo;
  for (const auto& p : table) {
    phi.push_back(p.phase_deg * kDeg);
    P.push_back(p.power);
    lo = std::min(lo, p.phase_deg);
    hi = std::max(hi, p.phase_deg);
  }
  if (hi - lo <= 90)
    throw FitDomainError("degenerate sweep: all phases lie within 90 degrees");
  if (hi - lo < 360)
    throw FitDomainError("extinction fit needs a sweep spanning >= 360 degrees");
  if (floor_known && *floor_known < 0)
    throw ParameterError("known floor must be >= 0");

  // Linear start: P = c0 + c1 cos 2phi + c2 sin 2phi.
  const std::size_t n = phi.size();
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X.row(i) << 1, std::cos(2 * phi[i]), std::sin(2 * phi[i]);
    y(i) = P[i];
  }
  Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
  double P0 = 2 * std::hypot(c(1), c(2));
  double phi0 = std::atan2(c(2), c(1)) / 2;
  double pmin = *std::min_element(P.begin(), P.end());
  if (!(P0 > 1e-12 * std::abs(c(0))))
    throw FitDomainError("sweep shows no phase dependence");

  const bool fit_floor = !floor_known.has_value();
  const double F_init =
      fit_floor ? std::max({c(0) - P0 / 2, pmin, 1e-15 * P0}) : *floor_known;
  // The floor is only identifiable on a log scale; with it pinned, the
  // additive noise model makes linear residuals the natural choice.
  const bool log_space = fit_floor && pmin > 0 && F_init > 0;

  SweepResiduals fn{phi, P, log_space, fit_floor, fit_floor ? 0.0 : *floor_known};
  Eigen::VectorXd x(fn.inputs());
  x(0) = P0;
  x(1) = phi0;
  if (fit_floor) x(2) = std::log(F_init);
  if (fit_floor && !log_space) {
    // Linear space with a free floor is itself linear; keep the start.
    fn.fit_floor = false;
    fn.fixed_floor = std::max(c(0) - P0 / 2, 0.0);
    x.conservativeResize(2);
  }
  Eigen::LevenbergMarquardt<SweepResiduals> lm(fn);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 4000;
  lm.minimize(x);

  ExtinctionFit fit;
  fit.P0 = x(0);
  fit.phi0 = fold_phase(x(1));
  fit.floor_fitted = fit_floor;
  fit.floor = fn.fit_floor ? std::exp(x(2)) : fn.fixed_floor;
  fit.extinction_dB = extinction_ratio_dB(fit.P0, fit.floor);
  fit.infinite = std::isinf(fit.extinction_dB);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double cc = std::cos(phi[i] - x(1));
    double r = P[i] - (fit.P0 * cc * cc + fit.floor);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n) / fit.P0;
  return fit;
}

}  // namespace rqu

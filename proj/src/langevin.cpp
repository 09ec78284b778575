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

#include "rqu/langevin.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "rqu/error.hpp"
#include "rqu/parallel.hpp"
#include "rqu/rng.hpp"

namespace rqu {

using Vec4 = Eigen::Vector4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using cd = std::complex<double>;

void SimConfig::validate(double fastest_rate, double gamma,
                         double dt_factor) const {
  std::ostringstream os;
  double dt_max = 1.0 / (dt_factor * fastest_rate);
  if (!(dt > 0) || dt > dt_max * (1 + 1e-12)) {
    os << "dt = " << dt << " violates dt <= 1/(" << dt_factor
       << " * max rate) = " << dt_max;
    throw ConfigError(os.str());
  }
  if (!(duration >= 50.0 / gamma * (1 - 1e-12))) {
    os << "duration = " << duration << " violates duration >= 50/gamma = "
       << 50.0 / gamma;
    throw ConfigError(os.str());
  }
  if (n_trajectories < 1) throw ConfigError("n_trajectories >= 1");
  if (record_stride < 1) throw ConfigError("record_stride >= 1");
  WelchConfig{welch_segment, welch_overlap, dt}.validate();
}

LinearSde single_tone_sde(const DeviceParams& d, const SteadyState& ss,
                          const SingleToneOptions& opts) {
  const double k = d.mw.kappa, g = d.lf.gamma, wb = d.lf.omega_b;
  const double g0 = d.coupling.g0, Dl = ss.Delta;
  const double ar = ss.abar.real(), ai = ss.abar.imag();
  LinearSde s;
  s.A << -k / 2, -Dl, 2 * g0 * ai, 0,
         Dl, -k / 2, -2 * g0 * ar, 0,
         0, 0, -g / 2, wb,
         -2 * g0 * ar, -2 * g0 * ai, -wb, -g / 2;
  s.B.setZero();
  if (opts.cavity_noise) {
    s.B(0, 0) = -std::sqrt(k) / 2;
    s.B(1, 1) = -std::sqrt(k) / 2;
  }
  if (opts.lf_bath) {
    double a = -std::sqrt(g * (d.lf.n_eq + 0.5) / 2);
    s.B(2, 2) = a;
    s.B(3, 3) = a;
  }
  // Phase quadrature relative to the intracavity field.
  double th = ss.n_circ > 0 ? std::arg(ss.abar) : 0.0;
  double cs = std::cos(th), sn = std::sin(th);
  s.C << -2 * std::sqrt(k) * sn, 2 * std::sqrt(k) * cs, 0, 0;
  s.D.setZero();
  if (opts.cavity_noise) s.D << -sn, cs, 0, 0;
  return s;
}

Eigen::Matrix4d stationary_covariance(const LinearSde& s) {
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  Eigen::Matrix<double, 16, 16> K =
      Eigen::kroneckerProduct(I, s.A) + Eigen::kroneckerProduct(s.A, I);
  Eigen::Matrix4d Q = s.B * s.B.transpose();
  Eigen::Matrix<double, 16, 1> q =
      Eigen::Map<const Eigen::Matrix<double, 16, 1>>(Q.data());
  Eigen::Matrix<double, 16, 1> x = K.fullPivLu().solve(-q);
  Eigen::Matrix4d S = Eigen::Map<Eigen::Matrix4d>(x.data());
  return (S + S.transpose()) / 2;
}

ExactPropagator::ExactPropagator(const LinearSde& s, double dt) : dt_(dt) {
  using M5 = Eigen::Matrix<double, 5, 5>;
  M5 A = M5::Zero();
  A.topLeftCorner<4, 4>() = s.A;
  A.block<1, 4>(4, 0) = s.C;
  Eigen::Matrix<double, 5, 4> B;
  B.topRows<4>() = s.B;
  B.row(4) = s.D;

  Eigen::Matrix<double, 10, 10> V = Eigen::Matrix<double, 10, 10>::Zero();
  V.topLeftCorner<5, 5>() = -A * dt;
  V.topRightCorner<5, 5>() = B * B.transpose() * dt;
  V.bottomRightCorner<5, 5>() = A.transpose() * dt;
  Eigen::Matrix<double, 10, 10> E = V.exp();
  M5 phi = E.bottomRightCorner<5, 5>().transpose();
  q_ = phi * E.topRightCorner<5, 5>();
  q_ = (q_ + q_.transpose()) / 2;
  phi_ = phi.leftCols<4>();

  // The output integral carries its own O(dt^3) noise, so q_ is full rank.
  Eigen::SelfAdjointEigenSolver<M5> es(q_);
  l_ = es.eigenvectors() *
       es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double output_to_x_gain(const DeviceParams& d, const SteadyState& ss) {
  double G = d.coupling.g0 * std::abs(ss.abar);
  require(G > 0, "output calibration needs g0 |abar| > 0");
  return -std::sqrt(d.mw.kappa) / (4 * G);
}

double commensurate_dt(double omega, double dt_max, std::size_t* steps) {
  require(omega > 0 && dt_max > 0, "omega, dt > 0");
  double period = 2 * std::numbers::pi / omega;
  auto n = static_cast<std::size_t>(std::ceil(period / dt_max * (1 - 1e-12)));
  n = std::max<std::size_t>(n, 1);
  if (steps) *steps = n;
  return period / n;
}

namespace {

// Exact stepping of the single-tone model. Calls visit(n, t_n, state at t_n,
// output averaged over [t_n, t_n + dt)) for n in [0, steps).
template <typename Visit>
void run_single_tone(const DeviceParams& d, const SteadyState& ss,
                     const SimConfig& cfg, const SingleToneOptions& opts,
                     std::size_t trajectory, std::size_t steps, Visit&& visit) {
  LinearSde sde = single_tone_sde(d, ss, opts);
  ExactPropagator prop(sde, cfg.dt);
  const Eigen::Matrix<double, 5, 4>& phi = prop.transition();
  const Eigen::Matrix<double, 5, 5>& L = prop.noise_factor();
  GaussianStream gauss(cfg.seed, trajectory);

  Vec4 s = Vec4::Zero();
  if (opts.stationary_start) {
    Eigen::Matrix4d S = stationary_covariance(sde);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(S);
    Vec4 g;
    for (int i = 0; i < 4; ++i) g(i) = gauss();
    Vec4 scaled = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseProduct(g);
    s = es.eigenvectors() * scaled;
  }

  // Deterministic tone: particular solution s_p(t) = Re(p e^{-i w t}).
  const bool tone = opts.signal.has_value();
  Eigen::Vector4cd p = Eigen::Vector4cd::Zero();
  cd Cp = 0, rot = 1, ph = 1;
  double w = 0;
  if (tone) {
    w = opts.signal->omega;
    require(w != 0, "signal tone frequency must be nonzero");
    cd c = -std::sqrt(d.lf.gamma) * opts.signal->beta0;
    Eigen::Vector4cd cv(0, 0, c, cd(0, -1) * c);
    Eigen::Matrix4cd M = cd(0, -w) * Eigen::Matrix4cd::Identity() -
                         sde.A.cast<cd>();
    p = M.partialPivLu().solve(cv);
    Cp = (sde.C.cast<cd>() * p)(0);
    rot = std::polar(1.0, -w * cfg.dt);
  }

  const double inv_dt = 1.0 / cfg.dt;
  Vec4 full;
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = n * cfg.dt;
    Vec5 gv;
    for (int i = 0; i < 5; ++i) gv(i) = gauss();
    Vec5 next = phi * s + L * gv;
    double y_int = next(4);
    full = s;
    if (tone) {
      if ((n & 1023) == 0) ph = std::polar(1.0, -w * t);
      cd ph1 = ph * rot;
      full += (p * ph).real();
      y_int += std::real(Cp * (ph1 - ph) / cd(0, -w));
      ph = ph1;
    }
    visit(n, t, full, y_int * inv_dt);
    s = next.head<4>();
  }
}

std::size_t step_count(const SimConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
}

}  // namespace

Trace simulate_single_tone(const DeviceParams& d, const SteadyState& ss,
                           const SimConfig& cfg,
                           const SingleToneOptions& opts) {
  cfg.validate(std::max({d.mw.kappa, d.lf.omega_b, std::abs(ss.Delta)}),
               d.lf.gamma);
  const std::size_t steps = step_count(cfg);
  const std::size_t stride = cfg.record_stride;
  Trace tr;
  std::size_t keep = (steps + stride - 1) / stride;
  tr.t.reserve(keep);
  tr.da.reserve(keep);
  tr.b.reserve(keep);
  tr.x_quad.reserve(keep);
  tr.y_quad.reserve(keep);
  tr.output.reserve(keep);
  double acc = 0;
  const double wb = d.lf.omega_b;
  run_single_tone(d, ss, cfg, opts, 0, steps,
                  [&](std::size_t n, double t, const Vec4& s, double y) {
                    acc += y;
                    if (n % stride == 0) {
                      cd b(s(2), s(3));
                      cd q = std::sqrt(2.0) * b * std::polar(1.0, wb * t);
                      tr.t.push_back(t);
                      tr.da.emplace_back(s(0), s(1));
                      tr.b.push_back(b);
                      tr.x_quad.push_back(q.real());
                      tr.y_quad.push_back(q.imag());
                    }
                    if ((n + 1) % stride == 0 || n + 1 == steps) {
                      std::size_t len = n % stride + 1;
                      tr.output.push_back(acc / len);
                      acc = 0;
                    }
                  });
  return tr;
}

SpectrumEstimate single_tone_spectrum(const DeviceParams& d,
                                      const SteadyState& ss,
                                      const SimConfig& cfg,
                                      const SingleToneOptions& opts,
                                      const Demodulation& demod) {
  cfg.validate(std::max({d.mw.kappa, d.lf.omega_b, std::abs(ss.Delta)}),
               d.lf.gamma);
  require(demod.decimation >= 1, "decimation >= 1");
  const std::size_t steps = step_count(cfg);
  const std::size_t M = demod.decimation;
  WelchConfig wc{cfg.welch_segment, cfg.welch_overlap, cfg.dt * M};
  wc.validate();
  if (steps / M < 4 * cfg.welch_segment) {
    std::ostringstream os;
    os << "duration yields " << steps / M
       << " demodulated samples per trajectory, below 4 x welch_segment";
    throw ConfigError(os.str());
  }

  std::vector<std::unique_ptr<WelchAccumulator>> parts(cfg.n_trajectories);
  parallel_for(cfg.n_trajectories, cfg.threads, [&](std::size_t traj) {
    auto acc = std::make_unique<WelchAccumulator>(wc, true);
    const cd rot = std::polar(1.0, -demod.omega * cfg.dt);
    cd ph = 1, sum = 0;
    run_single_tone(d, ss, cfg, opts, traj, steps,
                    [&](std::size_t n, double t, const Vec4&, double y) {
                      std::size_t j = n % M;
                      if (j == 0) ph = std::polar(1.0, -demod.omega * t);
                      sum += y * ph;
                      ph *= rot;
                      if (j + 1 == M) {
                        acc->push(sum / static_cast<double>(M));
                        sum = 0;
                      }
                    });
    parts[traj] = std::move(acc);
  });
  for (std::size_t i = 1; i < parts.size(); ++i) parts[0]->merge(*parts[i]);
  return parts[0]->result();
}

}  // namespace rqu

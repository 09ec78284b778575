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

#include "rqu/error.hpp"
#include "rqu/langevin.hpp"
#include "rqu/parallel.hpp"
#include "rqu/rng.hpp"

namespace rqu {
namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using cd = std::complex<double>;

constexpr std::size_t kBatches = 64;

// One period of per-step update matrices for a periodic coefficient matrix:
// s <- P[k] s + N[k] g.
struct PeriodicStepper {
  std::vector<Mat4> P;
  std::vector<Mat4> N;
  std::vector<cd> rot;  // exp(i omega_b t_k)
  double h = 0;
};

// Exact step of the state block of an SDE with frozen coefficients.
void exact_state_step(const LinearSde& sde, double h, Mat4* P, Mat4* N) {
  ExactPropagator prop(sde, h);
  *P = prop.transition().topRows<4>();
  Eigen::SelfAdjointEigenSolver<Mat4> es(
      prop.noise_covariance().topLeftCorner<4, 4>());
  *N = es.eigenvectors() *
       es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

// Exponential midpoint for the two-tone envelope: coefficients frozen at the
// step midpoint, free evolution exact. A trapezoidal step would detune the
// low-frequency mode by omega_b (omega_b h)^2 / 12 and leak conjugate-
// quadrature backaction into the measured quadrature.
PeriodicStepper two_tone_stepper(const DeviceParams& d, const Envelope& env,
                                 double phi_drive, double dt_max) {
  PeriodicStepper ps;
  std::size_t K = 0;
  ps.h = commensurate_dt(d.lf.omega_b, dt_max, &K);
  for (std::size_t k = 0; k < K; ++k) {
    double tm = (k + 0.5) * ps.h;
    double a = env.a_max * std::cos(d.lf.omega_b * tm + env.delta);
    SteadyState ss;
    ss.abar = std::polar(a, phi_drive);
    ss.n_circ = a * a;
    Mat4 P, N;
    exact_state_step(single_tone_sde(d, ss), ps.h, &P, &N);
    ps.P.push_back(P);
    ps.N.push_back(N);
    ps.rot.push_back(std::polar(1.0, d.lf.omega_b * k * ps.h));
  }
  return ps;
}

// Exact single-tone step, shaped as a periodic stepper of period one
// modulation cycle so quadrature phasors come from a table.
PeriodicStepper single_tone_stepper(const DeviceParams& d, double n_circ,
                                    double dt_max) {
  PeriodicStepper ps;
  std::size_t K = 0;
  ps.h = commensurate_dt(d.lf.omega_b, dt_max, &K);
  Mat4 P, N;
  exact_state_step(single_tone_sde(d, resonant_steady_state(n_circ)), ps.h,
                   &P, &N);
  for (std::size_t k = 0; k < K; ++k) {
    ps.P.push_back(P);
    ps.N.push_back(N);
    ps.rot.push_back(std::polar(1.0, d.lf.omega_b * k * ps.h));
  }
  return ps;
}

Vec4 vacuum_start(const DeviceParams& d, GaussianStream& g) {
  double sa = 0.5, sb = std::sqrt((d.lf.n_eq + 0.5) / 2);
  return Vec4(sa * g(), sa * g(), sb * g(), sb * g());
}

struct TrajStats {
  double sum_x = 0, sum_xx = 0, sum_y = 0, sum_yy = 0;
  std::size_t n = 0;
  std::vector<double> batch_var_x;
};

TrajStats run_stats(const DeviceParams& d, const PeriodicStepper& ps,
                    double delta, const SimConfig& cfg, double burn_in,
                    std::size_t traj) {
  GaussianStream gauss(cfg.seed, traj);
  Vec4 s = vacuum_start(d, gauss);
  const std::size_t K = ps.P.size();
  const std::size_t burn = static_cast<std::size_t>(std::llround(burn_in / ps.h));
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(cfg.duration / ps.h));
  const std::size_t per_batch = std::max<std::size_t>(1, steps / kBatches);
  const double cdl = std::cos(delta), sdl = std::sin(delta);
  TrajStats st;
  double bx = 0, bxx = 0;
  std::size_t bn = 0;
  for (std::size_t n = 0; n < burn + steps; ++n) {
    std::size_t k = n % K;
    if (n >= burn) {
      cd q = std::sqrt(2.0) * cd(s(2), s(3)) * ps.rot[k];
      double X = q.real() * cdl - q.imag() * sdl;
      double Y = q.real() * sdl + q.imag() * cdl;
      st.sum_x += X;
      st.sum_xx += X * X;
      st.sum_y += Y;
      st.sum_yy += Y * Y;
      ++st.n;
      bx += X;
      bxx += X * X;
      if (++bn == per_batch) {
        st.batch_var_x.push_back(bxx / bn - (bx / bn) * (bx / bn));
        bx = bxx = 0;
        bn = 0;
      }
    }
    Vec4 g(gauss(), gauss(), gauss(), gauss());
    s = ps.P[k] * s + ps.N[k] * g;
  }
  return st;
}

QuadratureStats reduce(const std::vector<TrajStats>& parts, double n_eq,
                       double h) {
  QuadratureStats q;
  double sx = 0, sxx = 0, sy = 0, syy = 0;
  std::vector<double> bv;
  for (const auto& p : parts) {
    sx += p.sum_x;
    sxx += p.sum_xx;
    sy += p.sum_y;
    syy += p.sum_yy;
    q.samples += p.n;
    bv.insert(bv.end(), p.batch_var_x.begin(), p.batch_var_x.end());
  }
  double n = static_cast<double>(q.samples);
  q.var_x = sxx / n - (sx / n) * (sx / n);
  q.var_y = syy / n - (sy / n) * (sy / n);
  double m = 0, v = 0;
  for (double b : bv) m += b;
  m /= bv.size();
  for (double b : bv) v += (b - m) * (b - m);
  q.var_x_err = bv.size() > 1 ? std::sqrt(v / (bv.size() - 1) / bv.size()) : 0;
  q.excess_x = q.var_x - 0.5 - n_eq;
  q.excess_y = q.var_y - 0.5 - n_eq;
  q.dt_used = h;
  return q;
}

}  // namespace

Trace simulate_two_tone(const DeviceParams& d, const TwoToneDrive& drive,
                        const SimConfig& cfg) {
  cfg.validate(std::max(d.mw.kappa, 2 * d.lf.omega_b), d.lf.gamma);
  Envelope env = envelope(drive, d.mw, d.lf);
  PeriodicStepper ps = two_tone_stepper(d, env, drive.phi_drive, cfg.dt);
  GaussianStream gauss(cfg.seed, 0);
  Vec4 s = vacuum_start(d, gauss);
  const std::size_t K = ps.P.size();
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(cfg.duration / ps.h));
  Trace tr;
  for (std::size_t n = 0; n < steps; ++n) {
    std::size_t k = n % K;
    if (n % cfg.record_stride == 0) {
      double t = n * ps.h;
      cd b(s(2), s(3));
      cd q = std::sqrt(2.0) * b * ps.rot[k];
      tr.t.push_back(t);
      tr.da.emplace_back(s(0), s(1));
      tr.b.push_back(b);
      tr.x_quad.push_back(q.real());
      tr.y_quad.push_back(q.imag());
    }
    Vec4 g(gauss(), gauss(), gauss(), gauss());
    s = ps.P[k] * s + ps.N[k] * g;
  }
  return tr;
}

QuadratureStats two_tone_quadrature_stats(const DeviceParams& d,
                                          const TwoToneDrive& drive,
                                          const SimConfig& cfg,
                                          double burn_in) {
  cfg.validate(std::max(d.mw.kappa, 2 * d.lf.omega_b), d.lf.gamma);
  require(burn_in >= 0, "burn_in >= 0");
  Envelope env = envelope(drive, d.mw, d.lf);
  PeriodicStepper ps = two_tone_stepper(d, env, drive.phi_drive, cfg.dt);
  auto parts = parallel_map<TrajStats>(
      cfg.n_trajectories, cfg.threads, [&](std::size_t i) {
        return run_stats(d, ps, env.delta, cfg, burn_in, i);
      });
  return reduce(parts, d.lf.n_eq, ps.h);
}

QuadratureStats single_tone_quadrature_stats(const DeviceParams& d,
                                             double n_circ,
                                             const SimConfig& cfg,
                                             double burn_in) {
  cfg.validate(std::max(d.mw.kappa, d.lf.omega_b), d.lf.gamma);
  require(burn_in >= 0, "burn_in >= 0");
  PeriodicStepper ps = single_tone_stepper(d, n_circ, cfg.dt);
  auto parts = parallel_map<TrajStats>(
      cfg.n_trajectories, cfg.threads, [&](std::size_t i) {
        return run_stats(d, ps, 0.0, cfg, burn_in, i);
      });
  return reduce(parts, d.lf.n_eq, ps.h);
}

}  // namespace rqu

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

#include "rqu/fock_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "rqu/core_model.hpp"
#include "rqu/error.hpp"
#include "rqu/langevin.hpp"

namespace rqu {
namespace {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
constexpr cd kI{0.0, 1.0};

SpMat identity(std::size_t n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

SpMat lowering(std::size_t n) {
  std::vector<Eigen::Triplet<cd>> t;
  for (std::size_t k = 1; k < n; ++k)
    t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat kron(const SpMat& A, const SpMat& B) {
  SpMat out = Eigen::kroneckerProduct(A, B);
  out.makeCompressed();
  return out;
}

SpMat adjoint(const SpMat& m) { return SpMat(m.adjoint()); }

void add_dissipator(SpMat& L, const SpMat& c, const SpMat& I) {
  SpMat cdc = adjoint(c) * c;
  SpMat cc = c.conjugate();
  L += kron(cc, c) - 0.5 * kron(I, cdc) - 0.5 * kron(SpMat(cdc.transpose()), I);
}

double top_population(const Vec& rho, std::size_t Na, std::size_t Nb,
                      bool cavity) {
  const std::size_t D = Na * Nb;
  double p = 0;
  if (cavity) {
    for (std::size_t ib = 0; ib < Nb; ++ib) {
      std::size_t i = (Na - 1) * Nb + ib;
      p += rho(i + i * D).real();
    }
  } else {
    for (std::size_t ia = 0; ia < Na; ++ia) {
      std::size_t i = ia * Nb + Nb - 1;
      p += rho(i + i * D).real();
    }
  }
  return p;
}

cd trace_of(const Vec& rho, std::size_t D) {
  cd t = 0;
  for (std::size_t i = 0; i < D; ++i) t += rho(i + i * D);
  return t;
}

cd linear_amplitude(const FockParams& p) {
  return std::sqrt(p.kappa) * p.drive / (kI * p.Delta - p.kappa / 2);
}

}  // namespace

void FockConfig::validate(bool allow_small) const {
  std::size_t min_n = allow_small ? 2 : 4;
  if (N_a < min_n || N_b < min_n) {
    std::ostringstream os;
    os << "Fock truncation N_a, N_b >= " << min_n << " required (got " << N_a
       << ", " << N_b << ")";
    throw ConfigError(os.str());
  }
  const FockParams& p = params;
  require(p.kappa > 0, "kappa > 0");
  require(p.gamma > 0, "gamma > 0");
  require(p.omega_b > 0, "omega_b > 0");
  require(p.n_th >= 0, "n_th >= 0");
  require(p.g0 >= 0, "g0 >= 0");
  require(t_max > 0 && dt_obs > 0 && tau_max > dt_obs,
          "t_max, dt_obs > 0 and tau_max > dt_obs");
  double D = static_cast<double>(N_a * N_b);
  if (D * D > static_cast<double>(max_entries)) {
    std::ostringstream os;
    os << "Liouville space dimension (N_a N_b)^2 = " << D * D
       << " exceeds the cap " << max_entries;
    throw ResourceError(os.str());
  }
}

Generator build_generator(const FockConfig& cfg, bool allow_small) {
  cfg.validate(allow_small);
  const FockParams& p = cfg.params;
  Generator g;
  g.cfg = cfg;
  g.dim = cfg.N_a * cfg.N_b;
  const SpMat Ia = identity(cfg.N_a), Ib = identity(cfg.N_b), I = identity(g.dim);
  g.d = kron(lowering(cfg.N_a), Ib);
  g.b = kron(Ia, lowering(cfg.N_b));
  g.alpha = cfg.displaced ? linear_amplitude(p) : cd(0);
  g.a = g.alpha * I + g.d;

  const SpMat ad = adjoint(g.a), dd = adjoint(g.d), bd = adjoint(g.b);
  const SpMat n_a = ad * g.a;
  const SpMat x_b = g.b + bd;
  g.H = -p.Delta * n_a + p.omega_b * (bd * g.b) - p.g0 * (n_a * x_b) -
        kI * std::sqrt(p.kappa) * (p.drive * ad - std::conj(p.drive) * g.a);
  // Coherent part of the cavity dissipator after the displacement.
  if (g.alpha != cd(0))
    g.H += (kI * (p.kappa / 2)) * (std::conj(g.alpha) * g.d - g.alpha * dd);
  g.H.makeCompressed();
  SpMat herm = g.H - adjoint(g.H);
  for (int k = 0; k < herm.outerSize(); ++k)
    for (SpMat::InnerIterator it(herm, k); it; ++it)
      g.hermiticity_error = std::max(g.hermiticity_error, std::abs(it.value()));

  g.L = -kI * (kron(I, g.H) - kron(SpMat(g.H.transpose()), I));
  add_dissipator(g.L, std::sqrt(p.kappa) * g.d, I);
  add_dissipator(g.L, std::sqrt(p.gamma * (1 + p.n_th)) * g.b, I);
  if (p.n_th > 0) add_dissipator(g.L, std::sqrt(p.gamma * p.n_th) * bd, I);
  g.L.prune(cd(0));
  g.L.makeCompressed();
  return g;
}

cd expectation(const SpMat& op, const Vec& rho, std::size_t D) {
  cd s = 0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SpMat::InnerIterator it(op, k); it; ++it)
      s += it.value() * rho(it.col() + it.row() * D);
  return s;
}

FockSteadyState steady_state(const Generator& g, double tol) {
  const std::size_t D = g.dim, N = D * D;
  const FockParams& p = g.cfg.params;
  // Resolvent iteration rho <- (I - h L)^{-1} rho. The resolvent is a
  // trace-preserving positive map for every h > 0, and its fixed point is the
  // null vector of L, so h is limited only by the conditioning of I - h L.
  const double h = 1e3 / std::min(p.kappa, p.gamma);
  SpMat A(N, N);
  A.setIdentity();
  A -= h * g.L;
  A.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw ConvergenceError("sparse LU factorization of (I - h L) failed");

  FockSteadyState ss;
  ss.rho = Vec::Zero(N);
  ss.rho(0) = 1.0;
  double t = 0;
  for (;;) {
    ss.rho = lu.solve(ss.rho);
    t += h;
    ++ss.steps;
    ss.trace_error =
        std::max(ss.trace_error, std::abs(trace_of(ss.rho, D) - 1.0));
    ss.top_population_a = std::max(
        ss.top_population_a, top_population(ss.rho, g.cfg.N_a, g.cfg.N_b, true));
    ss.top_population_b = std::max(
        ss.top_population_b, top_population(ss.rho, g.cfg.N_a, g.cfg.N_b, false));
    ss.residual = (g.L * ss.rho).norm();
    if (ss.residual < tol) break;
    if (t > g.cfg.t_max) {
      std::ostringstream os;
      os << "steady state not reached by t = " << g.cfg.t_max
         << "; residual ||L rho|| = " << ss.residual << " after " << ss.steps
         << " steps";
      throw ConvergenceError(os.str());
    }
  }
  ss.t_reached = t;
  ss.truncation_ok =
      ss.top_population_a < 1e-6 && ss.top_population_b < 1e-6;
  return ss;
}

EmissionSpectrum emission_spectrum(const Generator& g,
                                   const FockSteadyState& ss) {
  const std::size_t D = g.dim;
  const FockParams& p = g.cfg.params;
  const SpMat I = identity(D);
  cd mean_d = expectation(g.d, ss.rho, D);
  SpMat da = g.d - mean_d * I;
  SpMat left = kron(I, da);  // vec(da rho) = (I (x) da) vec(rho)
  SpMat dad = adjoint(da);

  // RK4 substep bounded by the generator's row-sum norm.
  double norm_inf = 0;
  {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(g.L.rows());
    for (int k = 0; k < g.L.outerSize(); ++k)
      for (SpMat::InnerIterator it(g.L, k); it; ++it)
        rows(it.row()) += std::abs(it.value());
    norm_inf = rows.maxCoeff();
  }
  const double dt = g.cfg.dt_obs;
  const int sub = std::max(1, static_cast<int>(std::ceil(dt * norm_inf / 2.5)));
  const double h = dt / sub;
  const std::size_t K =
      static_cast<std::size_t>(std::llround(g.cfg.tau_max / dt));

  Vec X = left * ss.rho;
  const cd tr0 = trace_of(X, D);
  std::vector<cd> corr(K + 1);
  EmissionSpectrum es;
  Vec k1, k2, k3, k4;
  for (std::size_t k = 0; k <= K; ++k) {
    corr[k] = expectation(dad, X, D);
    es.trace_error = std::max(es.trace_error, std::abs(trace_of(X, D) - tr0));
    if (k == K) break;
    for (int s = 0; s < sub; ++s) {
      k1 = g.L * X;
      k2 = g.L * (X + 0.5 * h * k1);
      k3 = g.L * (X + 0.5 * h * k2);
      k4 = g.L * (X + h * k3);
      X += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }

  // S(w) = 2 Re int_0^T w(tau) g(tau) e^{-i w tau} dtau, half-Hann taper.
  const double T = K * dt;
  std::vector<cd> wg(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    double w = 0.5 * (1 + std::cos(std::numbers::pi * k * dt / T));
    double trap = (k == 0 || k == K) ? 0.5 : 1.0;
    wg[k] = corr[k] * w * trap * dt;
  }
  const double wb = p.omega_b;
  const double step = wb / 400;
  for (int side : {-1, 1}) {
    std::vector<double> om, S;
    for (double w = 0.5 * wb; w <= 1.5 * wb + 1e-12; w += step) {
      double ww = side * w;
      cd acc = 0;
      const cd rot = std::polar(1.0, -ww * dt);
      cd ph = 1;
      for (std::size_t k = 0; k <= K; ++k) {
        acc += wg[k] * ph;
        ph *= rot;
      }
      om.push_back(ww);
      S.push_back(2 * acc.real());
    }
    if (side < 0) {
      std::reverse(om.begin(), om.end());
      std::reverse(S.begin(), S.end());
    }
    std::size_t j = std::max_element(S.begin(), S.end()) - S.begin();
    SpectrumPeak pk;
    pk.omega = om[j];
    pk.height = S[j];
    if (j > 0 && j + 1 < S.size()) {
      double den = S[j - 1] - 2 * S[j] + S[j + 1];
      if (den < 0) {
        double off = 0.5 * (S[j - 1] - S[j + 1]) / den;
        pk.omega += off * step;
        pk.height = S[j] - 0.25 * (S[j - 1] - S[j + 1]) * off;
      }
    }
    for (std::size_t i = 0; i < S.size(); ++i) {
      if (std::abs(om[i] - pk.omega) <= 0.25 * wb)
        pk.power += S[i] * step / (2 * std::numbers::pi);
      es.max_abs = std::max(es.max_abs, std::abs(S[i]));
    }
    es.omega.insert(es.omega.end(), om.begin(), om.end());
    es.S.insert(es.S.end(), S.begin(), S.end());
    es.peaks.push_back(pk);
  }
  return es;
}

namespace {

LinearComparison compare_linearized(const Generator& g,
                                    const FockSteadyState& ss) {
  const FockParams& p = g.cfg.params;
  const std::size_t D = g.dim;
  LinearComparison lc;
  SpMat bd = adjoint(g.b);
  SpMat X = (g.b + bd) / std::sqrt(2.0);
  SpMat P = (g.b - bd) * cd(0, -1.0 / std::sqrt(2.0));
  double mx = expectation(X, ss.rho, D).real();
  double mp = expectation(P, ss.rho, D).real();
  lc.var_x = expectation(SpMat(X * X), ss.rho, D).real() - mx * mx;
  lc.var_p = expectation(SpMat(P * P), ss.rho, D).real() - mp * mp;
  lc.mean_x = std::sqrt(2.0) * mx;

  PhysicalConstants c = PhysicalConstants::natural();
  DeviceParams dev;
  dev.constants = c;
  dev.lf = LowFrequencyMode::make(p.omega_b, 1.0, p.omega_b / p.gamma, 1.0,
                                  0.0, p.n_th, c);
  dev.mw.kappa = p.kappa;
  dev.coupling = coupling_from_g0(p.g0, c, dev.lf);
  SteadyState lin;
  lin.abar = linear_amplitude(p);
  lin.n_circ = std::norm(lin.abar);
  lin.Delta = p.Delta;
  Eigen::Matrix4d S = stationary_covariance(single_tone_sde(dev, lin));
  lc.var_x_lin = 2 * S(2, 2);
  lc.sideband_power_lin = S(0, 0) + S(1, 1) - 0.5;
  lc.var_p_lin = 2 * S(3, 3);
  lc.rel_var_x = lc.var_x / lc.var_x_lin - 1;
  lc.rel_var_p = lc.var_p / lc.var_p_lin - 1;
  lc.mean_x_static = 2 * p.g0 * lin.n_circ * p.omega_b /
                     (p.omega_b * p.omega_b + p.gamma * p.gamma / 4);
  lc.rel_mean_x = lc.mean_x_static != 0 ? lc.mean_x / lc.mean_x_static - 1 : 0;
  return lc;
}

FockParams base_params() {
  FockParams p;
  p.kappa = 1;
  p.omega_b = 1;
  p.gamma = 0.01;
  return p;
}

// Resonant drive amplitude giving n_circ photons in the linear cavity.
cd drive_for(double n_circ, double kappa) {
  return std::sqrt(n_circ * kappa) / 2;
}

}  // namespace

OracleReport run_oracle(const std::string& name, const FockConfig& cfg,
                        bool with_spectrum) {
  auto t0 = std::chrono::steady_clock::now();
  const bool small = cfg.N_a < 4 || cfg.N_b < 4;
  Generator g = build_generator(cfg, small);
  FockSteadyState ss = steady_state(g);
  OracleReport r;
  r.name = name;
  r.cfg = cfg;
  const std::size_t D = g.dim;
  r.steady_n_a = expectation(SpMat(adjoint(g.a) * g.a), ss.rho, D).real();
  r.steady_n_b = expectation(SpMat(adjoint(g.b) * g.b), ss.rho, D).real();
  r.mean_a = expectation(g.a, ss.rho, D);
  r.residual = ss.residual;
  r.trace_error = ss.trace_error;
  r.top_population_a = ss.top_population_a;
  r.top_population_b = ss.top_population_b;
  r.valid = ss.truncation_ok || small;
  r.linearized = compare_linearized(g, ss);
  if (with_spectrum) {
    EmissionSpectrum es = emission_spectrum(g, ss);
    r.spectrum_peaks = es.peaks;
    r.spectrum_max_abs = es.max_abs;
    double worst = 0;
    for (const auto& pk : es.peaks)
      worst = std::max(worst, std::abs(std::abs(pk.omega) / cfg.params.omega_b - 1));
    r.linearized.sideband_rel_err = worst;
    for (const auto& pk : es.peaks) r.linearized.sideband_power += pk.power;
    if (r.linearized.sideband_power_lin > 0)
      r.linearized.rel_sideband_power =
          r.linearized.sideband_power / r.linearized.sideband_power_lin - 1;
  }
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<std::string> oracle_case_names() {
  return {"thermal", "coherent", "two_level", "static_shift", "linearization",
          "linearization_fast_lf"};
}

FockConfig oracle_case(const std::string& name) {
  FockConfig c;
  c.params = base_params();
  if (name == "thermal") {
    c.N_a = 4;
    c.N_b = 20;
    c.params.gamma = 0.1;
    c.params.n_th = 0.5;
  } else if (name == "coherent") {
    c.N_a = 16;
    c.N_b = 4;
    c.displaced = false;
    c.params.drive = drive_for(2.0, c.params.kappa);
  } else if (name == "two_level") {
    c.N_a = 2;
    c.N_b = 2;
    c.displaced = false;
    c.params.drive = 0.3;
  } else if (name == "static_shift") {
    c.params.g0 = 0.01;
    c.params.drive = drive_for(1.0, c.params.kappa);
  } else if (name == "linearization") {
    c.params.g0 = 0.02;
    c.params.drive = drive_for(4.0, c.params.kappa);
  } else if (name == "linearization_fast_lf") {
    c.params.g0 = 0.02;
    c.params.omega_b = 10;
    c.params.drive = drive_for(4.0, c.params.kappa);
  } else {
    std::ostringstream os;
    os << "unknown oracle case '" << name << "'";
    throw ConfigError(os.str());
  }
  return c;
}

}  // namespace rqu

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

#include "rqu/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "rqu/bae.hpp"
#include "rqu/core_model.hpp"
#include "rqu/device_io.hpp"
#include "rqu/error.hpp"
#include "rqu/extinction.hpp"
#include "rqu/fock_oracle.hpp"
#include "rqu/langevin.hpp"
#include "rqu/linear_response.hpp"
#include "rqu/noise_budget.hpp"
#include "rqu/parallel.hpp"
#include "rqu/rng.hpp"

namespace rqu::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- records

using Value = std::variant<double, bool, std::string>;

struct Record {
  std::vector<std::pair<std::string, Value>> fields;
  void add(std::string k, Value v) { fields.emplace_back(std::move(k), std::move(v)); }
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(const Value& v) {
  if (auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (auto* b = std::get_if<bool>(&v)) return *b ? "1" : "0";
  return std::get<std::string>(v);
}

ojson to_json(const Record& r) {
  ojson o = ojson::object();
  for (const auto& [k, v] : r.fields) {
    if (auto* d = std::get_if<double>(&v))
      o[k] = std::isfinite(*d) ? ojson(*d) : ojson(format_double(*d));
    else if (auto* b = std::get_if<bool>(&v))
      o[k] = *b;
    else
      o[k] = std::get<std::string>(v);
  }
  return o;
}

std::string render(const std::vector<Record>& rows, const std::string& format,
                   bool single) {
  if (format == "json") {
    if (single) return to_json(rows.front()).dump(2) + "\n";
    ojson arr = ojson::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
  }
  std::string s;
  const auto& head = rows.front().fields;
  for (std::size_t i = 0; i < head.size(); ++i)
    s += (i ? "," : "") + head[i].first;
  s += "\n";
  for (const auto& r : rows) {
    if (r.fields.size() != head.size())
      throw Error("internal: ragged result table");
    for (std::size_t i = 0; i < r.fields.size(); ++i)
      s += (i ? "," : "") + csv_cell(r.fields[i].second);
    s += "\n";
  }
  return s;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string iso_time(std::chrono::system_clock::time_point t) {
  std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ------------------------------------------------------------ point model

/// Scalar inputs of one evaluation; unset fields take command defaults.
struct Point {
  std::optional<double> n_circ, omega, a_drive, kappa, omega_b, Q_b,
      amp_imbalance;

  void set(const std::string& axis, double v) {
    if (axis == "n_circ") n_circ = v;
    else if (axis == "omega") omega = v;
    else if (axis == "a_drive") a_drive = v;
    else if (axis == "kappa") kappa = v;
    else if (axis == "omega_b") omega_b = v;
    else if (axis == "Q_b") Q_b = v;
    else if (axis == "amp_imbalance") amp_imbalance = v;
    else throw ConfigError("sweep axis '" + axis + "' is not whitelisted");
  }
};

struct SimulateOptions {
  std::optional<double> dt, duration;
  std::size_t trajectories = 1;
  std::size_t segment = 512;
  double signal_snr = 20;
  bool no_signal = false;
  bool dump_trace = false;
  std::string mode = "single";
};

struct ExtinctionOptions {
  double phase_error = 0;
  double noise_floor = 0;
  double P0 = 1;
  double phi_env_deg = 0;
  bool fit_floor = true;
};

struct OracleOptions {
  std::string name = "linearization";
  std::optional<std::size_t> na, nb;
  bool spectrum = true;
};

struct Context {
  json config;  // as loaded, before per-point overrides
  bool have_config = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  SimulateOptions sim;
  ExtinctionOptions ext;
  OracleOptions oracle;
};

DeviceParams device_for(const Context& ctx, const Point& p) {
  if (!ctx.have_config) throw ConfigError("--config is required for this command");
  json doc = ctx.config;
  if (p.kappa) doc["mw"]["kappa"] = *p.kappa;
  if (p.omega_b) doc["lf"]["omega_b"] = *p.omega_b;
  if (p.Q_b) doc["lf"]["Q_b"] = *p.Q_b;
  return device_from_json(doc);
}

void add_device_columns(Record& r, const DeviceParams& d) {
  r.add("omega_b", d.lf.omega_b);
  r.add("Q_b", d.lf.Q_b);
  r.add("kappa", d.mw.kappa);
}

Record eval_budget(const Context& ctx, const Point& p) {
  DeviceParams d = device_for(ctx, p);
  const double n_opt = optimal_drive(d);
  const double n = p.n_circ.value_or(n_opt);
  const double w = p.omega.value_or(d.lf.omega_b);
  NoiseBudget nb = quantum_noise_densities(d, n, w);
  std::complex<double> Y = lf_admittance(w, d.lf);
  DriveLimits lim = drive_limits(d);
  SensitivityReport sens = energy_sensitivity(d, n);
  const double T_N = noise_temperature(d, n), T_sql = sql_temperature(d);
  Record r;
  add_device_columns(r, d);
  r.add("n_circ", n);
  r.add("omega", w);
  r.add("n_opt", n_opt);
  r.add("R_b", d.lf.R_b);
  r.add("S_II", nb.S_II);
  r.add("S_VV", nb.S_VV);
  r.add("R_noise", nb.R_noise);
  r.add("Y_re", Y.real());
  r.add("Y_im", Y.imag());
  r.add("S_II_tot", total_added_current_noise(nb, Y, w));
  r.add("T_N", T_N);
  r.add("T_SQL", T_sql);
  r.add("T_N_over_T_SQL", T_N / T_sql);
  r.add("epsilon_over_hbar", sens.epsilon_over_hbar);
  r.add("n_threshold", sens.n_threshold);
  r.add("n_bif", lim.n_bif);
  r.add("n_max", lim.n_max);
  r.add("R_max", lim.R_max);
  r.add("Q_min", lim.Q_min);
  r.add("sql_reachable", lim.sql_reachable);
  r.add("sideband_ratio", d.sideband_ratio());
  return r;
}

Record eval_response(const Context& ctx, const Point& p) {
  DeviceParams d = device_for(ctx, p);
  const double n = p.n_circ.value_or(optimal_drive(d));
  const double w = p.omega.value_or(d.lf.omega_b);
  SteadyState ss = resonant_steady_state(n);
  std::complex<double> Y = lf_admittance(w, d.lf);
  TransferPoint tp = output_transfer(w, d.mw, d.coupling, ss);
  // Outside the omega << kappa/2 band the quadrature formula does not apply.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::complex<double> G{nan, nan};
  bool in_band = true;
  try {
    G = phase_quadrature_gain(w, d.mw, d.coupling, ss);
  } catch (const UnsupportedRegimeError&) {
    in_band = false;
  }
  NoiseBudget nb = quantum_noise_densities(d, n, w);
  Record r;
  add_device_columns(r, d);
  r.add("n_circ", n);
  r.add("omega", w);
  r.add("reflection_re", tp.reflection.real());
  r.add("reflection_im", tp.reflection.imag());
  r.add("Y_re", Y.real());
  r.add("Y_im", Y.imag());
  r.add("Y_abs", std::abs(Y));
  r.add("gain_in_band", in_band);
  r.add("gain_abs", std::abs(G));
  r.add("gain_arg", std::arg(G));
  r.add("S_II_tot", total_added_current_noise(nb, Y, w));
  return r;
}

double default_a_drive(const DeviceParams& d) {
  // Envelope maximum carrying the optimal single-tone photon number on average.
  const double k = d.mw.kappa, w = d.lf.omega_b;
  return std::sqrt(2 * optimal_drive(d)) * std::sqrt((k * k + 4 * w * w) / k);
}

Record eval_bae(const Context& ctx, const Point& p) {
  DeviceParams d = device_for(ctx, p);
  const double a = p.a_drive.value_or(default_a_drive(d));
  Envelope env = envelope(TwoToneDrive::symmetric(a, d.lf), d.mw, d.lf);
  Record r;
  add_device_columns(r, d);
  r.add("a_drive", a);
  r.add("a_max", env.a_max);
  r.add("delta", env.delta);
  r.add("g0", d.coupling.g0);
  r.add("n_bad", spurious_backaction(env, d.coupling, d.mw, d.lf));
  r.add("n_ba_single", single_tone_backaction(d, env.a_max * env.a_max / 2));
  r.add("evasion_dB", evasion_factor(d, env));
  r.add("sidebands_resolved", sidebands_resolved(d.mw, d.lf));
  return r;
}

ExtinctionConfig extinction_config(const Context& ctx, const Point& p) {
  ExtinctionConfig c;
  c.amp_imbalance = p.amp_imbalance.value_or(0.0);
  c.phase_error = ctx.ext.phase_error;
  c.noise_floor = ctx.ext.noise_floor;
  c.P0 = ctx.ext.P0;
  c.phi_env_deg = ctx.ext.phi_env_deg;
  return c;
}

struct ExtinctionTable {
  std::vector<ExtinctionPoint> sweep;
  ExtinctionFit fit;
};

Record eval_extinction(const Context& ctx, const Point& p, std::uint64_t seed,
                       ExtinctionTable* table) {
  DeviceParams d = device_for(ctx, p);
  ExtinctionConfig c = extinction_config(ctx, p);
  auto sweep = simulate_extinction_sweep(d, c, seed);
  ExtinctionFit fit = ctx.ext.fit_floor ? fit_extinction(sweep)
                                        : fit_extinction(sweep, c.floor());
  Record r;
  r.add("amp_imbalance", c.amp_imbalance);
  r.add("phase_error", c.phase_error);
  r.add("noise_floor", c.noise_floor);
  r.add("extinction_dB_model", extinction_ratio_dB(c.P0, c.floor()));
  r.add("extinction_dB_fit", fit.extinction_dB);
  r.add("extinction_dB_numerical", numerical_extinction_dB(sweep));
  r.add("P0_fit", fit.P0);
  r.add("floor_fit", fit.floor);
  r.add("phi0_deg", fit.phi0 * 180 / std::numbers::pi);
  r.add("residual_rms", fit.residual_rms);
  r.add("floor_fitted", fit.floor_fitted);
  r.add("floor_model", std::string("quadrature leakage stand-in"));
  if (table) *table = {std::move(sweep), fit};
  return r;
}

struct SimulateExtras {
  std::string spectrum_csv;
  std::string trace_csv;
};

std::string trace_csv(const Trace& tr) {
  std::string s = "t,da_re,da_im,b_re,b_im,x_quad,y_quad,output\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double v[] = {tr.t[i], tr.da[i].real(), tr.da[i].imag(), tr.b[i].real(),
                        tr.b[i].imag(), tr.x_quad[i], tr.y_quad[i],
                        i < tr.output.size() ? tr.output[i] : 0.0};
    for (std::size_t k = 0; k < 8; ++k)
      s += (k ? "," : "") + format_double(v[k]);
    s += "\n";
  }
  return s;
}

Record eval_simulate(const Context& ctx, const Point& p, std::uint64_t seed,
                     unsigned threads, SimulateExtras* extras) {
  DeviceParams d = device_for(ctx, p);
  const bool two_tone = ctx.sim.mode == "two-tone";
  const double fastest = two_tone ? std::max(d.mw.kappa, 2 * d.lf.omega_b)
                                  : std::max(d.mw.kappa, d.lf.omega_b);
  SimConfig cfg;
  cfg.dt = ctx.sim.dt.value_or(1.0 / (20 * fastest));
  cfg.duration = ctx.sim.duration.value_or(2000.0 / d.lf.gamma);
  cfg.seed = seed;
  cfg.n_trajectories = ctx.sim.trajectories;
  cfg.welch_segment = ctx.sim.segment;
  cfg.threads = threads;
  // Gate the user's step before any refinement or integration.
  cfg.validate(fastest, d.lf.gamma);
  Record r;
  add_device_columns(r, d);
  auto dump = [&](const Trace& tr) {
    if (extras && ctx.sim.dump_trace) extras->trace_csv = trace_csv(tr);
  };
  auto stride_for = [&](double dt) {
    double steps = cfg.duration / dt;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(steps / 1e5)));
  };

  if (two_tone) {
    const double a = p.a_drive.value_or(default_a_drive(d));
    TwoToneDrive drive = TwoToneDrive::symmetric(a, d.lf);
    Envelope env = envelope(drive, d.mw, d.lf);
    QuadratureStats q =
        two_tone_quadrature_stats(d, drive, cfg, 10.0 / d.lf.gamma);
    r.add("a_drive", a);
    r.add("a_max", env.a_max);
    r.add("dt", q.dt_used);
    r.add("duration", cfg.duration);
    r.add("n_bad", spurious_backaction(env, d.coupling, d.mw, d.lf));
    r.add("var_x", q.var_x);
    r.add("var_x_err", q.var_x_err);
    r.add("var_y", q.var_y);
    r.add("excess_x", q.excess_x);
    r.add("excess_y", q.excess_y);
    r.add("samples", static_cast<double>(q.samples));
    if (extras && ctx.sim.dump_trace) {
      SimConfig one = cfg;
      one.n_trajectories = 1;
      one.record_stride = stride_for(cfg.dt);
      dump(simulate_two_tone(d, drive, one));
    }
    return r;
  }

  SqlOptions o;
  o.n_circ = p.n_circ.value_or(0.0);
  o.signal_on = !ctx.sim.no_signal;
  o.signal_snr = ctx.sim.signal_snr;
  o.segment = ctx.sim.segment;
  SqlReport s = sql_experiment(d, cfg, o);
  r.add("n_circ", s.n_circ);
  r.add("n_opt", s.n_opt);
  r.add("dt", s.dt_used);
  r.add("duration", cfg.duration);
  r.add("n_averages", static_cast<double>(s.n_averages));
  r.add("domega", s.domega);
  r.add("tone_omega", s.tone_omega);
  r.add("gain_at_omega_b", s.gain_at_omega_b);
  r.add("noise_at_omega_b", s.noise_at_omega_b);
  r.add("input_referred_quanta", s.input_referred_quanta);
  r.add("T_N_inferred", s.T_N_inferred);
  r.add("T_N_analytic", s.T_N_analytic);
  r.add("T_SQL", s.T_SQL);
  r.add("tone_snr", s.tone_snr);
  if (extras) {
    std::string csv = "omega_offset,psd\n";
    for (std::size_t i = 0; i < s.spectrum.freq.size(); ++i)
      csv += format_double(s.spectrum.freq[i]) + "," +
             format_double(s.spectrum.psd[i]) + "\n";
    extras->spectrum_csv = std::move(csv);
    if (ctx.sim.dump_trace) {
      SimConfig one = cfg;
      one.dt = s.dt_used;
      one.n_trajectories = 1;
      one.record_stride = stride_for(s.dt_used);
      dump(simulate_single_tone(d, resonant_steady_state(s.n_circ), one));
    }
  }
  return r;
}

Record eval_oracle(const Context& ctx) {
  FockConfig cfg = oracle_case(ctx.oracle.name);
  if (ctx.oracle.na) cfg.N_a = *ctx.oracle.na;
  if (ctx.oracle.nb) cfg.N_b = *ctx.oracle.nb;
  OracleReport o = run_oracle(ctx.oracle.name, cfg, ctx.oracle.spectrum);
  const FockParams& fp = o.cfg.params;
  const LinearComparison& l = o.linearized;
  Record r;
  r.add("case", o.name);
  r.add("N_a", static_cast<double>(o.cfg.N_a));
  r.add("N_b", static_cast<double>(o.cfg.N_b));
  r.add("kappa", fp.kappa);
  r.add("omega_b", fp.omega_b);
  r.add("gamma", fp.gamma);
  r.add("g0", fp.g0);
  r.add("n_th", fp.n_th);
  r.add("steady_n_a", o.steady_n_a);
  r.add("steady_n_b", o.steady_n_b);
  r.add("mean_a_re", o.mean_a.real());
  r.add("mean_a_im", o.mean_a.imag());
  r.add("residual", o.residual);
  r.add("trace_error", o.trace_error);
  r.add("top_population_a", o.top_population_a);
  r.add("top_population_b", o.top_population_b);
  r.add("valid", o.valid);
  r.add("var_x", l.var_x);
  r.add("var_p", l.var_p);
  r.add("var_x_lin", l.var_x_lin);
  r.add("var_p_lin", l.var_p_lin);
  r.add("rel_var_x", l.rel_var_x);
  r.add("rel_var_p", l.rel_var_p);
  r.add("mean_x", l.mean_x);
  r.add("mean_x_static", l.mean_x_static);
  for (std::size_t i = 0; i < o.spectrum_peaks.size(); ++i) {
    std::string k = "peak" + std::to_string(i);
    r.add(k + "_omega", o.spectrum_peaks[i].omega);
    r.add(k + "_height", o.spectrum_peaks[i].height);
    r.add(k + "_power", o.spectrum_peaks[i].power);
  }
  if (ctx.oracle.spectrum) {
    r.add("sideband_rel_err", l.sideband_rel_err);
    r.add("sideband_power", l.sideband_power);
    r.add("sideband_power_lin", l.sideband_power_lin);
  }
  return r;
}

const std::map<std::string, std::vector<std::string>>& axis_relevance() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"budget", {"n_circ", "omega", "kappa", "omega_b", "Q_b"}},
      {"response", {"n_circ", "omega", "kappa", "omega_b", "Q_b"}},
      {"bae", {"a_drive", "kappa", "omega_b", "Q_b"}},
      {"extinction", {"amp_imbalance"}},
      {"simulate", {"n_circ", "a_drive", "kappa", "omega_b", "Q_b"}},
  };
  return m;
}

Record evaluate(const std::string& command, const Context& ctx, const Point& p,
                std::uint64_t seed, unsigned threads) {
  if (command == "budget") return eval_budget(ctx, p);
  if (command == "response") return eval_response(ctx, p);
  if (command == "bae") return eval_bae(ctx, p);
  if (command == "extinction") return eval_extinction(ctx, p, seed, nullptr);
  if (command == "simulate") return eval_simulate(ctx, p, seed, threads, nullptr);
  throw ConfigError("command '" + command + "' cannot be swept");
}

}  // namespace

namespace {

double parse_number(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || !std::isfinite(v))
    throw ConfigError("malformed number '" + s + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

const std::vector<std::string>& sweep_whitelist() {
  static const std::vector<std::string> w = {
      "n_circ", "omega", "a_drive", "kappa", "omega_b", "Q_b", "amp_imbalance"};
  return w;
}

SweepAxis SweepAxis::parse(const std::string& text) {
  const std::string what = "sweep axis '" + text + "'";
  auto eq = text.find('=');
  if (eq == std::string::npos)
    throw ConfigError(what + ": expected name=scale:...");
  SweepAxis a;
  a.name = text.substr(0, eq);
  const auto& wl = sweep_whitelist();
  if (std::find(wl.begin(), wl.end(), a.name) == wl.end()) {
    std::string allowed;
    for (const auto& n : wl) allowed += (allowed.empty() ? "" : ", ") + n;
    throw ConfigError("sweep axis '" + a.name +
                      "' is not whitelisted (allowed: " + allowed + ")");
  }
  auto parts = split(text.substr(eq + 1), ':');
  if (parts.empty()) throw ConfigError(what + ": missing grid");
  a.scale = parts[0];
  if (a.scale == "list") {
    if (parts.size() != 2) throw ConfigError(what + ": expected list:v1,v2,...");
    for (const auto& v : split(parts[1], ','))
      a.values.push_back(parse_number(v, what));
    if (a.values.empty()) throw ConfigError(what + ": empty list");
    a.count = a.values.size();
    return a;
  }
  if (a.scale != "lin" && a.scale != "log")
    throw ConfigError(what + ": scale must be lin, log or list");
  if (parts.size() != 4)
    throw ConfigError(what + ": expected " + a.scale + ":min:max:count");
  a.min = parse_number(parts[1], what);
  a.max = parse_number(parts[2], what);
  double c = parse_number(parts[3], what);
  if (c < 2 || c != std::floor(c) || c > 1e6)
    throw ConfigError(what + ": grid count >= 2 required");
  a.count = static_cast<std::size_t>(c);
  if (a.scale == "log" && !(a.min > 0 && a.max > 0))
    throw ConfigError(what + ": log grid requires positive bounds");
  return a;
}

std::vector<double> SweepAxis::grid() const {
  if (scale == "list") return values;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    double f = static_cast<double>(i) / static_cast<double>(count - 1);
    g[i] = scale == "log"
               ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
               : min + f * (max - min);
  }
  g.front() = min;
  g.back() = max;
  return g;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;
  void write(const std::string& name, const std::string& content) {
    write_atomic(dir / name, content);
    files.push_back(name);
  }
};

void check_relevance(const std::string& command, const std::string& axis) {
  const auto& rel = axis_relevance().at(command);
  if (std::find(rel.begin(), rel.end(), axis) == rel.end())
    throw ConfigError("parameter '" + axis + "' has no effect on command '" +
                      command + "'");
}

std::string extinction_table_csv(const ExtinctionTable& t) {
  std::string s = "phase_deg,power_rel,fit_power_rel\n";
  for (const auto& p : t.sweep) {
    double c = std::cos(p.phase_deg * std::numbers::pi / 180 - t.fit.phi0);
    s += format_double(p.phase_deg) + "," + format_double(p.power / t.fit.P0) + "," +
         format_double(c * c + t.fit.floor / t.fit.P0) + "\n";
  }
  return s;
}

std::string bae_spectrum_csv(const Context& ctx, const Point& p) {
  DeviceParams d = device_for(ctx, p);
  const double a = p.a_drive.value_or(default_a_drive(d));
  Envelope env = envelope(TwoToneDrive::symmetric(a, d.lf), d.mw, d.lf);
  const double n_bad = spurious_backaction(env, d.coupling, d.mw, d.lf);
  std::vector<double> grid;
  for (int k = -200; k <= 200; ++k) grid.push_back(10 * d.lf.gamma * k / 200.0);
  QuadratureSpectrum q = measured_quadrature_psd(grid, d.lf.n_eq, n_bad, d.lf);
  std::string s = "omega_offset,S_X\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    s += format_double(grid[i]) + "," + format_double(q.S_X[i]) + "\n";
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  const auto started = std::chrono::system_clock::now();
  CLI::App app{"Quantum noise model of a flux-to-microwave upconverter"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path, out_dir = ".", format;
  std::uint64_t seed = 1;
  std::optional<unsigned> threads_flag;
  app.add_option("--config", config_path, "Device configuration (JSON)");
  app.add_option("--out-dir", out_dir, "Directory for results and manifest");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--threads", threads_flag, "Worker count (overrides RQU_THREADS)");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::map<std::string, double> point_flags;
  auto point_opt = [&](const std::string& flag, const std::string& key,
                       const std::string& help) {
    app.add_option_function<double>(
        flag, [&point_flags, key](double v) { point_flags[key] = v; }, help);
  };
  point_opt("--n-circ", "n_circ", "Intracavity photon number (default n_opt)");
  point_opt("--omega", "omega", "Analysis frequency, rad/s (default omega_b)");
  point_opt("--a-drive", "a_drive", "Two-tone drive amplitude");
  point_opt("--kappa", "kappa", "Override microwave linewidth");
  point_opt("--omega-b", "omega_b", "Override low-frequency resonance");
  point_opt("--q-b", "Q_b", "Override low-frequency quality factor");
  point_opt("--amp-imbalance,--imbalance", "amp_imbalance", "Relative tone-amplitude mismatch");

  Context ctx;
  std::vector<std::string> commands = {"budget", "response", "bae", "simulate",
                                       "extinction", "oracle", "sweep"};
  app.add_subcommand("budget", "Noise budget, noise temperature and drive limits");
  app.add_subcommand("response", "Admittance, transfer gain and added noise at one frequency");
  app.add_subcommand("bae", "Two-tone backaction-evading figures");
  auto* sim = app.add_subcommand("simulate", "Stochastic single-tone noise-temperature experiment");
  auto sim_options = [&ctx](CLI::App* sub) {
    sub->add_option("--dt", ctx.sim.dt, "Integration step");
    sub->add_option("--duration", ctx.sim.duration, "Trajectory duration");
    sub->add_option("--trajectories", ctx.sim.trajectories, "Independent trajectories");
    sub->add_option("--segment", ctx.sim.segment, "Welch segment length");
    sub->add_option("--signal-snr", ctx.sim.signal_snr, "Calibration tone strength");
    sub->add_flag("--no-signal", ctx.sim.no_signal, "Omit the calibration tone");
    sub->add_option("--mode", ctx.sim.mode, "single or two-tone")
        ->check(CLI::IsMember({"single", "two-tone"}));
    sub->add_flag("--dump-trace", ctx.sim.dump_trace, "Write one trajectory as CSV");
  };
  sim_options(sim);
  bool known_floor = false;
  auto* ext = app.add_subcommand("extinction", "Simulated two-tone extinction sweep and fit");
  auto ext_options = [&ctx, &known_floor](CLI::App* sub) {
    sub->add_option("--phase-error", ctx.ext.phase_error, "Tone phase asymmetry, rad");
    sub->add_option("--noise-floor,--floor", ctx.ext.noise_floor, "Mean additive noise relative to P0");
    sub->add_option("--p0", ctx.ext.P0, "Peak sideband power");
    sub->add_option("--phi-env", ctx.ext.phi_env_deg, "Envelope phase offset, degrees");
    sub->add_flag("--known-floor", known_floor, "Fit with the modelled floor held fixed");
  };
  ext_options(ext);
  auto* orc = app.add_subcommand("oracle", "Truncated-Fock Lindblad validation case");
  orc->add_option("--case", ctx.oracle.name, "Validation case")
      ->check(CLI::IsMember(oracle_case_names()));
  orc->add_option("--na", ctx.oracle.na, "Microwave truncation");
  orc->add_option("--nb", ctx.oracle.nb, "Low-frequency truncation");
  bool no_spectrum = false;
  orc->add_flag("--no-spectrum", no_spectrum, "Skip the emission spectrum");
  auto* swp = app.add_subcommand("sweep", "Evaluate a command over a parameter grid");
  std::string swept;
  std::vector<std::string> axes_text;
  swp->add_option("--command", swept, "Command to evaluate per grid point")
      ->required()
      ->check(CLI::IsMember({"budget", "response", "bae", "extinction", "simulate"}));
  swp->add_option("--axis", axes_text, "name=lin|log:min:max:count or name=list:v,...")
      ->required();
  sim_options(swp);
  ext_options(swp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  std::string command;
  for (const auto& c : commands)
    if (app.got_subcommand(c)) command = c;
  if (format.empty()) format = command == "sweep" ? "csv" : "json";
  ctx.ext.fit_floor = !known_floor;
  ctx.oracle.spectrum = !no_spectrum;

  try {
    ctx.seed = seed;
    ctx.threads = resolve_threads(threads_flag);
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot open config '" + config_path + "'");
      try {
        ctx.config = json::parse(f);
      } catch (const json::exception& e) {
        throw ConfigError("config '" + config_path + "' is not valid JSON: " +
                          e.what());
      }
      ctx.have_config = true;
      device_from_json(ctx.config);  // surface invariant violations early
    }

    Point base;
    const std::string base_cmd = command == "sweep" ? swept : command;
    for (const auto& [k, v] : point_flags) {
      if (base_cmd == "oracle")
        throw ConfigError("parameter '" + k + "' has no effect on command 'oracle'");
      check_relevance(base_cmd, k);
      base.set(k, v);
    }

    Outputs files;
    files.dir = out_dir;
    fs::create_directories(files.dir);
    std::string body, stem = command;

    if (command == "sweep") {
      std::vector<SweepAxis> axes;
      for (const auto& t : axes_text) axes.push_back(SweepAxis::parse(t));
      if (axes.size() > 3) throw ConfigError("at most 3 sweep axes");
      for (std::size_t i = 0; i < axes.size(); ++i) {
        check_relevance(swept, axes[i].name);
        for (std::size_t j = 0; j < i; ++j)
          if (axes[i].name == axes[j].name)
            throw ConfigError("sweep axis '" + axes[i].name + "' repeated");
      }
      std::vector<std::vector<double>> grids;
      std::size_t n = 1;
      for (const auto& a : axes) {
        grids.push_back(a.grid());
        n *= grids.back().size();
      }
      auto rows = parallel_map<Record>(n, ctx.threads, [&](std::size_t idx) {
        Point p = base;
        std::size_t rem = idx;
        for (std::size_t k = axes.size(); k-- > 0;) {
          p.set(axes[k].name, grids[k][rem % grids[k].size()]);
          rem /= grids[k].size();
        }
        return evaluate(swept, ctx, p, derive_seed(seed, idx), 1);
      });
      body = render(rows, format, false);
      stem = "sweep_" + swept;
    } else if (command == "oracle") {
      body = render({eval_oracle(ctx)}, format, true);
    } else if (command == "extinction") {
      ExtinctionTable table;
      Record r = eval_extinction(ctx, base, derive_seed(seed, 0), &table);
      body = render({r}, format, true);
      files.write("extinction_sweep.csv", extinction_table_csv(table));
    } else if (command == "simulate") {
      SimulateExtras ex;
      Record r = eval_simulate(ctx, base, derive_seed(seed, 0), ctx.threads, &ex);
      body = render({r}, format, true);
      if (!ex.spectrum_csv.empty()) files.write("simulate_spectrum.csv", ex.spectrum_csv);
      if (!ex.trace_csv.empty()) files.write("simulate_trace.csv", ex.trace_csv);
    } else if (command == "bae") {
      Record r = eval_bae(ctx, base);
      body = render({r}, format, true);
      files.write("bae_spectrum.csv", bae_spectrum_csv(ctx, base));
    } else {
      body = render({evaluate(command, ctx, base, derive_seed(seed, 0),
                              ctx.threads)},
                    format, true);
    }
    files.write(stem + "." + format, body);
    out << body;

    ojson m = ojson::object();
    std::vector<std::string> argv_v(argv, argv + argc);
    m["command_line"] = argv_v;
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(
                      ctx.have_config ? fnv1a(ctx.config.dump()) : 0));
    m["config_hash"] = ctx.have_config ? std::string("fnv1a64:") + hash : "none";
    m["master_seed"] = seed;
    m["code_version"] = RQU_VERSION;
    m["started_at"] = iso_time(started);
    m["finished_at"] = iso_time(std::chrono::system_clock::now());
    m["workers"] = ctx.threads;
    m["outputs"] = files.files;
    write_atomic(files.dir / (stem + ".manifest.json"), m.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfig);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kInternal);
  }
}

}  // namespace rqu::cli
